//! Attribute reduction (feature selection) for categorical decision tables.
//!
//! The library compresses a decision table into a granularity representation
//! — one weighted granule per distinct feature vector — and runs forward
//! heuristic selection on top of it. Four significance measures are
//! supported: positive region (`pr`), Shannon conditional entropy (`sce`),
//! Liang conditional entropy (`lce`) and combination conditional entropy
//! (`cce`). Candidate subsets are evaluated concurrently through a bounded
//! job pool, and each evaluation folds per-class terms in a deterministic
//! chunk order, so a run's selected reduct never depends on parallelism
//! settings.
//!
//! ```
//! use reduct::engine::{reduce, ReductionConfig};
//! use reduct::granule::build_granularity;
//! use reduct::table::{parse_table_str, SchemaConfig};
//!
//! let csv = "0,0,Y\n0,0,Y\n0,0,N\n0,1,Y\n0,1,Y\n0,1,Y\n1,0,N\n1,1,Y\n";
//! let table = parse_table_str(csv, &SchemaConfig::default()).unwrap().table;
//! let g = build_granularity(&table);
//! let result = reduce(&g, &ReductionConfig::default()).unwrap();
//! assert_eq!(result.reduct, vec![0, 1]);
//! ```
//!
//! ## Runnable examples
//!
//! Each major capability has a standalone example:
//!
//! ```text
//! cargo run --release -p reduct --example ingest_and_project
//! cargo run --release -p reduct --example granularity_lifecycle
//! cargo run --release -p reduct --example four_measures
//! cargo run --release -p reduct --example attribute_core
//! cargo run --release -p reduct --example forward_selection
//! cargo run --release -p reduct --example parallel_determinism
//! ```
//!
//! A thin `reduct` binary exposes the same functionality as subcommands
//! (`reduce`, `core`, `evaluate`, `gen`, `bench`); see the README.

pub mod engine;
pub mod error;
pub mod granule;
pub mod measures;
pub mod parallel;
pub mod report;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
