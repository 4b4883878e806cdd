//! The selected reduct is a pure function of the data and the metric:
//! parallelism level and chunk count only move wall time.
//!
//! ```sh
//! cargo run --release -p reduct --example parallel_determinism
//! ```

use std::num::NonZeroUsize;
use std::time::Instant;

use reduct::engine::{reduce, ReductionConfig};
use reduct::granule::build_granularity;
use reduct::measures::Metric;
use reduct::synth::SyntheticSpec;

fn main() -> reduct::Result<()> {
    let spec = SyntheticSpec {
        n_objects: 5000,
        n_attrs: 24,
        values_per_attr: 2,
        decision_classes: 2,
        seed: 7,
    };
    let table = spec.generate_table()?;
    let g = build_granularity(&table);

    let mut reference: Option<Vec<usize>> = None;
    println!("{:>6} {:>7} {:>10} {:>8}", "level", "chunks", "total_ms", "reduct");
    for level in [1usize, 2, 8] {
        for chunks in [1usize, 4, 16] {
            let cfg = ReductionConfig {
                metric: Metric::LiangEntropy,
                model_parallelism_level: NonZeroUsize::new(level).unwrap(),
                data_chunks: NonZeroUsize::new(chunks).unwrap(),
                ..ReductionConfig::default()
            };
            let started = Instant::now();
            let result = reduce(&g, &cfg)?;
            let elapsed = started.elapsed().as_millis();
            println!("{:>6} {:>7} {:>10} {:>8}", level, chunks, elapsed, result.reduct.len());

            match &reference {
                None => reference = Some(result.reduct),
                Some(expected) => assert_eq!(&result.reduct, expected, "reduct changed with parallelism"),
            }
        }
    }
    println!("identical reduct across the whole grid");
    Ok(())
}
