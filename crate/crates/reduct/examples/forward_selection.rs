//! Full forward selection on a seeded synthetic table, with the sequential
//! object-level baseline as a cross-check.
//!
//! ```sh
//! cargo run --release -p reduct --example forward_selection
//! ```

use reduct::engine::{reduce, reduce_baseline, ReductionConfig};
use reduct::granule::build_granularity;
use reduct::measures::Metric;
use reduct::synth::SyntheticSpec;

fn main() -> reduct::Result<()> {
    // Wide enough that single attributes are redundant: the core stays small
    // and the iterative stage does the selection work.
    let spec = SyntheticSpec {
        n_objects: 2000,
        n_attrs: 16,
        values_per_attr: 4,
        decision_classes: 4,
        seed: 42,
    };
    let table = spec.generate_table()?;
    let g = build_granularity(&table);
    println!(
        "synthetic table: {} objects, {} attributes, {} granules",
        table.n_objects(),
        table.n_condition_attrs(),
        g.len()
    );

    let cfg = ReductionConfig {
        metric: Metric::ShannonEntropy,
        ..ReductionConfig::default()
    };
    let result = reduce(&g, &cfg)?;

    println!("theta(D|C) = {:.6}", result.theta_full);
    println!("core: {:?}, theta after core = {:.6}", result.core.indices(), result.theta_core);
    for (round, it) in result.iterations.iter().enumerate() {
        println!(
            "round {:>2}: {} candidates, picked a{} -> theta {:.6} ({} us)",
            round + 1,
            it.candidate_count,
            it.chosen + 1,
            it.theta,
            it.wall.as_micros(),
        );
    }
    println!("reduct ({} of {} attributes): {:?}", result.reduct.len(), table.n_condition_attrs(), result.reduct);

    // The sequential baseline must select the same sequence.
    let baseline = reduce_baseline(&table, &cfg)?;
    assert_eq!(baseline.reduct, result.reduct);
    println!("object-level baseline selected the same reduct");
    Ok(())
}
