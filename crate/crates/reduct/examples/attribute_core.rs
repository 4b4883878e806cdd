//! Compute the attribute core: every attribute whose removal from the full
//! set strictly degrades the evaluation.
//!
//! ```sh
//! cargo run --release -p reduct --example attribute_core
//! ```

use reduct::engine::{compute_core, inner_significance, ReductionConfig};
use reduct::granule::build_granularity;
use reduct::measures::Metric;
use reduct::table::{parse_table_str, AttributeSubset, SchemaConfig};

const CSV: &str = "\
0,0,Y
0,0,Y
0,0,N
0,1,Y
0,1,Y
0,1,Y
1,0,N
1,1,Y
";

fn main() -> reduct::Result<()> {
    let table = parse_table_str(CSV, &SchemaConfig::default())?.table;
    let g = build_granularity(&table);

    for metric in Metric::ALL {
        let cfg = ReductionConfig {
            metric,
            ..ReductionConfig::default()
        };
        let (core, report) = compute_core(&g, &cfg)?;
        println!("metric {metric}: theta(D|C) = {:.6}", report.baseline_theta);
        for record in &report.records {
            println!(
                "  remove {}: theta = {:>9.6}, inner significance = {:>9.6}",
                table.condition_attr(record.attribute).name(),
                record.theta_probed,
                record.significance,
            );
        }
        println!("  core = {core}");
    }

    // Single probes work without the full report.
    let sig = inner_significance(&g, &AttributeSubset::new([0, 1]), 1, Metric::PositiveRegion)?;
    println!("\ninner significance of a2 under pr: {sig}");
    Ok(())
}
