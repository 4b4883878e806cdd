//! Evaluate attribute subsets under all four significance measures, and
//! cross-check the decomposed computation against the object-level oracle.
//!
//! ```sh
//! cargo run --release -p reduct --example four_measures
//! ```

use std::num::NonZeroUsize;

use reduct::engine::evaluate;
use reduct::granule::build_granularity;
use reduct::measures::{direct_evaluate, direct_positive_region, Metric};
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
    let chunks = NonZeroUsize::new(2).unwrap();

    let subsets = [
        AttributeSubset::new([0]),
        AttributeSubset::new([1]),
        AttributeSubset::new([0, 1]),
    ];

    println!("{:<10} {:>12} {:>12} {:>12} {:>12}", "subset", "pr", "sce", "lce", "cce");
    for subset in &subsets {
        print!("{:<10}", subset.to_string());
        for metric in Metric::ALL {
            let theta = evaluate(&g, subset, metric, chunks)?;
            let oracle = direct_evaluate(&table, subset, metric)?;
            assert!((theta - oracle).abs() <= 1e-9, "oracle disagrees for {metric}");
            print!(" {theta:>12.6}");
        }
        println!();
    }

    // The positive region behind the pr values.
    for subset in &subsets {
        let region = direct_positive_region(&table, subset);
        println!("positive region of {subset}: {} object(s) {region:?}", region.len());
    }
    Ok(())
}
