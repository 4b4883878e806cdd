//! Build a granularity representation, coarsen it onto sub-spaces, and
//! refine it back using the underlying table.
//!
//! ```sh
//! cargo run --release -p reduct --example granularity_lifecycle
//! ```

use std::io::stdout;

use reduct::granule::{build_granularity, refine};
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

    // One granule per distinct row; counts are row multiplicities.
    let g_full = build_granularity(&table);
    println!("G over C+D ({} granules, universe {}):", g_full.len(), g_full.universe_size());
    g_full.dump(&mut stdout())?;

    // Coarsening drops attributes and merges counts.
    let a2 = AttributeSubset::new([1]);
    let g_a2d = g_full.coarsen(&a2, true)?;
    println!("\ncoarsened to {{a2}} + decision:");
    g_a2d.dump(&mut stdout())?;

    let g_a2 = g_a2d.coarsen(&a2, false)?;
    println!("\ncoarsened to {{a2}}:");
    g_a2.dump(&mut stdout())?;

    // Refining needs object-level membership, so it takes the table.
    let refined = refine(&table, &g_a2, &a2, true)?;
    println!("\nrefined back to {{a2}} + decision:");
    refined.dump(&mut stdout())?;
    assert_eq!(refined, g_a2d);

    // Condition groups carry the decision histogram per class.
    println!("\ncondition groups of {{a2}} + decision:");
    for group in g_a2d.group_by_condition()? {
        println!("  key {:?}: size {}, histogram {:?}", group.key(), group.size(), group.decision_counts());
    }
    Ok(())
}
