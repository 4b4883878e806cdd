//! Parse a small categorical table and inspect its dictionary encoding.
//!
//! ```sh
//! cargo run --release -p reduct --example ingest_and_project
//! ```

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
    let parsed = parse_table_str(CSV, &SchemaConfig::default())?;
    let table = parsed.table;

    println!(
        "{} objects, {} condition attributes, decision cardinality {}",
        table.n_objects(),
        table.n_condition_attrs(),
        table.decision_cardinality()
    );

    for attr in table.condition_attrs() {
        println!("attribute {:>3}: values {:?}", attr.name(), attr.tokens());
    }
    println!("decision  {:>3}: values {:?}", table.decision_attr().name(), table.decision_attr().tokens());

    // Project single objects onto subsets; identifiers decode back to the
    // original tokens.
    let a2 = AttributeSubset::new([1]);
    let ids = table.project_row(3, &a2, true);
    println!(
        "object 4 on {{a2}} + decision: ids {:?} = tokens ({}, {})",
        ids,
        table.condition_attr(1).token(ids[0]),
        table.decision_attr().token(ids[1]),
    );

    let both = AttributeSubset::new([0, 1]);
    let ids = table.project_row(6, &both, false);
    println!(
        "object 7 on {{a1,a2}}: ids {:?} = tokens ({}, {})",
        ids,
        table.condition_attr(0).token(ids[0]),
        table.condition_attr(1).token(ids[1]),
    );
    Ok(())
}
