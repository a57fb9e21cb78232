//! Score discovered pseudo-classes against true new classes with an optimal
//! one-to-one matching.
//!
//! Run with `cargo run --example hungarian_scoring`.

use nfgcd::episodes::hungarian_match;

fn main() {
    // Rows: true new classes. Columns: pseudo-classes minted during a stream.
    // Entry (i, j) counts queries of class i that ended up in pseudo-class j.
    let table = vec![
        vec![5.0, 0.0, 0.0, 1.0],
        vec![0.0, 4.0, 1.0, 0.0],
        vec![1.0, 0.0, 4.0, 0.0],
    ];
    let assignment = hungarian_match(&table);
    let total: f64 = table.iter().flatten().sum();
    for (class, pseudo) in assignment.rows.iter().enumerate() {
        match pseudo {
            Some(p) => println!(
                "true class {class} <-> pseudo-class {p} ({} queries)",
                table[class][*p]
            ),
            None => println!("true class {class} unmatched"),
        }
    }
    println!(
        "matched {} of {} new-class queries: New accuracy {:.4}",
        assignment.profit,
        total,
        assignment.profit / total
    );
    println!("the surplus pseudo-class only contributes errors");
}
