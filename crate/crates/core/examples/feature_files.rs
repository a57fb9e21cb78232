//! Write and read feature files in the binary and CSV layouts.
//!
//! Run with `cargo run --example feature_files`.

use nfgcd::io::{encode, read_feature_file, write_feature_file, FeatureSet};

fn main() -> Result<(), nfgcd::error::Error> {
    let mut set = FeatureSet::new(3, vec!["cat".into(), "dog".into(), "狐".into()]);
    set.push(0, vec![0.5, -1.0, 2.0])?;
    set.push(1, vec![1.25, 0.0, -3.5])?;
    set.push(2, vec![7.0, 8.0, 9.0])?;

    let bytes = encode(&set)?;
    println!("binary size: {} bytes", bytes.len());
    let header: Vec<String> = bytes[..20].iter().map(|b| format!("{b:02x}")).collect();
    println!("header: {}", header.join(" "));

    let dir = std::env::temp_dir().join(format!("nfgcd-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let bin = dir.join("features.nfgc");
    let csv = dir.join("features.csv");
    write_feature_file(&set, &bin)?;
    write_feature_file(&set, &csv)?;
    println!("\n{}:\n{}", csv.display(), std::fs::read_to_string(&csv)?);

    let from_bin = read_feature_file(&bin)?;
    let from_csv = read_feature_file(&csv)?;
    println!("binary round trip exact: {}", from_bin == set);
    println!("csv round trip exact:    {}", from_csv == set);
    println!("class counts: {:?}", from_bin.class_counts());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
