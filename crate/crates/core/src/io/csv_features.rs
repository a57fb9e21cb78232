//! Human-editable feature files: a header row, then one row per sample with
//! the class name first and the feature values after it. Class indices follow
//! the order in which names first appear.

use std::collections::HashMap;
use std::io::{Read, Write};

use super::FeatureSet;
use crate::error::{Error, Result};

pub fn read_feature_csv<R: Read>(reader: R) -> Result<FeatureSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "csv header is empty".into(),
        });
    }
    let dim = headers.len() - 1;
    let mut set = FeatureSet::new(dim, Vec::new());
    let mut index: HashMap<String, u32> = HashMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let offset = row.position().map_or(0, |p| p.byte() as usize);
        let name = row.get(0).unwrap_or_default().to_owned();
        let label = match index.get(&name) {
            Some(&l) => l,
            None => {
                let l = set.class_names.len() as u32;
                set.class_names.push(name.clone());
                index.insert(name, l);
                l
            }
        };
        let features = row
            .iter()
            .skip(1)
            .map(|field| {
                field.parse::<f32>().map_err(|_| Error::Parse {
                    offset,
                    message: format!("record {i}: '{field}' is not a number"),
                })
            })
            .collect::<Result<Vec<f32>>>()?;
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteFeature { record: i });
        }
        set.push(label, features)?;
    }
    Ok(set)
}

pub fn write_feature_csv<W: Write>(set: &FeatureSet, writer: W) -> Result<()> {
    set.validate()?;
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["label".to_owned()];
    header.extend((0..set.dim).map(|j| format!("f{j}")));
    wtr.write_record(&header)?;
    for r in &set.records {
        let mut row = vec![set.class_name(r.label).to_owned()];
        // Debug formatting of f32 is the shortest exact representation.
        row.extend(r.features.iter().map(|x| format!("{x:?}")));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
