use nfgcd::error::Error;
use nfgcd::io::{decode, encode, read_feature_file, write_feature_file, FeatureSet};
use proptest::prelude::*;

fn feature_set() -> impl Strategy<Value = FeatureSet> {
    (0usize..6, prop::collection::vec("\\PC{0,6}", 1..5)).prop_flat_map(|(dim, names)| {
        let classes = names.len() as u32;
        let record = (0..classes, prop::collection::vec(-1e6f32..1e6, dim));
        prop::collection::vec(record, 0..20).prop_map(move |records| {
            let mut set = FeatureSet::new(dim, names.clone());
            for (label, features) in records {
                set.push(label, features).unwrap();
            }
            set
        })
    })
}

proptest! {
    #[test]
    fn binary_round_trip(set in feature_set()) {
        let bytes = encode(&set).unwrap();
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(&back, &set);
        prop_assert_eq!(encode(&back).unwrap(), bytes);
    }

    #[test]
    fn truncation_is_always_detected(set in feature_set(), cut in 1usize..64) {
        let bytes = encode(&set).unwrap();
        let keep = bytes.len().saturating_sub(cut);
        prop_assert!(decode(&bytes[..keep]).is_err());
    }
}

#[test]
fn files_dispatch_on_extension() {
    let dir = tempfile::tempdir().unwrap();
    let mut set = FeatureSet::new(3, vec!["ant".into(), "bee".into()]);
    set.push(0, vec![1.0, 2.5, -3.0]).unwrap();
    set.push(1, vec![0.1, 1e-20, 7.0]).unwrap();
    set.push(0, vec![0.0, -0.0, 3.4e38]).unwrap();

    let bin = dir.path().join("set.nfgc");
    write_feature_file(&set, &bin).unwrap();
    assert_eq!(&std::fs::read(&bin).unwrap()[..4], b"NFGC");
    assert_eq!(read_feature_file(&bin).unwrap(), set);

    let csv = dir.path().join("set.CSV");
    write_feature_file(&set, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("label,f0,f1,f2\nant,"));
    let back = read_feature_file(&csv).unwrap();
    assert_eq!(back, set);
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(
        read_feature_file("/no/such/dir/x.nfgc"),
        Err(Error::Io(_))
    ));
}
