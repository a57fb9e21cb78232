//! Fit on a handful of labelled points, classify a query stream, and watch
//! novel categories being created and then recognised.
//!
//! Run with `cargo run --example classify_and_discover`.

use nfgcd::classifier::{NfClassifier, NfConfig, Verdict};
use nfgcd::field::ClassKey;
use nfgcd::preprocess::Metric;

fn main() -> Result<(), nfgcd::error::Error> {
    let support = [
        [0.0, 0.0],
        [0.4, 0.2],
        [4.0, 0.0],
        [4.3, -0.3],
        [2.0, 4.0],
        [2.2, 4.4],
    ];
    let labels = [0, 0, 1, 1, 2, 2];
    let mut clf =
        NfClassifier::fit_support(&support, &labels, Metric::Euclidean, NfConfig::default())?;

    let stream = [
        [0.2, 0.3],  // class 0
        [2.0, 0.0],  // between 0 and 1
        [9.0, 9.0],  // far from everything
        [9.3, 8.8],  // next to the previous query
        [4.1, 0.1],  // class 1
        [-6.0, 3.0], // another unseen region
    ];
    for q in &stream {
        let out = clf.predict(q)?;
        let steps: Vec<String> = out
            .trace
            .iter()
            .map(|s| format!("({:.3}, {})", s.sigma, s.num))
            .collect();
        let name = match out.verdict {
            Verdict::Known(j) => describe(clf.class_key(j)),
            Verdict::Novel => {
                let j = clf.incorporate_novel(q)?;
                format!("novel, now {}", describe(clf.class_key(j)))
            }
        };
        println!(
            "{q:?} -> {name:<28} {:?} via {}",
            out.terminal_rule,
            steps.join(" ")
        );
    }
    println!(
        "\n{} classes, {} elementary neurons",
        clf.num_classes(),
        clf.num_neurons()
    );
    Ok(())
}

fn describe(key: ClassKey) -> String {
    match key {
        ClassKey::Label(l) => format!("class {l}"),
        ClassKey::Pseudo(p) => format!("pseudo-class {p}"),
    }
}
