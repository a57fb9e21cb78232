//! A static neural-field classifier for generalized category discovery.
//!
//! Support samples become elementary neurons; each known class is a
//! high-level neuron linked to its samples. A query activates the classes
//! whose samples lie within the excitatory radius of a difference-of-Gaussians
//! kernel, and the kernel scale adapts until one class remains. Queries that
//! activate nothing become new classes on the spot.
//!
//! ```
//! use nfgcd::classifier::{NfClassifier, NfConfig, Verdict};
//! use nfgcd::preprocess::Metric;
//!
//! let support = [[0.0, 0.0], [5.0, 0.0]];
//! let mut clf =
//!     NfClassifier::fit_support(&support, &[0, 1], Metric::Euclidean, NfConfig::default())?;
//! assert_eq!(clf.predict(&[0.3, 0.2])?.verdict, Verdict::Known(0));
//!
//! let far = [0.0, 9.0];
//! assert_eq!(clf.predict(&far)?.verdict, Verdict::Novel);
//! clf.incorporate_novel(&far)?;
//! assert_eq!(clf.num_classes(), 3);
//! # Ok::<(), nfgcd::error::Error>(())
//! ```

pub mod classifier;
pub mod cli;
pub mod config;
pub mod episodes;
pub mod error;
pub mod field;
pub mod io;
pub mod kernel;
pub mod preprocess;
pub mod synthetic;
