//! Storage for the elementary field (one neuron per memorized sample) and the
//! high-level field (one neuron per class, binary cross-field links).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where an elementary neuron came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeuronSource {
    /// Index into the support set the classifier was fit on.
    Support(usize),
    /// Order in which a novel query was incorporated.
    Novel(usize),
}

/// Append-only store of neuron positions in feature space.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryField {
    dim: usize,
    positions: Vec<f64>,
    sources: Vec<NeuronSource>,
}

impl ElementaryField {
    pub fn new(dim: usize) -> Self {
        ElementaryField {
            dim,
            positions: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Appends a neuron and returns its index.
    pub fn push(&mut self, position: &[f64], source: NeuronSource) -> Result<usize> {
        if position.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: position.len(),
            });
        }
        self.positions.extend_from_slice(position);
        self.sources.push(source);
        Ok(self.sources.len() - 1)
    }

    pub fn position(&self, index: usize) -> &[f64] {
        &self.positions[index * self.dim..(index + 1) * self.dim]
    }

    pub fn source(&self, index: usize) -> NeuronSource {
        self.sources[index]
    }

    pub fn positions(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact(0) panics, and a zero-dimensional field is still valid.
        let dim = self.dim.max(1);
        self.positions
            .chunks_exact(dim)
            .take(if self.dim == 0 { 0 } else { self.len() })
    }
}

/// Identity of a high-level neuron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassKey {
    /// A ground-truth label supplied with the support set.
    Label(u32),
    /// A pseudo-label minted when a novel category was detected.
    Pseudo(u32),
}

/// Class registry plus the binary cross-field weights, stored as per-class
/// lists of linked elementary-neuron indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HighLevelField {
    classes: Vec<ClassKey>,
    links: Vec<Vec<usize>>,
}

impl HighLevelField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of high-level neurons.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[ClassKey] {
        &self.classes
    }

    pub fn class(&self, index: usize) -> ClassKey {
        self.classes[index]
    }

    pub fn index_of(&self, key: ClassKey) -> Option<usize> {
        self.classes.iter().position(|&k| k == key)
    }

    pub fn links(&self, class_index: usize) -> &[usize] {
        &self.links[class_index]
    }

    /// Registers a class with no links yet, or returns the existing index.
    pub fn register(&mut self, key: ClassKey) -> usize {
        if let Some(idx) = self.index_of(key) {
            return idx;
        }
        self.classes.push(key);
        self.links.push(Vec::new());
        self.classes.len() - 1
    }

    /// Sets `w[class, neuron] = 1`. The caller guarantees each neuron is linked once.
    pub fn link(&mut self, class_index: usize, neuron: usize) {
        self.links[class_index].push(neuron);
    }

    pub fn pseudo_count(&self) -> usize {
        self.classes
            .iter()
            .filter(|k| matches!(k, ClassKey::Pseudo(_)))
            .count()
    }
}
