//! Binary feature-file layout, all integers and floats little-endian:
//!
//! ```text
//! "NFGC"            4 bytes
//! version = 1       u32
//! n                 u32   sample count
//! d                 u32   feature dimension
//! c                 u32   class count
//! c x { len: u32, name: len bytes of UTF-8 }
//! n x { class: u32, d x f32 }
//! ```

use super::{FeatureRecord, FeatureSet};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NFGC";
pub const VERSION: u32 = 1;

fn to_u32(value: usize, what: &str) -> Result<u32> {
    u32::try_from(value)
        .map_err(|_| Error::InvalidParameter(format!("{what} {value} does not fit in u32")))
}

pub fn encode(set: &FeatureSet) -> Result<Vec<u8>> {
    set.validate()?;
    let names_len: usize = set.class_names.iter().map(|n| 4 + n.len()).sum();
    let mut out = Vec::with_capacity(20 + names_len + set.len() * (4 + 4 * set.dim));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(set.len(), "sample count")?.to_le_bytes());
    out.extend_from_slice(&to_u32(set.dim, "dimension")?.to_le_bytes());
    out.extend_from_slice(&to_u32(set.num_classes(), "class count")?.to_le_bytes());
    for name in &set.class_names {
        out.extend_from_slice(&to_u32(name.len(), "class name length")?.to_le_bytes());
        out.extend_from_slice(name.as_bytes());
    }
    for record in &set.records {
        out.extend_from_slice(&record.label.to_le_bytes());
        for x in &record.features {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(Error::Truncated {
                expected: self.pos.saturating_add(len),
                actual: self.bytes.len(),
            }),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub fn decode(bytes: &[u8]) -> Result<FeatureSet> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Parse {
            offset: 0,
            message: "bad magic, expected \"NFGC\"".into(),
        });
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Parse {
            offset: 4,
            message: format!("unsupported version {version}"),
        });
    }
    let n = r.u32()? as usize;
    let d = r.u32()? as usize;
    let c = r.u32()? as usize;

    let mut class_names = Vec::with_capacity(c.min(1 << 16));
    for _ in 0..c {
        let len = r.u32()? as usize;
        let at = r.pos;
        let raw = r.take(len)?;
        let name = std::str::from_utf8(raw).map_err(|e| Error::Parse {
            offset: at + e.valid_up_to(),
            message: "class name is not valid UTF-8".into(),
        })?;
        class_names.push(name.to_owned());
    }

    let record_len = d
        .checked_mul(4)
        .and_then(|x| x.checked_add(4))
        .ok_or_else(|| Error::Parse {
            offset: 12,
            message: format!("dimension {d} too large"),
        })?;
    let payload = n.checked_mul(record_len).ok_or_else(|| Error::Parse {
        offset: 8,
        message: format!("sample count {n} too large"),
    })?;
    let expected = r.pos.saturating_add(payload);
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::Parse {
            offset: expected,
            message: format!("{} trailing bytes after payload", bytes.len() - expected),
        });
    }

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let at = r.pos;
        let label = r.u32()?;
        if label as usize >= c {
            return Err(Error::Parse {
                offset: at,
                message: format!("record {i} has class index {label} but only {c} classes exist"),
            });
        }
        let raw = r.take(4 * d)?;
        let features: Vec<f32> = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteFeature { record: i });
        }
        records.push(FeatureRecord { label, features });
    }
    Ok(FeatureSet {
        dim: d,
        class_names,
        records,
    })
}
