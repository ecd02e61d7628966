//! On-disk formats: JSON, schema version 1, integer masks.
//!
//! Field order is alphabetical so output is byte-stable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::SetSeq;
use crate::sets::{render_word, Family, GroundSize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Version(u32),
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// A list of families over `[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamiliesFile {
    pub families: Vec<Vec<u32>>,
    pub k: u32,
    pub v: u32,
}

impl FamiliesFile {
    pub fn from_families(k: GroundSize, fams: &[Family]) -> Self {
        FamiliesFile { families: fams.iter().map(|f| f.members().to_vec()).collect(), k: k.get(), v: SCHEMA_VERSION }
    }

    /// Validates masks and strict ordering of every inner list.
    pub fn to_families(&self) -> Result<(GroundSize, Vec<Family>), FileError> {
        if self.v != SCHEMA_VERSION {
            return Err(FileError::Version(self.v));
        }
        let k = GroundSize::new(self.k)?;
        let fams = self
            .families
            .iter()
            .enumerate()
            .map(|(i, members)| {
                if members.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParams(format!("family {i} is not strictly increasing")));
                }
                Family::new(k, members.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((k, fams))
    }

    pub fn to_json(&self) -> String {
        to_json_lines(self)
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render_pretty(&self) -> String {
        self.families
            .iter()
            .map(|f| f.iter().map(|&m| render_word(m)).collect::<Vec<_>>().join(" "))
            .map(|line| line + "\n")
            .collect()
    }
}

/// An ordered set sequence with its claimed exceedance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub d_claimed: usize,
    pub k: u32,
    pub sets: Vec<u32>,
    pub v: u32,
}

impl SequenceFile {
    pub fn from_seq(seq: &SetSeq) -> Self {
        SequenceFile { d_claimed: seq.d(), k: seq.ground().get(), sets: seq.items().to_vec(), v: SCHEMA_VERSION }
    }

    /// Validates masks only; the claimed `d` is checked by the verifier.
    pub fn ground(&self) -> Result<GroundSize, FileError> {
        if self.v != SCHEMA_VERSION {
            return Err(FileError::Version(self.v));
        }
        let k = GroundSize::new(self.k)?;
        if let Some(&mask) = self.sets.iter().find(|&&m| !k.contains_mask(m)) {
            return Err(Error::MaskOutOfRange { mask, k: k.get() }.into());
        }
        Ok(k)
    }

    pub fn to_json(&self) -> String {
        to_json_lines(self)
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    /// One element word per line, `.` for the empty set.
    pub fn render_pretty(&self) -> String {
        self.sets.iter().map(|&m| render_word(m) + "\n").collect()
    }
}

/// Pretty JSON with a trailing LF.
fn to_json_lines<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn read_text(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    std::fs::write(path, text).map_err(|source| FileError::Io { path: path.display().to_string(), source })
}
