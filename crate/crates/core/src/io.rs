//! JSON matrix documents: `{"dim": d, "entries": [[re, im], ...], "label": "..."}`, row-major.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &CMatrix, label: Option<String>) -> Self {
        Self {
            dim: m.dim(),
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            label,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim * self.dim,
                actual: self.entries.len(),
            });
        }
        CMatrix::from_row_major(
            self.dim,
            self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad matrix document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix documents always serialize")
    }
}

pub fn read_matrix(path: &Path) -> Result<(CMatrix, Option<String>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let doc = MatrixDocument::from_json(&text)?;
    Ok((doc.to_matrix()?, doc.label))
}

pub fn write_matrix(path: &Path, m: &CMatrix, label: Option<String>) -> Result<()> {
    fs::write(path, MatrixDocument::from_matrix(m, label).to_json())
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

/// `x` with 8 significant digits, for human-readable output.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..8).contains(&mag) {
        format!("{:.*}", (7 - mag).max(0) as usize, x)
    } else {
        format!("{x:.7e}")
    }
}
