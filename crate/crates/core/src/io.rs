//! File formats shared by the CLI: matrices and vectors split into real and
//! imaginary arrays, plus helpers for writing reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ComplexVector};
use crate::state::{Observable, PureState};

/// `{"rows": n, "cols": m, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let shape_ok = |parts: &[Vec<f64>]| {
            parts.len() == self.rows && parts.iter().all(|row| row.len() == self.cols)
        };
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!(
                "re/im arrays do not match the declared {}x{} shape",
                self.rows, self.cols
            )));
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }

    pub fn to_observable(&self, label: &str) -> Result<Observable> {
        Observable::new(self.to_matrix()?, label)
    }
}

/// Column vector as parallel real and imaginary arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl VectorFile {
    pub fn from_vector(v: &ComplexVector) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_state(s: &PureState) -> Self {
        Self::from_vector(s.amplitudes())
    }

    pub fn to_vector(&self) -> Result<ComplexVector> {
        if self.re.len() != self.im.len() {
            return Err(Error::Parse("re and im arrays differ in length".into()));
        }
        Ok(ComplexVector::from_iterator(
            self.re.len(),
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&r, &i)| Complex64::new(r, i)),
        ))
    }
}

/// Input of `saturate`: either `{"a": M, "b": M}` or `[M, M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservablePairFile {
    Named { a: MatrixFile, b: MatrixFile },
    List([MatrixFile; 2]),
}

impl ObservablePairFile {
    pub fn observables(&self) -> Result<(Observable, Observable)> {
        let (a, b) = match self {
            ObservablePairFile::Named { a, b } => (a, b),
            ObservablePairFile::List([a, b]) => (a, b),
        };
        let a = a.to_observable("A")?;
        let b = b.to_observable("B")?;
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Ok((a, b))
    }
}

pub fn parse_observable_pair(text: &str) -> Result<(Observable, Observable)> {
    let file: ObservablePairFile = serde_json::from_str(text)?;
    file.observables()
}

pub fn read_observable_pair(path: &Path) -> Result<(Observable, Observable)> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_observable_pair(&text)
}

/// Writes `contents` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
