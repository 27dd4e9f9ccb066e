//! Self-describing JSON problem files, so benchmark inputs can be replayed
//! exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LinearSystem, ProblemSpec};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};

const FORMAT: &str = "rkas-problem";
const VERSION: u32 = 1;

/// On-disk form of a [`LinearSystem`]. The matrix is always stored as CSR
/// arrays; `dense` records whether it should be rebuilt densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub format: String,
    pub version: u32,
    /// How the problem was made, when it was generated.
    pub spec: Option<ProblemSpec>,
    pub dense: bool,
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
    pub b: Vec<f64>,
    pub planted_x: Option<Vec<f64>>,
    pub planted_r: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn from_system(sys: &LinearSystem, spec: Option<ProblemSpec>) -> Self {
        let a = sys.csr();
        Self {
            format: FORMAT.into(),
            version: VERSION,
            spec,
            dense: !sys.a().is_sparse(),
            rows: a.nrows(),
            cols: a.ncols(),
            row_ptr: a.row_ptr().to_vec(),
            col_idx: a.col_idx().to_vec(),
            values: a.values().to_vec(),
            b: sys.b().to_vec(),
            planted_x: sys.planted_x().map(<[f64]>::to_vec),
            planted_r: sys.planted_r().map(<[f64]>::to_vec),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self).map_err(|source| Error::Container {
            path: path.to_path_buf(),
            source,
        })?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file: Self = serde_json::from_reader(BufReader::new(File::open(path)?)).map_err(|source| {
            Error::Container {
                path: path.to_path_buf(),
                source,
            }
        })?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::InvalidStructure(format!(
                "{} is a {:?} v{} file, expected {FORMAT:?} v{VERSION}",
                path.display(),
                file.format,
                file.version
            )));
        }
        Ok(file)
    }

    /// Validate and rebuild the system.
    pub fn into_system(self) -> Result<LinearSystem> {
        let csr = CsrMatrix::new(self.rows, self.cols, self.row_ptr, self.col_idx, self.values)?;
        let a: Matrix = if self.dense {
            let d = csr.to_dense();
            DenseMatrix::new(d.nrows(), d.ncols(), d.into_data())?.into()
        } else {
            csr.into()
        };
        let sys = LinearSystem::new(a, self.b)?;
        match (self.planted_x, self.planted_r) {
            (Some(x), Some(r)) => sys.with_planted(x, r),
            _ => Ok(sys),
        }
    }
}
