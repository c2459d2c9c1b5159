//! JSON state files: `{"dims": [..], "matrix": [[[re, im], ..], ..]}`, rows in order.

use std::path::Path;

use realign::linalg::{validate_density, ComplexMatrix, DensityMatrix};
use realign::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect();
        Self { dims: rho.dims().to_vec(), matrix }
    }

    pub fn into_density(self) -> CliResult<DensityMatrix> {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, Vec::len);
        if let Some((i, r)) = self.matrix.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(realign::Error::ShapeMismatch(format!("row {i} has {} entries, row 0 has {cols}", r.len())).into());
        }
        let data = self.matrix.into_iter().flatten().map(|[re, im]| Complex64::new(re, im)).collect();
        let mat = ComplexMatrix::from_vec(rows, cols, data)?;
        Ok(validate_density(self.dims, mat)?)
    }
}

pub fn parse_state_text(text: &str, path: &Path) -> CliResult<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_density()
}

pub fn parse_state_file(path: &Path) -> CliResult<DensityMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_state_text(&text, path)
}

pub fn write_state_file(path: &Path, rho: &DensityMatrix) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&StateFile::from_density(rho)).expect("state files serialize");
    std::fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
