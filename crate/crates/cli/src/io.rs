//! Operator and channel files.
//!
//! An operator file is a JSON object
//!
//! ```json
//! { "dim": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
//!   "name": "ket0", "role": "density" }
//! ```
//!
//! where every entry is an `[re, im]` pair. A channel file is a JSON array of
//! operator records, one per Kraus block, in order.

use std::fmt;
use std::path::{Path, PathBuf};

use pcsft_core::linalg::{self, C64};
use pcsft_core::{ComplexOperator, DensityOperator};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Density,
    Hamiltonian,
    Observable,
    KrausBlock,
    Projector,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Density => "density",
            Role::Hamiltonian => "hamiltonian",
            Role::Observable => "observable",
            Role::KrausBlock => "kraus-block",
            Role::Projector => "projector",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
}

impl OperatorFile {
    pub fn from_operator(op: &ComplexOperator, name: Option<&str>, role: Option<Role>) -> Self {
        assert!(op.is_square(), "operator files hold square matrices");
        Self {
            dim: op.nrows(),
            entries: encode_entries(op),
            name: name.map(str::to_owned),
            role,
        }
    }

    /// Structural check: `entries` is `dim x dim` with finite numbers.
    pub fn to_operator(&self) -> Result<ComplexOperator, String> {
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        if self.entries.len() != self.dim {
            return Err(format!(
                "entries: expected {} rows, found {}",
                self.dim,
                self.entries.len()
            ));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(format!(
                    "entries[{i}]: expected {} columns, found {}",
                    self.dim,
                    row.len()
                ));
            }
            if let Some(j) = row.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
                return Err(format!("entries[{i}][{j}]: not a finite number"));
            }
        }
        Ok(ComplexOperator::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.entries[i][j];
            C64::new(re, im)
        }))
    }
}

pub fn encode_entries(op: &ComplexOperator) -> Vec<Vec<[f64; 2]>> {
    (0..op.nrows())
        .map(|i| (0..op.ncols()).map(|j| [op[(i, j)].re, op[(i, j)].im]).collect())
        .collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn schema(path: &Path, context: Option<usize>, message: String) -> CliError {
    let message = match context {
        Some(k) => format!("record {k}: {message}"),
        None => message,
    };
    CliError::Schema {
        path: path.to_path_buf(),
        message,
    }
}

fn check_role(path: &Path, context: Option<usize>, found: Option<Role>, allowed: &[Role]) -> Result<(), CliError> {
    match found {
        Some(role) if !allowed.contains(&role) => {
            let names: Vec<String> = allowed.iter().map(Role::to_string).collect();
            Err(schema(
                path,
                context,
                format!(
                    "declared role '{role}' is not accepted here (expected {})",
                    names.join(" or ")
                ),
            ))
        }
        _ => Ok(()),
    }
}

fn invalid(path: &Path, role: Role, source: pcsft_core::Error) -> CliError {
    CliError::Invalid {
        path: path.to_path_buf(),
        role,
        source,
    }
}

pub fn load_operator(path: &Path) -> Result<(OperatorFile, ComplexOperator), CliError> {
    let file: OperatorFile = parse(path, &read(path)?)?;
    let op = file.to_operator().map_err(|m| schema(path, None, m))?;
    Ok((file, op))
}

pub fn load_state(path: &Path) -> Result<DensityOperator, CliError> {
    let (file, op) = load_operator(path)?;
    check_role(path, None, file.role, &[Role::Density])?;
    DensityOperator::new(op).map_err(|e| invalid(path, Role::Density, e))
}

/// Loads a Hermitian operator declared (or defaulted) as `role`.
pub fn load_hermitian(path: &Path, role: Role) -> Result<ComplexOperator, CliError> {
    let (file, op) = load_operator(path)?;
    check_role(path, None, file.role, &[Role::Observable, Role::Hamiltonian])?;
    let tol = linalg::structural_tol(&op);
    let deviation = linalg::hermitian_deviation(&op);
    if deviation > tol {
        return Err(invalid(
            path,
            file.role.unwrap_or(role),
            pcsft_core::Error::NotHermitian { deviation, tol },
        ));
    }
    Ok(op)
}

/// Loads the ordered blocks of a channel file. Blocks declared as
/// projectors must be orthogonal projectors.
pub fn load_channel(path: &Path) -> Result<Vec<ComplexOperator>, CliError> {
    let files: Vec<OperatorFile> = parse(path, &read(path)?)?;
    if files.is_empty() {
        return Err(schema(path, None, "a channel needs at least one block".into()));
    }
    let mut blocks = Vec::with_capacity(files.len());
    for (k, file) in files.iter().enumerate() {
        check_role(path, Some(k), file.role, &[Role::KrausBlock, Role::Projector])?;
        let op = file.to_operator().map_err(|m| schema(path, Some(k), m))?;
        if file.role == Some(Role::Projector) {
            pcsft_core::projection_filter(&op).map_err(|e| {
                let e = match e {
                    pcsft_core::Error::NotProjector { reason, .. } => {
                        pcsft_core::Error::NotProjector { index: k, reason }
                    }
                    other => other,
                };
                invalid(path, Role::Projector, e)
            })?;
        }
        if let Some(first) = blocks.first() {
            let first: &ComplexOperator = first;
            if first.nrows() != op.nrows() {
                return Err(schema(
                    path,
                    Some(k),
                    format!(
                        "dim {} differs from the first block's dim {}",
                        op.nrows(),
                        first.nrows()
                    ),
                ));
            }
        }
        blocks.push(op);
    }
    Ok(blocks)
}

pub fn write_operator(path: &Path, file: &OperatorFile) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(file).expect("operator files serialize");
    write_text(path, &(text + "\n"))
}

pub fn write_channel(path: &Path, files: &[OperatorFile]) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(files).expect("channel files serialize");
    write_text(path, &(text + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: PathBuf::from(path),
        source,
    })
}
