//! JSON file formats for states and witnesses.
//!
//! Complex numbers are `[re, im]` pairs. Vectors are flat lists, matrices
//! are lists of rows:
//!
//! ```json
//! {"dims": [2, 2], "kind": "pure",  "data": [[0, 0], [0.7071, 0], [-0.7071, 0], [0, 0]]}
//! {"dims": [2, 2], "kind": "mixed", "data": [[[0.25, 0], ...], ...]}
//! {"dims": [2, 2], "variant": "A", "c_seed": 1.0, "operator": [[[1, 0], ...], ...], "seed": {...}}
//! ```
//!
//! Floats are written in shortest round-trip form, so a file survives any
//! number of read/write cycles unchanged.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::projectors::Variant;
use crate::states::{BipartiteDims, DensityMatrix, PureState};
use crate::witness::{Seed, Witness};

/// Pure state files must be normalized to this tolerance.
pub const FILE_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub kind: StateKind,
    pub data: Value,
}

/// A state read from (or destined for) a state file.
#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateData {
    pub fn dims(&self) -> BipartiteDims {
        match self {
            StateData::Pure(p) => p.dims(),
            StateData::Mixed(m) => m.dims(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            StateData::Pure(p) => DensityMatrix::from_pure(p),
            StateData::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StateData::Pure(p) => Some(p),
            StateData::Mixed(_) => None,
        }
    }

    pub fn to_file(&self) -> StateFile {
        let d = self.dims();
        let (kind, data) = match self {
            StateData::Pure(p) => (StateKind::Pure, serde_json::to_value(p.amplitudes()).expect("serializable")),
            StateData::Mixed(m) => (StateKind::Mixed, matrix_to_value(m.matrix())),
        };
        StateFile { dims: [d.d1, d.d2], kind, data }
    }

    pub fn from_file(file: StateFile) -> Result<Self> {
        let dims = BipartiteDims::new(file.dims[0], file.dims[1])?;
        match file.kind {
            StateKind::Pure => {
                let amps: Vec<Complex64> = serde_json::from_value(file.data)?;
                let psi = PureState::new(amps, dims)?;
                if (psi.norm_squared() - 1.0).abs() > FILE_NORM_TOL {
                    return Err(Error::Validation(format!(
                        "pure state is not normalized (norm² = {})",
                        psi.norm_squared()
                    )));
                }
                Ok(StateData::Pure(psi))
            }
            StateKind::Mixed => {
                let m = matrix_from_value(file.data)?;
                Ok(StateData::Mixed(DensityMatrix::new(m, dims)?))
            }
        }
    }
}

fn matrix_to_value(m: &ComplexMatrix) -> Value {
    let rows: Vec<&[Complex64]> = (0..m.rows()).map(|r| m.row(r)).collect();
    serde_json::to_value(rows).expect("serializable")
}

fn matrix_from_value(v: Value) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = serde_json::from_value(v)?;
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape("ragged matrix rows".into()));
    }
    ComplexMatrix::from_row_major(n, cols, rows.into_iter().flatten().collect())
}

pub fn state_to_json(state: &StateData) -> String {
    serde_json::to_string(&state.to_file()).expect("serializable")
}

pub fn state_from_json(text: &str) -> Result<StateData> {
    StateData::from_file(serde_json::from_str(text)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    pub dims: [usize; 2],
    pub variant: Variant,
    pub c_seed: f64,
    pub operator: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<StateFile>,
    #[serde(default)]
    pub seed_is_pure: bool,
}

pub fn witness_to_file(w: &Witness) -> WitnessFile {
    let seed = match w.seed() {
        Seed::Pure(p) => Some(StateData::Pure(p.clone()).to_file()),
        Seed::Mixed(m) => Some(StateData::Mixed(m.clone()).to_file()),
        Seed::Unrecorded => None,
    };
    WitnessFile {
        dims: [w.dims().d1, w.dims().d2],
        variant: w.variant(),
        c_seed: w.c_seed(),
        operator: matrix_to_value(w.operator()),
        seed,
        seed_is_pure: w.seed_is_pure(),
    }
}

pub fn witness_from_file(file: WitnessFile) -> Result<Witness> {
    let dims = BipartiteDims::new(file.dims[0], file.dims[1])?;
    let operator = matrix_from_value(file.operator)?;
    let seed = match file.seed {
        Some(s) => match StateData::from_file(s)? {
            StateData::Pure(p) => Seed::Pure(p),
            StateData::Mixed(m) => Seed::Mixed(m),
        },
        None => Seed::Unrecorded,
    };
    Witness::from_parts(operator, dims, file.variant, file.c_seed, seed)
}

pub fn witness_to_json(w: &Witness) -> String {
    serde_json::to_string(&witness_to_file(w)).expect("serializable")
}

pub fn witness_from_json(text: &str) -> Result<Witness> {
    witness_from_file(serde_json::from_str(text)?)
}
