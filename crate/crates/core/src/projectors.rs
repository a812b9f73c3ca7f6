//! Exchange projectors and the two-copy operator `V`.
//!
//! The two-copy space is ordered `H₁⊗H₂⊗H₁′⊗H₂′`: the copy of ρ first, the
//! copy of σ second. `P∓⁽¹⁾` acts on factors (0, 2) and `P∓⁽²⁾` on (1, 3).
//! Operators are assembled on the adjacent ordering `H₁⊗H₁′⊗H₂⊗H₂′` and moved
//! into place with [`permute_subsystems`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, permute_subsystems, tensor, tensor_vec, ComplexMatrix, SubsystemShape};
use crate::states::{BipartiteDims, DensityMatrix, PureState};

/// Reorders `H₁⊗H₁′⊗H₂⊗H₂′` into `H₁⊗H₂⊗H₁′⊗H₂′` (and back; it is an involution).
const COPY_ORDER: [usize; 4] = [0, 2, 1, 3];

/// Tolerance for the imaginary residue of expectation values.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// The two choices of `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `P₋⁽¹⁾ ⊗ (P₋⁽²⁾ − P₊⁽²⁾)`
    A,
    /// `(P₋⁽¹⁾ − P₊⁽¹⁾) ⊗ P₋⁽²⁾`
    B,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::A, Variant::B];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            other => Err(Error::Parse(format!("unknown variant '{other}' (expected A or B)"))),
        }
    }
}

/// Variant selection for the two-copy bound; `Best` takes the larger value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantChoice {
    One(Variant),
    Best,
}

impl FromStr for VariantChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best" | "Best" => Ok(VariantChoice::Best),
            other => other.parse().map(VariantChoice::One),
        }
    }
}

/// Hermitian operator on the two-copy space.
#[derive(Clone, Debug)]
pub struct CopyPairOperator {
    matrix: ComplexMatrix,
    dims: BipartiteDims,
    /// `None` for operators other than the two `V` variants.
    variant: Option<Variant>,
}

impl CopyPairOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn variant(&self) -> Option<Variant> {
        self.variant
    }
}

/// `S|i⟩|j⟩ = |j⟩|i⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

/// `P₋ = (𝟙 − S)/2`.
pub fn antisym_projector(d: usize) -> ComplexMatrix {
    (&ComplexMatrix::identity(d * d) - &swap_operator(d)).scale(0.5)
}

/// `P₊ = (𝟙 + S)/2`.
pub fn sym_projector(d: usize) -> ComplexMatrix {
    (&ComplexMatrix::identity(d * d) + &swap_operator(d)).scale(0.5)
}

fn embed(first: &ComplexMatrix, second: &ComplexMatrix, dims: BipartiteDims) -> ComplexMatrix {
    let adjacent = SubsystemShape::new(vec![dims.d1, dims.d1, dims.d2, dims.d2]).expect("valid dims");
    permute_subsystems(&tensor(first, second), &adjacent, &COPY_ORDER).expect("shape consistent by construction")
}

/// Embeds `op1 ⊗ op2`, where `op1` acts on the copy pair of subsystem 1 and
/// `op2` on the copy pair of subsystem 2, into `H₁⊗H₂⊗H₁′⊗H₂′`.
pub fn copy_pair_operator(op1: &ComplexMatrix, op2: &ComplexMatrix, dims: BipartiteDims) -> Result<CopyPairOperator> {
    let (n1, n2) = (dims.d1 * dims.d1, dims.d2 * dims.d2);
    if op1.rows() != n1 || op1.cols() != n1 || op2.rows() != n2 || op2.cols() != n2 {
        return Err(Error::Shape("copy-pair factors do not match the local dimensions".into()));
    }
    Ok(CopyPairOperator { matrix: embed(op1, op2, dims), dims, variant: None })
}

pub fn build_v(dims: BipartiteDims, variant: Variant) -> CopyPairOperator {
    let (d1, d2) = (dims.d1, dims.d2);
    let matrix = match variant {
        Variant::A => embed(&antisym_projector(d1), &(&antisym_projector(d2) - &sym_projector(d2)), dims),
        Variant::B => embed(&(&antisym_projector(d1) - &sym_projector(d1)), &antisym_projector(d2), dims),
    };
    CopyPairOperator { matrix, dims, variant: Some(variant) }
}

/// `P₋⁽¹⁾ ⊗ P₋⁽²⁾`, whose two-copy expectation defines pure-state concurrence.
pub fn antisym_pair(dims: BipartiteDims) -> CopyPairOperator {
    CopyPairOperator {
        matrix: embed(&antisym_projector(dims.d1), &antisym_projector(dims.d2), dims),
        dims,
        variant: None,
    }
}

fn real_part(z: Complex64, what: &str) -> Result<f64> {
    let scale = 1.0f64.max(z.re.abs());
    if z.im.abs() > IMAG_RESIDUE_TOL * scale {
        return Err(Error::Consistency(format!("{what} has imaginary residue {:.3e}", z.im)));
    }
    Ok(z.re)
}

/// `Tr((ρ⊗σ)·op)` evaluated entrywise, without forming `ρ⊗σ`.
pub fn two_copy_expectation(rho: &DensityMatrix, sigma: &DensityMatrix, op: &CopyPairOperator) -> Result<f64> {
    rho.dims().ensure_same(&sigma.dims())?;
    rho.dims().ensure_same(&op.dims)?;
    let z = two_copy_trace(rho.matrix(), sigma.matrix(), &op.matrix);
    real_part(z, "two-copy expectation")
}

/// `Tr((a⊗b)·op)` for square `a`, `b` of side `n` and `op` of side `n²`.
pub(crate) fn two_copy_trace(a: &ComplexMatrix, b: &ComplexMatrix, op: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let brow = b.row(j);
                let mut inner = Complex64::new(0.0, 0.0);
                for (l, bjl) in brow.iter().enumerate() {
                    // (a⊗b)[(i,j),(k,l)] · op[(k,l),(i,j)]
                    inner += bjl * op[(k * n + l, i * n + j)];
                }
                acc += aik * inner;
            }
        }
    }
    acc
}

/// `⟨ψ⊗φ|op|ψ⊗φ⟩` for (possibly subnormalized) pure states.
pub fn pure_two_copy_expectation(psi: &PureState, phi: &PureState, op: &CopyPairOperator) -> Result<f64> {
    psi.dims().ensure_same(&phi.dims())?;
    psi.dims().ensure_same(&op.dims)?;
    let v = tensor_vec(psi.amplitudes(), phi.amplitudes());
    real_part(op.matrix.sandwich(&v, &v)?, "pure two-copy expectation")
}

/// `Tr₂((𝟙⊗σ)·op)`: the partial trace over the second copy `H₁′⊗H₂′`.
pub fn trace_out_second_copy(sigma: &ComplexMatrix, op: &CopyPairOperator) -> Result<ComplexMatrix> {
    let n = op.dims.total();
    if sigma.rows() != n || sigma.cols() != n {
        return Err(Error::Shape("seed matrix does not match operator dimensions".into()));
    }
    let lifted = tensor(&ComplexMatrix::identity(n), sigma);
    let product = lifted.matmul(&op.matrix)?;
    partial_trace(&product, &op.dims.two_copy_shape(), &[2, 3])
}
