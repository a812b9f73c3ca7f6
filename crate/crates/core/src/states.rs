//! Bipartite pure and mixed states, reduced states, and seeded samplers.
//!
//! Ensemble members follow the unnormalized convention `ρ = Σᵢ |ψᵢ⟩⟨ψᵢ|`:
//! the weight of a member lives inside its vector and `norm_squared` caches it.
//!
//! Every sampler is a deterministic function of its arguments and a `u64`
//! seed. Independent streams (for restarts or batches) come from
//! [`rng_stream`].

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, orthonormalize_columns, ComplexMatrix, SubsystemShape};

/// Tolerances used when validating states.
pub const STATE_HERMITIAN_TOL: f64 = 1e-9;
pub const STATE_PSD_TOL: f64 = 1e-9;
pub const STATE_TRACE_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalues above this count toward the numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Seeded generator for stream `stream` of `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub d1: usize,
    pub d2: usize,
}

impl BipartiteDims {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 < 2 || d2 < 2 {
            return Err(Error::Domain(format!("local dimensions must be at least 2, got ({d1}, {d2})")));
        }
        Ok(Self { d1, d2 })
    }

    pub const fn qubits() -> Self {
        Self { d1: 2, d2: 2 }
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn min_dim(&self) -> usize {
        self.d1.min(self.d2)
    }

    pub fn shape(&self) -> SubsystemShape {
        SubsystemShape::new(vec![self.d1, self.d2]).expect("dims validated at construction")
    }

    /// `H₁⊗H₂⊗H₁′⊗H₂′`.
    pub fn two_copy_shape(&self) -> SubsystemShape {
        SubsystemShape::new(vec![self.d1, self.d2, self.d1, self.d2]).expect("dims validated at construction")
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!(
                "dimension mismatch: ({}, {}) vs ({}, {})",
                self.d1, self.d2, other.d1, other.d2
            )));
        }
        Ok(())
    }
}

/// Which subsystem to keep when reducing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// A (possibly subnormalized) pure state vector on `H₁⊗H₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: BipartiteDims,
    norm_squared: f64,
}

impl PureState {
    /// Wraps `amplitudes` as an ensemble member of weight `⟨ψ|ψ⟩ ∈ (0, 1]`.
    pub fn new(amplitudes: Vec<Complex64>, dims: BipartiteDims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Shape(format!(
                "{} amplitudes for dims ({}, {})",
                amplitudes.len(),
                dims.d1,
                dims.d2
            )));
        }
        let norm_squared: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_squared > 0.0) || norm_squared > 1.0 + NORM_TOL {
            return Err(Error::Validation(format!("state weight {norm_squared} is outside (0, 1]")));
        }
        Ok(Self { amplitudes, dims, norm_squared })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>, dims: BipartiteDims) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect(), dims)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn norm_squared(&self) -> f64 {
        self.norm_squared
    }

    /// `|ψ⟩⟨ψ|`, carrying the member weight as its trace.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Multiplies the amplitudes by `factor` (weights scale by `factor²`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.amplitudes.iter().map(|z| z * factor).collect(), self.dims)
    }

    /// Reduced (subnormalized) matrix on the kept side, computed directly
    /// from the coefficient matrix `Ψ[i, j] = ⟨i j|ψ⟩`.
    pub fn reduced(&self, keep: Side) -> ComplexMatrix {
        let (d1, d2) = (self.dims.d1, self.dims.d2);
        let a = &self.amplitudes;
        match keep {
            Side::First => ComplexMatrix::from_fn(d1, d1, |i, k| {
                (0..d2).map(|j| a[i * d2 + j] * a[k * d2 + j].conj()).sum()
            }),
            Side::Second => ComplexMatrix::from_fn(d2, d2, |j, l| {
                (0..d1).map(|i| a[i * d2 + j] * a[i * d2 + l].conj()).sum()
            }),
        }
    }
}

/// A validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: BipartiteDims,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: BipartiteDims) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != dims.total() {
            return Err(Error::Shape(format!(
                "{}x{} matrix for dims ({}, {})",
                matrix.rows(),
                matrix.cols(),
                dims.d1,
                dims.d2
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_HERMITIAN_TOL {
            return Err(Error::Validation(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(Error::Validation(format!("density matrix trace is {:.12} + {:.3e}i", tr.re, tr.im)));
        }
        let eig = eig_hermitian(&matrix, STATE_HERMITIAN_TOL)?;
        if eig.values[0] < -STATE_PSD_TOL {
            return Err(Error::Validation(format!(
                "density matrix not positive semidefinite (min eigenvalue {:.3e})",
                eig.values[0]
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: psi.projector().scale(1.0 / psi.norm_squared()), dims: psi.dims() }
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.total();
        Self { matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64), dims }
    }

    /// Normalizes a positive semidefinite matrix by its trace and validates it.
    pub fn from_unnormalized(matrix: ComplexMatrix, dims: BipartiteDims) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::Validation("matrix has non-positive trace".into()));
        }
        Self::new(matrix.scale(1.0 / tr), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).expect("square").re
    }

    pub fn reduced(&self, keep: Side) -> ComplexMatrix {
        reduced_matrix(&self.matrix, self.dims, keep)
    }

    /// Conjugates by a unitary on `H₁⊗H₂`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self { matrix: m.hermitian_part(), dims: self.dims })
    }

    /// Eigenvalues above [`RANK_THRESHOLD`].
    pub fn rank(&self) -> usize {
        eig_hermitian(&self.matrix, STATE_HERMITIAN_TOL)
            .map(|e| e.values.iter().filter(|&&l| l > RANK_THRESHOLD).count())
            .unwrap_or(0)
    }

    /// Spectral ensemble `{√λⱼ |χⱼ⟩}` ordered by descending eigenvalue, with
    /// each eigenvector's first non-negligible component made real positive.
    pub fn eigen_ensemble(&self) -> Ensemble {
        let eig = eig_hermitian(&self.matrix, STATE_HERMITIAN_TOL).expect("validated density matrix");
        let n = eig.values.len();
        let mut members = Vec::new();
        for k in (0..n).rev() {
            let lambda = eig.values[k];
            if lambda <= RANK_THRESHOLD {
                continue;
            }
            let mut v = eig.vector(k);
            if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12).copied() {
                let phase = pivot.conj() / pivot.norm();
                v.iter_mut().for_each(|z| *z *= phase);
            }
            let s = lambda.sqrt();
            let amps = v.into_iter().map(|z| z * s).collect();
            members.push(PureState { amplitudes: amps, dims: self.dims, norm_squared: lambda });
        }
        for m in members.iter_mut() {
            m.norm_squared = m.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        }
        Ensemble { members, dims: self.dims }
    }
}

/// Reduced matrix of an operator on `H₁⊗H₂`, keeping one side.
pub fn reduced_matrix(m: &ComplexMatrix, dims: BipartiteDims, keep: Side) -> ComplexMatrix {
    let traced = match keep {
        Side::First => [1],
        Side::Second => [0],
    };
    linalg::partial_trace(m, &dims.shape(), &traced).expect("operator shape matches dims")
}

/// A pure-state decomposition `ρ = Σᵢ |ψᵢ⟩⟨ψᵢ|`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<PureState>,
    dims: BipartiteDims,
}

impl Ensemble {
    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(PureState::norm_squared).sum()
    }

    /// `Σᵢ |ψᵢ⟩⟨ψᵢ|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dims.total();
        self.members.iter().fold(ComplexMatrix::zeros(n, n), |acc, m| &acc + &m.projector())
    }

    /// Mixes the spectral ensemble through the isometry `isometry` (size × rank):
    /// `|ψᵢ⟩ = Σⱼ M[i,j] √λⱼ |χⱼ⟩`. Members of exactly zero weight are dropped.
    pub fn from_isometry(spectral: &Ensemble, isometry: &ComplexMatrix) -> Result<Self> {
        let rank = spectral.len();
        if isometry.cols() != rank {
            return Err(Error::Shape(format!(
                "isometry has {} columns for an ensemble of rank {rank}",
                isometry.cols()
            )));
        }
        let n = spectral.dims.total();
        let mut members = Vec::with_capacity(isometry.rows());
        for i in 0..isometry.rows() {
            let mut amps = vec![ZERO; n];
            for (j, chi) in spectral.members.iter().enumerate() {
                let mij = isometry[(i, j)];
                for (a, c) in amps.iter_mut().zip(chi.amplitudes()) {
                    *a += mij * c;
                }
            }
            let w: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if w > 0.0 {
                members.push(PureState { amplitudes: amps, dims: spectral.dims, norm_squared: w });
            }
        }
        Ok(Self { members, dims: spectral.dims })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

pub fn bell_state(kind: BellKind) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (i, j, sign) = match kind {
        BellKind::PhiPlus => (0, 3, 1.0),
        BellKind::PhiMinus => (0, 3, -1.0),
        BellKind::PsiPlus => (1, 2, 1.0),
        BellKind::PsiMinus => (1, 2, -1.0),
    };
    let mut amps = vec![ZERO; 4];
    amps[i] = Complex64::new(s, 0.0);
    amps[j] = Complex64::new(sign * s, 0.0);
    PureState { amplitudes: amps, dims: BipartiteDims::qubits(), norm_squared: 1.0 }
}

/// `Σ_{k<d} (−1)^k |k⟩|d−1−k⟩ / √d` with `d = min(d1, d2)`; the singlet for two qubits.
pub fn canonical_entangled(dims: BipartiteDims) -> PureState {
    let d = dims.min_dim();
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = vec![ZERO; dims.total()];
    for k in 0..d {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        amps[k * dims.d2 + (d - 1 - k)] = Complex64::new(sign * s, 0.0);
    }
    PureState::normalized(amps, dims).expect("nonzero vector")
}

/// `Σ_{k<d} |k⟩|k⟩ / √d` with `d = min(d1, d2)`.
pub fn max_entangled_phi(dims: BipartiteDims) -> PureState {
    let d = dims.min_dim();
    let mut amps = vec![ZERO; dims.total()];
    for k in 0..d {
        amps[k * dims.d2 + k] = Complex64::new(1.0, 0.0);
    }
    PureState::normalized(amps, dims).expect("nonzero vector")
}

/// `p·|Ψ⁻⟩⟨Ψ⁻| + (1−p)·𝟙/4`.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("Werner parameter p = {p} outside [0, 1]")));
    }
    let singlet = bell_state(BellKind::PsiMinus).projector();
    let m = &singlet.scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
    DensityMatrix::new(m, BipartiteDims::qubits())
}

/// `p·|Φ⁺_d⟩⟨Φ⁺_d| + (1−p)·𝟙/d²` on `d × d`.
pub fn isotropic_state(d: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("isotropic parameter p = {p} outside [0, 1]")));
    }
    let dims = BipartiteDims::new(d, d)?;
    let phi = max_entangled_phi(dims).projector();
    let n = dims.total();
    let m = &phi.scale(p) + &ComplexMatrix::identity(n).scale((1.0 - p) / n as f64);
    DensityMatrix::new(m, dims)
}

/// Product of two local unit vectors.
pub fn product_state(a: &[Complex64], b: &[Complex64]) -> Result<PureState> {
    let dims = BipartiteDims::new(a.len(), b.len())?;
    PureState::normalized(linalg::tensor_vec(a, b), dims)
}

pub(crate) fn haar_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random unit vector on `H₁⊗H₂`.
pub fn random_pure(dims: BipartiteDims, seed: u64) -> PureState {
    random_pure_with(dims, &mut rng_stream(seed, 0))
}

pub fn random_pure_with<R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> PureState {
    let amps = haar_vector(rng, dims.total());
    PureState::normalized(amps, dims).expect("unit vector")
}

/// `GG†/Tr(GG†)` with `G` a `(d1·d2) × rank` complex Gaussian matrix.
pub fn random_density(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dims, rank, &mut rng_stream(seed, 0))
}

pub fn random_density_with<R: Rng + ?Sized>(dims: BipartiteDims, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(Error::Domain(format!("rank {rank} outside 1..={n}")));
    }
    let g = ginibre(rng, n, rank);
    let m = (&g * &g.adjoint()).hermitian_part();
    DensityMatrix::from_unnormalized(m, dims)
}

/// `Σₖ wₖ |aₖ⟩⟨aₖ| ⊗ |bₖ⟩⟨bₖ|` with Haar local vectors and flat-Dirichlet weights.
pub fn random_separable(dims: BipartiteDims, terms: usize, seed: u64) -> Result<DensityMatrix> {
    random_separable_with(dims, terms, &mut rng_stream(seed, 0))
}

pub fn random_separable_with<R: Rng + ?Sized>(dims: BipartiteDims, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::Domain("a separable mixture needs at least one term".into()));
    }
    let raw: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let n = dims.total();
    let mut m = ComplexMatrix::zeros(n, n);
    for w in raw {
        let a = haar_vector(rng, dims.d1);
        let b = haar_vector(rng, dims.d2);
        let ab = linalg::tensor_vec(&a, &b);
        m = &m + &ComplexMatrix::outer(&ab, &ab).scale(w / total);
    }
    DensityMatrix::from_unnormalized(m.hermitian_part(), dims)
}

/// Haar-random unitary on `C^d`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        if let Ok(u) = orthonormalize_columns(&ginibre(rng, d, d)) {
            return u;
        }
    }
}

/// Haar-random isometry with orthonormal columns (`rows ≥ cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        if let Ok(m) = orthonormalize_columns(&ginibre(rng, rows, cols)) {
            return m;
        }
    }
}

/// `U₁⊗U₂` with both factors Haar-random.
pub fn random_local_unitary(dims: BipartiteDims, seed: u64) -> ComplexMatrix {
    random_local_unitary_with(dims, &mut rng_stream(seed, 0))
}

pub fn random_local_unitary_with<R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> ComplexMatrix {
    let u1 = random_unitary(dims.d1, rng);
    let u2 = random_unitary(dims.d2, rng);
    linalg::tensor(&u1, &u2)
}

/// Random decomposition of `rho` into `size` subnormalized pure states.
pub fn random_decomposition(rho: &DensityMatrix, size: usize, seed: u64) -> Result<Ensemble> {
    random_decomposition_with(rho, size, &mut rng_stream(seed, 0))
}

pub fn random_decomposition_with<R: Rng + ?Sized>(rho: &DensityMatrix, size: usize, rng: &mut R) -> Result<Ensemble> {
    let spectral = rho.eigen_ensemble();
    let rank = spectral.len();
    if size < rank {
        return Err(Error::Domain(format!("ensemble size {size} is below the rank {rank}")));
    }
    let m = random_isometry(size, rank, rng);
    Ensemble::from_isometry(&spectral, &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eye_half() -> ComplexMatrix {
        ComplexMatrix::identity(2).scale(0.5)
    }

    #[test]
    fn bell_vectors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = bell_state(BellKind::PsiMinus);
        assert_eq!(psi.amplitudes()[1].re, s);
        assert_eq!(psi.amplitudes()[2].re, -s);
        let phi = bell_state(BellKind::PhiPlus);
        assert_eq!(phi.amplitudes()[0].re, s);
        assert_eq!(phi.amplitudes()[3].re, s);
        for kind in [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus] {
            let b = bell_state(kind);
            assert!((b.norm_squared() - 1.0).abs() < 1e-15);
            for side in [Side::First, Side::Second] {
                assert!(b.reduced(side).max_abs_diff(&eye_half()) < 1e-15);
                let rho = DensityMatrix::from_pure(&b);
                assert!(rho.reduced(side).max_abs_diff(&eye_half()) < 1e-15);
            }
        }
    }

    #[test]
    fn canonical_seed_is_singlet_for_qubits() {
        let c = canonical_entangled(BipartiteDims::qubits());
        assert_eq!(c.amplitudes(), bell_state(BellKind::PsiMinus).amplitudes());
    }

    #[test]
    fn werner_endpoints() {
        let w0 = werner_state(0.0).unwrap();
        assert!(w0.matrix().max_abs_diff(DensityMatrix::maximally_mixed(BipartiteDims::qubits()).matrix()) < 1e-15);
        let w1 = werner_state(1.0).unwrap();
        assert!(w1.matrix().max_abs_diff(&bell_state(BellKind::PsiMinus).projector()) < 1e-15);
        assert!(matches!(werner_state(1.2), Err(Error::Domain(_))));
        assert!(matches!(werner_state(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn random_pure_is_normalized_and_deterministic() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        let a = random_pure(dims, 42);
        let b = random_pure(dims, 42);
        assert_eq!(a, b);
        assert!((a.norm_squared() - 1.0).abs() < 1e-12);
        assert_ne!(a, random_pure(dims, 43));
    }

    #[test]
    fn haar_first_moment() {
        // E|⟨e₀|ψ⟩|² = 1/(d1·d2)
        let dims = BipartiteDims::qubits();
        let mut rng = rng_stream(7, 0);
        let n = 10_000;
        let mean: f64 = (0..n).map(|_| random_pure_with(dims, &mut rng).amplitudes()[0].norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() < 0.02, "mean = {mean}");
    }

    #[test]
    fn random_density_rank_and_validity() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let r1 = random_density(dims, 1, 1).unwrap();
        assert!((r1.purity() - 1.0).abs() < 1e-10);
        assert_eq!(random_density(dims, 6, 5).unwrap(), random_density(dims, 6, 5).unwrap());
        assert!(random_density(dims, 7, 1).is_err());
        assert!(random_density(dims, 0, 1).is_err());
        let mut rng = rng_stream(3, 0);
        for _ in 0..100 {
            let rho = random_density_with(dims, 3, &mut rng).unwrap();
            let e = eig_hermitian(rho.matrix(), 1e-9).unwrap();
            assert!(e.values[0] >= -1e-12);
            assert_eq!(rho.rank(), 3);
        }
    }

    #[test]
    fn separable_single_term_is_pure_product() {
        let dims = BipartiteDims::qubits();
        let rho = random_separable(dims, 1, 9).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let red = rho.reduced(Side::First);
        let purity = red.trace_product(&red).unwrap().re;
        assert!((purity - 1.0).abs() < 1e-12);
        assert!(random_separable(dims, 0, 9).is_err());
    }

    #[test]
    fn local_unitary_is_unitary_and_preserves_spectrum() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let u = random_local_unitary(dims, 4);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-10);
        let rho = random_density(dims, 4, 2).unwrap();
        let rho_u = rho.conjugated(&u).unwrap();
        let e1 = eig_hermitian(rho.matrix(), 1e-9).unwrap().values;
        let e2 = eig_hermitian(rho_u.matrix(), 1e-9).unwrap().values;
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn reduced_of_product_and_singlet() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let ra = random_density(BipartiteDims::new(2, 2).unwrap(), 4, 1).unwrap().reduced(Side::First);
        let rb = random_density(BipartiteDims::new(3, 3).unwrap(), 9, 2).unwrap().reduced(Side::First);
        let prod = DensityMatrix::new(linalg::tensor(&ra, &rb), dims).unwrap();
        assert!(prod.reduced(Side::First).max_abs_diff(&ra) < 1e-12);
        assert!(prod.reduced(Side::Second).max_abs_diff(&rb) < 1e-12);
        let singlet = bell_state(BellKind::PsiMinus).reduced(Side::Second);
        assert!(singlet.max_abs_diff(&eye_half()) < 1e-15);
        assert!((singlet.trace_product(&singlet).unwrap().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_reduced_matches_partial_trace() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let psi = random_pure(dims, 11);
        for side in [Side::First, Side::Second] {
            let direct = psi.reduced(side);
            let via_pt = reduced_matrix(&psi.projector(), dims, side);
            assert!(direct.max_abs_diff(&via_pt) < 1e-14);
            assert!((direct.trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_isometry_gives_eigen_ensemble() {
        let rho = random_density(BipartiteDims::qubits(), 3, 8).unwrap();
        let spectral = rho.eigen_ensemble();
        let same = Ensemble::from_isometry(&spectral, &ComplexMatrix::identity(3)).unwrap();
        for (a, b) in spectral.members().iter().zip(same.members()) {
            assert_eq!(a.amplitudes(), b.amplitudes());
        }
        let w: Vec<f64> = spectral.members().iter().map(PureState::norm_squared).collect();
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn decomposition_of_pure_state_is_proportional() {
        let bell = DensityMatrix::from_pure(&bell_state(BellKind::PhiPlus));
        let ens = random_decomposition(&bell, 4, 3).unwrap();
        let b = bell_state(BellKind::PhiPlus);
        for m in ens.members() {
            let overlap: Complex64 = m.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| y.conj() * x).sum();
            assert!((overlap.norm_sqr() - m.norm_squared()).abs() < 1e-12);
        }
    }

    #[test]
    fn decompositions_reconstruct() {
        let mut rng = rng_stream(12, 0);
        for k in 0..100 {
            let dims = if k % 2 == 0 { BipartiteDims::qubits() } else { BipartiteDims::new(2, 3).unwrap() };
            let rank = 1 + k % dims.total();
            let rho = random_density_with(dims, rank, &mut rng).unwrap();
            let size = rank + k % 3;
            let ens = random_decomposition_with(&rho, size, &mut rng).unwrap();
            assert!(ens.reconstruct().max_abs_diff(rho.matrix()) < 1e-9);
            assert!((ens.total_weight() - 1.0).abs() < 1e-9);
        }
        let rho = random_density(BipartiteDims::qubits(), 3, 0).unwrap();
        assert!(matches!(random_decomposition(&rho, 2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn density_validation_errors() {
        let dims = BipartiteDims::qubits();
        assert!(matches!(DensityMatrix::new(ComplexMatrix::identity(4), dims), Err(Error::Validation(_))));
        let neg = ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0]);
        assert!(matches!(DensityMatrix::new(neg, dims), Err(Error::Validation(_))));
        assert!(matches!(DensityMatrix::new(ComplexMatrix::identity(3), dims), Err(Error::Shape(_))));
        assert!(BipartiteDims::new(1, 2).is_err());
    }
}
