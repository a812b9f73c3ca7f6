//! Concurrence witnesses `W_σ = −4·Tr₂((𝟙⊗σ)V)/c(σ)` and the single-copy
//! bound `c(ρ) ≥ −Tr(ρ·W_σ)`.
//!
//! The partial trace has a closed form through the seed's reductions:
//!
//! * variant A: `W = 2(𝟙⊗σ₂ − σ)/c`, with `σ₂ = Tr₁ σ`,
//! * variant B: `W = 2(σ₁⊗𝟙 − σ)/c`, with `σ₁ = Tr₂ σ`.
//!
//! Construction always evaluates both the closed form and the defining
//! partial trace and refuses to return a witness if they disagree.
//!
//! `c` may be any upper bound on `c(σ)`: dividing by an over-estimate only
//! weakens the bound. For pure seeds it is computed exactly; mixed seeds
//! need a caller-supplied certificate (e.g. from
//! [`convex_roof_estimate`](crate::concurrence::convex_roof_estimate)).

use serde::{Deserialize, Serialize};

use crate::concurrence::pure_concurrence_value;
use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix};
use crate::projectors::{build_v, trace_out_second_copy, Variant, IMAG_RESIDUE_TOL};
use crate::states::{self, BipartiteDims, DensityMatrix, PureState, Side};

/// Witnesses must be Hermitian to this tolerance.
pub const WITNESS_HERMITIAN_TOL: f64 = 1e-10;
/// Closed form and defining expression may differ by at most this much.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Seeds with concurrence at or below this are rejected.
pub const MIN_SEED_CONCURRENCE: f64 = 1e-12;
/// Expectations below `−SEPARABLE_TOL` on a separable state count as violations.
pub const SEPARABLE_TOL: f64 = 1e-9;

/// The state a witness was built from.
#[derive(Clone, Debug, PartialEq)]
pub enum Seed {
    Pure(PureState),
    Mixed(DensityMatrix),
    /// Provenance not recorded (e.g. a witness loaded from a bare operator file).
    Unrecorded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    operator: ComplexMatrix,
    dims: BipartiteDims,
    variant: Variant,
    c_seed: f64,
    seed: Seed,
}

impl Witness {
    /// Reassembles a witness from stored parts, re-validating its invariants.
    pub fn from_parts(operator: ComplexMatrix, dims: BipartiteDims, variant: Variant, c_seed: f64, seed: Seed) -> Result<Self> {
        if !(c_seed > 0.0) || !c_seed.is_finite() {
            return Err(Error::Domain(format!("seed concurrence bound must be positive, got {c_seed}")));
        }
        if !operator.is_square() || operator.rows() != dims.total() {
            return Err(Error::Shape("witness operator does not match its dims".into()));
        }
        let defect = operator.hermiticity_defect();
        if defect > WITNESS_HERMITIAN_TOL {
            return Err(Error::Validation(format!("witness is not Hermitian (defect {defect:.3e})")));
        }
        Ok(Self { operator, dims, variant, c_seed, seed })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn c_seed(&self) -> f64 {
        self.c_seed
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn seed_is_pure(&self) -> bool {
        matches!(self.seed, Seed::Pure(_))
    }
}

/// `σ − 𝟙⊗σ₂` (variant A) or `σ − σ₁⊗𝟙` (variant B); equals `2·Tr₂((𝟙⊗σ)V)`.
pub(crate) fn closed_form_numerator(sigma: &ComplexMatrix, dims: BipartiteDims, variant: Variant) -> ComplexMatrix {
    let lifted = match variant {
        Variant::A => tensor(&ComplexMatrix::identity(dims.d1), &states::reduced_matrix(sigma, dims, Side::Second)),
        Variant::B => tensor(&states::reduced_matrix(sigma, dims, Side::First), &ComplexMatrix::identity(dims.d2)),
    };
    sigma - &lifted
}

fn build(sigma: &DensityMatrix, c_seed: f64, variant: Variant, seed: Seed) -> Result<Witness> {
    if !(c_seed > 0.0) || !c_seed.is_finite() {
        return Err(Error::Domain(format!("seed concurrence bound must be positive, got {c_seed}")));
    }
    let dims = sigma.dims();
    let closed = closed_form_numerator(sigma.matrix(), dims, variant).scale(-2.0 / c_seed);
    let defining = trace_out_second_copy(sigma.matrix(), &build_v(dims, variant))?.scale(-4.0);
    let mismatch = closed.scale(c_seed).max_abs_diff(&defining);
    if mismatch > CONSISTENCY_TOL {
        return Err(Error::Consistency(format!(
            "closed-form witness deviates from the partial-trace definition by {mismatch:.3e}"
        )));
    }
    Witness::from_parts(closed.hermitian_part(), dims, variant, c_seed, seed)
}

/// Builds `W_σ` with `c_seed ≥ c(σ)` as the normalization.
///
/// For rank-one σ the certificate is checked against the exact pure-state
/// concurrence; for mixed σ it is the caller's responsibility.
pub fn build_witness(sigma: &DensityMatrix, c_seed: f64, variant: Variant) -> Result<Witness> {
    if sigma.rank() == 1 {
        let phi = sigma.eigen_ensemble().members()[0].clone();
        let c = pure_concurrence_value(&phi);
        if c <= MIN_SEED_CONCURRENCE {
            return Err(Error::Domain(format!("pure seed has vanishing concurrence ({c:.3e})")));
        }
        if c_seed < c - MIN_SEED_CONCURRENCE {
            return Err(Error::Domain(format!("c_seed = {c_seed} is below the seed's concurrence {c}")));
        }
        let phi = PureState::normalized(phi.amplitudes().to_vec(), phi.dims())?;
        return build(sigma, c_seed, variant, Seed::Pure(phi));
    }
    build(sigma, c_seed, variant, Seed::Mixed(sigma.clone()))
}

/// `W_φ` for a pure seed, normalized by its exact concurrence.
pub fn witness_from_pure(phi: &PureState, variant: Variant) -> Result<Witness> {
    let phi = PureState::normalized(phi.amplitudes().to_vec(), phi.dims())?;
    let c = pure_concurrence_value(&phi);
    if c <= MIN_SEED_CONCURRENCE {
        return Err(Error::Domain(format!(
            "seed concurrence {c:.3e} vanishes; a product seed does not define a witness"
        )));
    }
    let sigma = DensityMatrix::from_pure(&phi);
    build(&sigma, c, variant, Seed::Pure(phi))
}

/// `−Tr(ρ·W)`; a lower bound on `c(ρ)`, reported unclamped.
pub fn witness_bound(rho: &DensityMatrix, w: &Witness) -> Result<f64> {
    rho.dims().ensure_same(&w.dims)?;
    let z = rho.matrix().trace_product(&w.operator)?;
    if z.im.abs() > IMAG_RESIDUE_TOL * 1.0f64.max(z.re.abs()) {
        return Err(Error::Consistency(format!("witness expectation has imaginary residue {:.3e}", z.im)));
    }
    Ok(-z.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableCheck {
    pub samples: usize,
    pub min_expectation: f64,
    /// Samples with `Tr(ρW) < −1e−9`.
    pub violations: usize,
}

/// Evaluates `Tr(ρW)` on `samples` random separable states (mixtures of one
/// to four product terms).
pub fn verify_witness_on_separable(w: &Witness, samples: usize, seed: u64) -> Result<SeparableCheck> {
    verify_on_separable_with_terms(w, samples, seed, 4)
}

pub(crate) fn verify_on_separable_with_terms(w: &Witness, samples: usize, seed: u64, max_terms: usize) -> Result<SeparableCheck> {
    let mut rng = states::rng_stream(seed, 0);
    let mut min_expectation = f64::INFINITY;
    let mut violations = 0;
    for k in 0..samples {
        let rho = states::random_separable_with(w.dims, 1 + k % max_terms.max(1), &mut rng)?;
        let e = -witness_bound(&rho, w)?;
        min_expectation = min_expectation.min(e);
        if e < -SEPARABLE_TOL {
            violations += 1;
        }
    }
    Ok(SeparableCheck { samples, min_expectation, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projectors::{build_v, two_copy_expectation};
    use crate::states::{bell_state, random_density_with, rng_stream, werner_state, BellKind};
    use num_complex::Complex64;

    fn singlet_witness_operator() -> ComplexMatrix {
        &ComplexMatrix::identity(4) - &bell_state(BellKind::PsiMinus).projector().scale(2.0)
    }

    #[test]
    fn singlet_seed_both_variants() {
        let sigma = DensityMatrix::from_pure(&bell_state(BellKind::PsiMinus));
        let wa = build_witness(&sigma, 1.0, Variant::A).unwrap();
        let wb = build_witness(&sigma, 1.0, Variant::B).unwrap();
        assert!(wa.operator().max_abs_diff(&singlet_witness_operator()) < 1e-14);
        assert!(wa.operator().max_abs_diff(wb.operator()) < 1e-14);
        assert!(wa.seed_is_pure());
    }

    #[test]
    fn witness_from_pure_examples() {
        let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A).unwrap();
        assert!(w.operator().max_abs_diff(&singlet_witness_operator()) < 1e-14);
        let amps = vec![
            Complex64::new(0.9f64.sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.1f64.sqrt(), 0.0),
        ];
        let phi = PureState::new(amps, BipartiteDims::qubits()).unwrap();
        let w = witness_from_pure(&phi, Variant::A).unwrap();
        assert!((w.c_seed() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn near_product_seed_is_rejected() {
        let eps: f64 = 5e-16;
        let amps = vec![
            Complex64::new((1.0 - eps * eps).sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(eps, 0.0),
        ];
        // c = 2·eps·√(1−eps²) ≈ 1e−15
        let phi = PureState::new(amps, BipartiteDims::qubits()).unwrap();
        assert!(matches!(witness_from_pure(&phi, Variant::A), Err(Error::Domain(_))));
        let product = DensityMatrix::from_pure(&states::product_state(
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        ).unwrap());
        assert!(matches!(build_witness(&product, 1.0, Variant::A), Err(Error::Domain(_))));
    }

    #[test]
    fn nonpositive_c_seed_is_rejected() {
        let sigma = states::random_density(BipartiteDims::qubits(), 3, 1).unwrap();
        assert!(matches!(build_witness(&sigma, 0.0, Variant::A), Err(Error::Domain(_))));
        assert!(matches!(build_witness(&sigma, -1.0, Variant::B), Err(Error::Domain(_))));
    }

    #[test]
    fn pure_seed_certificate_below_concurrence_is_rejected() {
        let sigma = DensityMatrix::from_pure(&bell_state(BellKind::PhiPlus));
        assert!(matches!(build_witness(&sigma, 0.5, Variant::A), Err(Error::Domain(_))));
    }

    #[test]
    fn werner_and_maximally_mixed_bounds() {
        let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A).unwrap();
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let rho = werner_state(p).unwrap();
            assert!((witness_bound(&rho, &w).unwrap() - (3.0 * p - 1.0) / 2.0).abs() < 1e-12);
        }
        let mm = DensityMatrix::maximally_mixed(BipartiteDims::qubits());
        assert!((witness_bound(&mm, &w).unwrap() + 0.5).abs() < 1e-14);
        let bell = DensityMatrix::from_pure(&bell_state(BellKind::PsiMinus));
        assert!((witness_bound(&bell, &w).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_identity() {
        let mut rng = rng_stream(201, 0);
        for dims in [BipartiteDims::qubits(), BipartiteDims::new(2, 3).unwrap()] {
            for _ in 0..20 {
                let sigma = random_density_with(dims, dims.total(), &mut rng).unwrap();
                for variant in Variant::ALL {
                    let lhs = trace_out_second_copy(sigma.matrix(), &build_v(dims, variant)).unwrap();
                    let rhs = closed_form_numerator(sigma.matrix(), dims, variant).scale(0.5);
                    assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn route_equivalence_and_c_seed_scaling() {
        let mut rng = rng_stream(202, 0);
        let dims = BipartiteDims::new(2, 3).unwrap();
        for _ in 0..20 {
            let rho = random_density_with(dims, 4, &mut rng).unwrap();
            let sigma = random_density_with(dims, 2, &mut rng).unwrap();
            for variant in Variant::ALL {
                let c = 0.7;
                let w = build_witness(&sigma, c, variant).unwrap();
                let direct = witness_bound(&rho, &w).unwrap();
                let two_copy = 4.0 * two_copy_expectation(&rho, &sigma, &build_v(dims, variant)).unwrap() / c;
                assert!((direct - two_copy).abs() <= 1e-10);
                for k in [1.0, 2.0, 7.5] {
                    let wk = build_witness(&sigma, k * c, variant).unwrap();
                    assert!((witness_bound(&rho, &wk).unwrap() - direct / k).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn dims_mismatch() {
        let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A).unwrap();
        let rho = DensityMatrix::maximally_mixed(BipartiteDims::new(2, 3).unwrap());
        assert!(matches!(witness_bound(&rho, &w), Err(Error::Shape(_))));
    }

    #[test]
    fn separable_verification() {
        let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A).unwrap();
        let check = verify_witness_on_separable(&w, 1000, 4).unwrap();
        assert_eq!(check.violations, 0);
        let products = verify_on_separable_with_terms(&w, 300, 5, 1).unwrap();
        assert!(products.min_expectation >= -1e-9);
        let scaled = Witness::from_parts(w.operator().scale(3.5), w.dims(), w.variant(), w.c_seed(), Seed::Unrecorded).unwrap();
        assert_eq!(verify_witness_on_separable(&scaled, 1000, 4).unwrap().violations, check.violations);
    }
}
