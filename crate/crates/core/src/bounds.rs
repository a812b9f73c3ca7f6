//! Evaluation and aggregation of the concurrence bounds.
//!
//! The two-copy bound constrains `c²`; cross-state and witness bounds
//! constrain `c`. [`BoundReport`] puts everything on the scale of `c`
//! (clamped square root for the two-copy values) while keeping raw values.
//! Negative bounds are legitimate results that carry no information; they
//! are reported, flagged, and clamped to zero only in the `clamped` fields.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::concurrence::{
    convex_roof_estimate, ensemble_concurrence, pure_concurrence_value, wootters_concurrence, ConcurrenceValue,
    RoofOptions,
};
use crate::error::{Error, Result};
use crate::projectors::{build_v, pure_two_copy_expectation, two_copy_expectation, Variant, VariantChoice};
use crate::states::{self, BipartiteDims, DensityMatrix, PureState};
use crate::witness::{witness_bound, witness_from_pure};

/// Two-copy values below this are treated as zero before taking the square
/// root, so rounding noise on product states is not amplified to ~1e−8.
pub const SQRT_NOISE_FLOOR: f64 = 1e-12;
/// Slack for the ensemble inequality and the pure-pair residual.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Default tolerance for the "tight" flag.
pub const TIGHT_TOL: f64 = 1e-9;

/// `4·Tr((ρ⊗ρ)V)`, a lower bound on `c(ρ)²`. `Best` is the larger variant.
pub fn two_copy_bound(rho: &DensityMatrix, choice: VariantChoice) -> Result<f64> {
    let eval = |v: Variant| -> Result<f64> { Ok(4.0 * two_copy_expectation(rho, rho, &build_v(rho.dims(), v))?) };
    match choice {
        VariantChoice::One(v) => eval(v),
        VariantChoice::Best => Ok(eval(Variant::A)?.max(eval(Variant::B)?)),
    }
}

/// Clamped square root of a bound on `c²`.
pub fn c_from_c_squared(bound: f64) -> f64 {
    if bound > SQRT_NOISE_FLOOR {
        bound.sqrt()
    } else {
        0.0
    }
}

/// `c(ψ)c(φ) − 4⟨ψ⊗φ|V|ψ⊗φ⟩`; never below `−1e−10` for valid inputs.
pub fn pure_pair_residual(psi: &PureState, phi: &PureState, variant: Variant) -> Result<f64> {
    let rhs = 4.0 * pure_two_copy_expectation(psi, phi, &build_v(psi.dims(), variant))?;
    Ok(pure_concurrence_value(psi) * pure_concurrence_value(phi) - rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleCheck {
    pub draws: usize,
    /// `4·Tr((ρ⊗σ)V)` per variant (A, B).
    pub rhs: [f64; 2],
    /// Smallest `(Σc(ψᵢ))(Σc(φⱼ)) − 4·Tr((ρ⊗σ)V)` over all draws and variants.
    pub min_gap: f64,
    pub violations: usize,
}

/// Draws `draws` pairs of random decompositions of ρ and σ with the given
/// ensemble sizes and checks `(Σc(ψᵢ))(Σc(φⱼ)) ≥ 4·Tr((ρ⊗σ)V) − 1e−9`.
pub fn ensemble_inequality_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    sizes: (usize, usize),
    draws: usize,
    seed: u64,
) -> Result<EnsembleCheck> {
    rho.dims().ensure_same(&sigma.dims())?;
    let dims = rho.dims();
    let rhs = [
        4.0 * two_copy_expectation(rho, sigma, &build_v(dims, Variant::A))?,
        4.0 * two_copy_expectation(rho, sigma, &build_v(dims, Variant::B))?,
    ];
    let mut rng = states::rng_stream(seed, 0);
    let mut min_gap = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..draws.max(1) {
        let er = states::random_decomposition_with(rho, sizes.0, &mut rng)?;
        let es = states::random_decomposition_with(sigma, sizes.1, &mut rng)?;
        let lhs = ensemble_concurrence(&er) * ensemble_concurrence(&es);
        for r in rhs {
            let gap = lhs - r;
            min_gap = min_gap.min(gap);
            if gap < -INEQUALITY_SLACK {
                violations += 1;
            }
        }
    }
    Ok(EnsembleCheck { draws: draws.max(1), rhs, min_gap, violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossBound {
    /// `4·Tr((ρ⊗σ)V) / c_upper`, unclamped.
    pub value: f64,
    /// Set when the numerator is negative.
    pub vacuous: bool,
}

/// `4·Tr((ρ⊗σ)V) / c_upper` with `c_upper ≥ c(σ)` certified by the caller.
pub fn cross_bound(rho: &DensityMatrix, sigma: &DensityMatrix, c_upper: f64, variant: Variant) -> Result<CrossBound> {
    if !(c_upper > 0.0) || !c_upper.is_finite() {
        return Err(Error::Domain(format!("c_upper must be positive, got {c_upper}")));
    }
    let numerator = 4.0 * two_copy_expectation(rho, sigma, &build_v(rho.dims(), variant))?;
    Ok(CrossBound { value: numerator / c_upper, vacuous: numerator < 0.0 })
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Also run the convex-roof minimizer (upper estimate, oracle metadata only).
    pub with_roof: bool,
    pub roof: RoofOptions,
    pub tight_tol: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { with_roof: false, roof: RoofOptions::default(), tight_tol: TIGHT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub dims: [usize; 2],
    pub rank: usize,
    pub purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoCopyEntry {
    pub variant: Variant,
    /// Raw `4·Tr((ρ⊗ρ)V)`, a bound on `c²`.
    pub c_squared_bound: f64,
    /// Clamped square root, a bound on `c`.
    pub c_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    /// Position of the seed in the input list.
    pub seed_index: usize,
    pub variant: Variant,
    pub c_seed: f64,
    pub value: f64,
    pub clamped: f64,
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossEntry {
    pub seed_index: usize,
    pub variant: Variant,
    pub c_upper: f64,
    pub value: f64,
    pub clamped: f64,
    pub vacuous: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleValues {
    /// Pure-state formula (rank one) or Wootters (two qubits).
    pub exact: Option<ConcurrenceValue>,
    /// Convex-roof minimizer result, an upper estimate.
    pub convex_roof: Option<ConcurrenceValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFlags {
    /// No bound is positive.
    pub vacuous: bool,
    /// `best_lower_bound` matches the exact oracle within the tolerance.
    pub tight: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub state: StateSummary,
    /// Seed amplitudes, `[re, im]` pairs.
    pub seeds: Vec<Vec<Complex64>>,
    pub two_copy: Vec<TwoCopyEntry>,
    pub witness_bounds: Vec<WitnessEntry>,
    pub cross_bounds: Vec<CrossEntry>,
    pub oracle: OracleValues,
    pub best_lower_bound: f64,
    /// Which bound attained `best_lower_bound` ("two-copy A", "witness 0 B", ...).
    pub best_source: String,
    pub flags: ReportFlags,
}

fn exact_oracle(rho: &DensityMatrix, rank: usize) -> Result<Option<ConcurrenceValue>> {
    if rank == 1 {
        let spectral = rho.eigen_ensemble();
        return Ok(Some(crate::concurrence::pure_concurrence(&spectral.members()[0])));
    }
    if rho.dims() == BipartiteDims::qubits() {
        return Ok(Some(wootters_concurrence(rho)?));
    }
    Ok(None)
}

/// Evaluates every bound for `rho`: both two-copy variants, and the witness
/// and cross-state bounds for each pure seed in both variants.
pub fn bound_report(rho: &DensityMatrix, seeds: &[PureState], opts: &ReportOptions) -> Result<BoundReport> {
    let dims = rho.dims();
    let rank = rho.rank();
    let mut best = 0.0f64;
    let mut best_source = String::from("none");
    let mut consider = |value: f64, source: String| {
        if value > best {
            best = value;
            best_source = source;
        }
    };

    let mut two_copy = Vec::new();
    for variant in Variant::ALL {
        let raw = two_copy_bound(rho, VariantChoice::One(variant))?;
        let c_bound = c_from_c_squared(raw);
        consider(c_bound, format!("two-copy {variant}"));
        two_copy.push(TwoCopyEntry { variant, c_squared_bound: raw, c_bound });
    }

    let mut witness_bounds = Vec::new();
    let mut cross_bounds = Vec::new();
    for (i, seed) in seeds.iter().enumerate() {
        seed.dims().ensure_same(&dims)?;
        let sigma = DensityMatrix::from_pure(seed);
        for variant in Variant::ALL {
            let w = witness_from_pure(seed, variant)?;
            let value = witness_bound(rho, &w)?;
            consider(value, format!("witness {i} {variant}"));
            witness_bounds.push(WitnessEntry {
                seed_index: i,
                variant,
                c_seed: w.c_seed(),
                value,
                clamped: value.max(0.0),
                vacuous: value <= 0.0,
            });
            let cb = cross_bound(rho, &sigma, w.c_seed(), variant)?;
            consider(cb.value, format!("cross {i} {variant}"));
            cross_bounds.push(CrossEntry {
                seed_index: i,
                variant,
                c_upper: w.c_seed(),
                value: cb.value,
                clamped: cb.value.max(0.0),
                vacuous: cb.vacuous,
            });
        }
    }

    let oracle = OracleValues {
        exact: exact_oracle(rho, rank)?,
        convex_roof: if opts.with_roof {
            let roof = RoofOptions { ensemble_size: opts.roof.ensemble_size.max(rank), ..opts.roof };
            Some(convex_roof_estimate(rho, &roof)?)
        } else {
            None
        },
    };
    let tight = oracle.exact.as_ref().is_some_and(|e| (e.value - best).abs() <= opts.tight_tol);
    let flags = ReportFlags { vacuous: best <= 0.0, tight };
    Ok(BoundReport {
        state: StateSummary { dims: [dims.d1, dims.d2], rank, purity: rho.purity() },
        seeds: seeds.iter().map(|s| s.amplitudes().to_vec()).collect(),
        two_copy,
        witness_bounds,
        cross_bounds,
        oracle,
        best_lower_bound: best,
        best_source,
        flags,
    })
}
