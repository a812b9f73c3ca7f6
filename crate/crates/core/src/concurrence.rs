//! Concurrence: the pure-state formula, Wootters' closed form for two qubits,
//! and a numerical convex-roof minimizer.
//!
//! The convex-roof minimizer only ever evaluates actual decompositions of
//! the input, so whatever it returns is an upper bound on `c(ρ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, orthonormalize_columns, singular_values, ComplexMatrix};
use crate::projectors::{antisym_pair, pure_two_copy_expectation};
use crate::simplex;
use crate::states::{self, BipartiteDims, DensityMatrix, Ensemble, PureState, Side, STATE_HERMITIAN_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcurrenceMethod {
    PureFormula,
    Wootters,
    ConvexRoofEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceValue {
    pub value: f64,
    pub method: ConcurrenceMethod,
    /// Total simplex iterations (convex-roof estimates only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    /// Whether the best restart met its tolerance before the iteration budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

impl ConcurrenceValue {
    fn exact(value: f64, method: ConcurrenceMethod) -> Self {
        Self { value, method, iterations: None, restarts: None, converged: None }
    }
}

/// `√(2(w² − Tr ρ₁²))` with `w = ⟨ψ|ψ⟩` and `ρ₁` the unnormalized reduction.
pub fn pure_concurrence_value(psi: &PureState) -> f64 {
    let red = psi.reduced(Side::First);
    let purity = red.trace_product(&red).expect("square").re;
    let w = psi.norm_squared();
    (2.0 * (w * w - purity)).max(0.0).sqrt()
}

pub fn pure_concurrence(psi: &PureState) -> ConcurrenceValue {
    ConcurrenceValue::exact(pure_concurrence_value(psi), ConcurrenceMethod::PureFormula)
}

/// `√(4⟨ψ⊗ψ|P₋⁽¹⁾⊗P₋⁽²⁾|ψ⊗ψ⟩)`, the defining two-copy route.
pub fn pure_concurrence_two_copy(psi: &PureState) -> Result<f64> {
    let e = pure_two_copy_expectation(psi, psi, &antisym_pair(psi.dims()))?;
    Ok((4.0 * e).max(0.0).sqrt())
}

fn sigma_y_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let y = ComplexMatrix::from_row_major(2, 2, vec![0.0.into(), -i, i, 0.0.into()]).expect("2x2");
    y.kron(&y)
}

/// Exact two-qubit concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, with `λᵢ` the
/// decreasing square roots of the spectrum of `√ρ ρ̃ √ρ`, `ρ̃ = (Y⊗Y)ρ*(Y⊗Y)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<ConcurrenceValue> {
    if rho.dims() != BipartiteDims::qubits() {
        let d = rho.dims();
        return Err(Error::Domain(format!("Wootters formula needs dims (2, 2), got ({}, {})", d.d1, d.d2)));
    }
    let yy = sigma_y_y();
    let sqrt_rho = eig_hermitian(rho.matrix(), STATE_HERMITIAN_TOL)?.reconstruct_with(|l| l.max(0.0).sqrt());
    let sqrt_tilde = &(&yy * &sqrt_rho.conj()) * &yy;
    // the λᵢ are the singular values of √ρ·√ρ̃
    let lambdas = singular_values(&(&sqrt_rho * &sqrt_tilde));
    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(ConcurrenceValue::exact(value, ConcurrenceMethod::Wootters))
}

/// `Σᵢ c(ψᵢ)` over an ensemble.
pub fn ensemble_concurrence(ensemble: &Ensemble) -> f64 {
    ensemble.members().iter().map(pure_concurrence_value).sum()
}

#[derive(Clone, Copy, Debug)]
pub struct RoofOptions {
    pub ensemble_size: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self { ensemble_size: 4, restarts: 16, max_iters: 2000, tol: 1e-8, seed: 0 }
    }
}

#[derive(Clone, Debug)]
struct RoofRun {
    value: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

fn params_to_matrix(x: &[f64], rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        Complex64::new(x[k], x[k + 1])
    })
}

fn roof_objective(spectral: &Ensemble, x: &[f64], size: usize) -> f64 {
    let g = params_to_matrix(x, size, spectral.len());
    match orthonormalize_columns(&g).and_then(|m| Ensemble::from_isometry(spectral, &m)) {
        Ok(ens) => ensemble_concurrence(&ens),
        Err(_) => f64::INFINITY,
    }
}

fn roof_run(spectral: &Ensemble, opts: &RoofOptions, restart: usize) -> RoofRun {
    let (size, rank) = (opts.ensemble_size, spectral.len());
    let x0: Vec<f64> = if restart == 0 {
        // padded identity: starts from the spectral ensemble itself
        let mut x = vec![0.0; 2 * size * rank];
        for j in 0..rank {
            x[2 * (j * rank + j)] = 1.0;
        }
        x
    } else {
        let mut rng = states::rng_stream(opts.seed, restart as u64);
        (0..size * rank)
            .flat_map(|_| {
                let z = states::complex_gaussian(&mut rng);
                [z.re, z.im]
            })
            .collect()
    };
    let m = simplex::minimize(|x| roof_objective(spectral, x, size), &x0, 0.3, opts.max_iters, opts.tol);
    RoofRun { value: m.value, iterations: m.iterations, converged: m.converged, history: m.history }
}

fn roof_runs(spectral: &Ensemble, opts: &RoofOptions) -> Vec<RoofRun> {
    let restarts = opts.restarts.max(1);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(|r| roof_run(spectral, opts, r)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..restarts).map(|r| roof_run(spectral, opts, r)).collect()
    }
}

/// Minimizes `Σᵢ c(ψᵢ)` over decompositions `|ψᵢ⟩ = Σⱼ M[i,j] √λⱼ |χⱼ⟩` with
/// `M` a `size × rank` isometry; the result is an upper bound on `c(ρ)`.
pub fn convex_roof_estimate(rho: &DensityMatrix, opts: &RoofOptions) -> Result<ConcurrenceValue> {
    let spectral = rho.eigen_ensemble();
    let rank = spectral.len();
    if opts.ensemble_size < rank {
        return Err(Error::Domain(format!("ensemble size {} is below the rank {rank}", opts.ensemble_size)));
    }
    if rank == 1 {
        // every decomposition of a pure state sums to c(ψ)
        return Ok(ConcurrenceValue {
            value: pure_concurrence_value(&spectral.members()[0]),
            method: ConcurrenceMethod::ConvexRoofEstimate,
            iterations: Some(0),
            restarts: Some(0),
            converged: Some(true),
        });
    }
    let runs = roof_runs(&spectral, opts);
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(_, r)| r)
        .expect("at least one restart");
    debug_assert!(best.history.windows(2).all(|w| w[1] <= w[0]));
    Ok(ConcurrenceValue {
        value: best.value.max(0.0),
        method: ConcurrenceMethod::ConvexRoofEstimate,
        iterations: Some(runs.iter().map(|r| r.iterations).sum()),
        restarts: Some(runs.len()),
        converged: Some(best.converged),
    })
}

/// Picks the cheapest exact method, falling back to the convex-roof estimate
/// (an upper estimate) when neither the pure formula nor Wootters applies.
pub fn auto_concurrence(rho: &DensityMatrix, roof: &RoofOptions) -> Result<ConcurrenceValue> {
    if rho.rank() == 1 {
        let spectral = rho.eigen_ensemble();
        return Ok(pure_concurrence(&spectral.members()[0]));
    }
    if rho.dims() == BipartiteDims::qubits() {
        return wootters_concurrence(rho);
    }
    convex_roof_estimate(rho, roof)
}
