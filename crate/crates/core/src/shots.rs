//! Finite-shot estimation of expectation values.
//!
//! Each shot is a projective measurement in the observable's eigenbasis and
//! records the eigenvalue obtained. Eigenvalues that agree to within
//! `1e−10·max(1, |λ|)` are merged into one outcome, so degeneracies are
//! handled by the statistics themselves.

use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::bounds::two_copy_bound;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, tensor, ComplexMatrix, HERMITIAN_TOL};
use crate::projectors::{build_v, Variant, VariantChoice};
use crate::states::{self, BipartiteDims, DensityMatrix};

/// Allowed deviation of the outcome probabilities from a unit total.
pub const PROBABILITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√shots`.
    pub std_error: f64,
    pub shots: u64,
    pub observable: String,
}

/// Distinct outcomes of a projective measurement and their probabilities.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probabilities).map(|(v, p)| v * p).sum()
    }
}

pub fn outcome_distribution(state: &ComplexMatrix, observable: &ComplexMatrix) -> Result<OutcomeDistribution> {
    if !observable.is_square() || observable.rows() != state.rows() || !state.is_square() {
        return Err(Error::Shape(format!(
            "observable {}x{} does not act on a state of side {}",
            observable.rows(),
            observable.cols(),
            state.rows()
        )));
    }
    let eig = eig_hermitian(observable, HERMITIAN_TOL)?;
    let mut values: Vec<f64> = Vec::new();
    let mut probabilities: Vec<f64> = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        let p = state.sandwich(&v, &v)?.re;
        match values.last() {
            Some(&last) if (lambda - last).abs() <= 1e-10 * 1.0f64.max(lambda.abs()) => {
                *probabilities.last_mut().expect("paired with values") += p;
            }
            _ => {
                values.push(lambda);
                probabilities.push(p);
            }
        }
    }
    for p in probabilities.iter_mut() {
        *p = p.max(0.0);
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::Validation(format!("outcome probabilities sum to {total:.12}")));
    }
    probabilities.iter_mut().for_each(|p| *p /= total);
    Ok(OutcomeDistribution { values, probabilities })
}

fn sample(dist: &OutcomeDistribution, shots: u64, seed: u64, label: String) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::Domain("at least one shot is required".into()));
    }
    let index = WeightedIndex::new(&dist.probabilities).map_err(|e| Error::Validation(e.to_string()))?;
    let mut rng = states::rng_stream(seed, 0);
    let mut counts = vec![0u64; dist.values.len()];
    for _ in 0..shots {
        counts[index.sample(&mut rng)] += 1;
    }
    let n = shots as f64;
    let mean = counts.iter().zip(&dist.values).map(|(&c, v)| c as f64 * v).sum::<f64>() / n;
    let std_error = if shots > 1 {
        let ss: f64 = counts.iter().zip(&dist.values).map(|(&c, v)| c as f64 * (v - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(ShotEstimate { mean, std_error, shots, observable: label })
}

/// Estimates `Tr(ρ·O)` from `shots` projective measurements of `O`.
pub fn simulate_expectation(state: &DensityMatrix, observable: &ComplexMatrix, shots: u64, seed: u64) -> Result<ShotEstimate> {
    let dist = outcome_distribution(state.matrix(), observable)?;
    sample(&dist, shots, seed, format!("hermitian {}x{}", observable.rows(), observable.cols()))
}

/// Estimates the two-copy bound `4·Tr((ρ⊗ρ)V)` by measuring `4V` on `ρ⊗ρ`.
pub fn estimate_two_copy_bound(rho: &DensityMatrix, variant: Variant, shots: u64, seed: u64) -> Result<ShotEstimate> {
    let n = rho.dims().total();
    let doubled = DensityMatrix::new(tensor(rho.matrix(), rho.matrix()), BipartiteDims::new(n, n)?)?;
    let observable = build_v(rho.dims(), variant).matrix().scale(4.0);
    let dist = outcome_distribution(doubled.matrix(), &observable)?;
    debug_assert!((dist.mean() - two_copy_bound(rho, VariantChoice::One(variant)).unwrap_or(f64::NAN)).abs() < 1e-9);
    sample(&dist, shots, seed, format!("two-copy 4V variant {variant}"))
}
