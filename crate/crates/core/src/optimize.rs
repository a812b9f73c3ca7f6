//! Maximization of the witness bound over pure seeds.
//!
//! For a pure seed φ the bound has the closed form
//!
//! ```text
//! −Tr(ρ·W_φ) = (2 / c(φ)) · (⟨φ|ρ|φ⟩ − Tr(ρ₂·φ₂))     (variant A)
//! −Tr(ρ·W_φ) = (2 / c(φ)) · (⟨φ|ρ|φ⟩ − Tr(ρ₁·φ₁))     (variant B)
//! ```
//!
//! where subscripts denote reductions. The search runs Nelder-Mead on the
//! real and imaginary parts of an unnormalized vector, with restart 0 pinned
//! to the canonical maximally entangled seed and restart 1 to the dominant
//! eigenvector of ρ (or `Σ|kk⟩/√d` when that is not entangled).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::concurrence::pure_concurrence_value;
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::projectors::Variant;
use crate::simplex;
use crate::states::{self, canonical_entangled, max_entangled_phi, DensityMatrix, PureState, Side};
use crate::witness::{witness_bound, witness_from_pure, Witness};

/// Seeds below this concurrence are rejected by penalty.
pub const MIN_ITERATE_CONCURRENCE: f64 = 1e-6;
const PENALTY: f64 = 1e6;

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    pub variant: Variant,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { variant: Variant::A, restarts: 32, max_iters: 2000, tol: 1e-8, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeTrace {
    /// Best bound reached by each restart, in restart order.
    pub restart_bounds: Vec<f64>,
    pub best_restart: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct OptimizedWitness {
    pub witness: Witness,
    /// Equal to `witness_bound(ρ, &witness)`.
    pub bound: f64,
    pub trace: OptimizeTrace,
}

struct Objective<'a> {
    rho: &'a DensityMatrix,
    reduced: ComplexMatrix,
    variant: Variant,
}

impl Objective<'_> {
    fn bound_of(&self, phi: &PureState) -> Option<f64> {
        let c = pure_concurrence_value(phi);
        if !(c >= MIN_ITERATE_CONCURRENCE) {
            return None;
        }
        let a = phi.amplitudes();
        let overlap = self.rho.matrix().sandwich(a, a).ok()?.re;
        let side = match self.variant {
            Variant::A => Side::Second,
            Variant::B => Side::First,
        };
        let local = self.reduced.trace_product(&phi.reduced(side)).ok()?.re;
        Some(2.0 * (overlap - local) / c)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match vector_from_params(x, self.rho).and_then(|phi| self.bound_of(&phi)) {
            Some(b) => -b,
            None => PENALTY,
        }
    }
}

fn vector_from_params(x: &[f64], rho: &DensityMatrix) -> Option<PureState> {
    let amps: Vec<Complex64> = x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    PureState::normalized(amps, rho.dims()).ok()
}

fn params_from_vector(phi: &PureState) -> Vec<f64> {
    phi.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn starting_point(rho: &DensityMatrix, opts: &OptimizeOptions, restart: usize) -> PureState {
    let dims = rho.dims();
    match restart {
        0 => canonical_entangled(dims),
        1 => {
            let top = rho.eigen_ensemble().members()[0].clone();
            let top = PureState::normalized(top.amplitudes().to_vec(), dims).expect("nonzero eigenvector");
            if pure_concurrence_value(&top) >= MIN_ITERATE_CONCURRENCE {
                top
            } else {
                max_entangled_phi(dims)
            }
        }
        r => states::random_pure_with(dims, &mut states::rng_stream(opts.seed, r as u64)),
    }
}

fn run_restart(obj: &Objective<'_>, opts: &OptimizeOptions, restart: usize) -> (Vec<f64>, f64, usize) {
    let x0 = params_from_vector(&starting_point(obj.rho, opts, restart));
    let m = simplex::minimize(|x| obj.eval(x), &x0, 0.2, opts.max_iters, opts.tol);
    (m.x, -m.value, m.iterations)
}

/// Searches pure seeds φ for the largest witness bound `−Tr(ρ·W_φ)`.
pub fn optimize_witness(rho: &DensityMatrix, opts: &OptimizeOptions) -> Result<OptimizedWitness> {
    let side = match opts.variant {
        Variant::A => Side::Second,
        Variant::B => Side::First,
    };
    let obj = Objective { rho, reduced: rho.reduced(side), variant: opts.variant };
    let restarts = opts.restarts.max(1);

    #[cfg(feature = "parallel")]
    let runs: Vec<_> = {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(|r| run_restart(&obj, opts, r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<_> = (0..restarts).map(|r| run_restart(&obj, opts, r)).collect();

    let mut best_restart = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 > runs[best_restart].1 {
            best_restart = r;
        }
    }
    let phi = vector_from_params(&runs[best_restart].0, rho).expect("incumbent is a valid vector");
    let witness = witness_from_pure(&phi, opts.variant)?;
    let bound = witness_bound(rho, &witness)?;
    Ok(OptimizedWitness {
        witness,
        bound,
        trace: OptimizeTrace {
            restart_bounds: runs.iter().map(|r| r.1).collect(),
            best_restart,
            iterations: runs.iter().map(|r| r.2).sum(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::wootters_concurrence;
    use crate::states::{bell_state, random_density_with, random_separable, rng_stream, werner_state, BellKind, BipartiteDims};

    fn quick(seed: u64) -> OptimizeOptions {
        OptimizeOptions { restarts: 8, seed, ..Default::default() }
    }

    #[test]
    fn closed_form_objective_matches_witness_bound() {
        let mut rng = rng_stream(401, 0);
        let dims = BipartiteDims::new(2, 3).unwrap();
        for _ in 0..20 {
            let rho = random_density_with(dims, 3, &mut rng).unwrap();
            let phi = states::random_pure_with(dims, &mut rng);
            for variant in Variant::ALL {
                let side = if variant == Variant::A { Side::Second } else { Side::First };
                let obj = Objective { rho: &rho, reduced: rho.reduced(side), variant };
                let direct = witness_bound(&rho, &witness_from_pure(&phi, variant).unwrap()).unwrap();
                assert!((obj.bound_of(&phi).unwrap() - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn werner_recovers_exact_concurrence() {
        let rho = werner_state(0.9).unwrap();
        let out = optimize_witness(&rho, &quick(1)).unwrap();
        assert!(out.bound >= 0.85 - 1e-6 && out.bound <= 0.85 + 1e-9, "{}", out.bound);
    }

    #[test]
    fn bell_input_is_tight() {
        for kind in [BellKind::PhiPlus, BellKind::PsiPlus] {
            let rho = DensityMatrix::from_pure(&bell_state(kind));
            let out = optimize_witness(&rho, &quick(2)).unwrap();
            assert!((out.bound - 1.0).abs() <= 1e-6, "{}", out.bound);
        }
    }

    #[test]
    fn separable_input_gives_no_positive_bound() {
        let rho = random_separable(BipartiteDims::qubits(), 3, 5).unwrap();
        let out = optimize_witness(&rho, &quick(3)).unwrap();
        assert!(out.bound <= 1e-6);
    }

    #[test]
    fn validity_and_canonical_floor() {
        let mut rng = rng_stream(402, 0);
        for _ in 0..10 {
            let rho = random_density_with(BipartiteDims::qubits(), 2, &mut rng).unwrap();
            for variant in Variant::ALL {
                let out = optimize_witness(&rho, &OptimizeOptions { variant, ..quick(4) }).unwrap();
                assert!((out.bound - witness_bound(&rho, &out.witness).unwrap()).abs() <= 1e-12);
                let wv = wootters_concurrence(&rho).unwrap().value;
                assert!(out.bound <= wv + 1e-9, "{} vs {wv} {:?}", out.bound, rho);
                let canonical = witness_from_pure(&bell_state(BellKind::PsiMinus), variant).unwrap();
                assert!(out.bound >= witness_bound(&rho, &canonical).unwrap() - 1e-8);
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let rho = states::random_density(BipartiteDims::new(3, 3).unwrap(), 2, 6).unwrap();
        let a = optimize_witness(&rho, &quick(7)).unwrap();
        let b = optimize_witness(&rho, &quick(7)).unwrap();
        assert_eq!(a.bound, b.bound);
        assert_eq!(a.trace, b.trace);
    }
}
