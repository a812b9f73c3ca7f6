//! Lower bounds on the concurrence of bipartite quantum states.
//!
//! The crate evaluates three families of bounds that are accessible to
//! experiment without state tomography:
//!
//! * the two-copy bound `c(ρ)² ≥ 4·Tr((ρ⊗ρ)V)`,
//! * the cross-state bound `c(ρ)·c(σ) ≥ 4·Tr((ρ⊗σ)V)`,
//! * the single-copy witness bound `c(ρ) ≥ −Tr(ρ·W_σ)`.
//!
//! Here `V` is built from the projectors onto the symmetric and antisymmetric
//! subspaces of each subsystem's copy pair (see [`projectors`]). Exact oracles
//! (pure-state formula, Wootters' two-qubit solution, a numerical convex-roof
//! minimizer) live in [`concurrence`], witness construction and optimization
//! in [`witness`] and [`optimize`], and finite-shot estimation in [`shots`].
//!
//! Factor ordering is fixed everywhere: tensor factors are listed left to
//! right as they appear in the product, index 0 first. The two-copy space is
//! `H₁⊗H₂⊗H₁′⊗H₂′`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod concurrence;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod projectors;
pub mod shots;
mod simplex;
pub mod states;
pub mod witness;

pub use bounds::{
    bound_report, cross_bound, ensemble_inequality_check, pure_pair_residual, two_copy_bound,
    BoundReport, CrossBound, EnsembleCheck, ReportOptions,
};
pub use concurrence::{
    convex_roof_estimate, pure_concurrence, wootters_concurrence, ConcurrenceMethod,
    ConcurrenceValue, RoofOptions,
};
pub use error::{Error, Result};
pub use linalg::{eig_hermitian, partial_trace, permute_subsystems, ComplexMatrix, SubsystemShape};
pub use optimize::{optimize_witness, OptimizeOptions, OptimizedWitness};
pub use projectors::{build_v, two_copy_expectation, CopyPairOperator, Variant, VariantChoice};
pub use shots::{estimate_two_copy_bound, simulate_expectation, ShotEstimate};
pub use states::{BellKind, BipartiteDims, DensityMatrix, Ensemble, PureState};
pub use witness::{build_witness, witness_bound, witness_from_pure, Witness};

pub use num_complex::Complex64;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeExamples;
