//! Browser demo. Each exported function takes plain numbers and returns a
//! JSON string, which `www/index.html` plots or tabulates.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use concurrence_witness::bounds::c_from_c_squared;
use concurrence_witness::states::{bell_state, werner_state};
use concurrence_witness::witness::Seed;
use concurrence_witness::{
    estimate_two_copy_bound, optimize_witness, simulate_expectation, two_copy_bound, witness_bound,
    witness_from_pure, wootters_concurrence, BellKind, BipartiteDims, Complex64, ComplexMatrix, DensityMatrix,
    OptimizeOptions, PureState, Result, Variant, VariantChoice,
};

#[derive(Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub wootters: f64,
    pub witness: f64,
    pub two_copy: f64,
}

/// Wootters concurrence, singlet-witness bound and two-copy bound along the
/// Werner family, at `points` evenly spaced values of p in [0, 1].
pub fn werner_curve(points: usize) -> Result<Vec<CurvePoint>> {
    let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A)?;
    let n = points.max(2);
    (0..n)
        .map(|k| {
            let p = k as f64 / (n - 1) as f64;
            let rho = werner_state(p)?;
            Ok(CurvePoint {
                p,
                wootters: wootters_concurrence(&rho)?.value,
                witness: witness_bound(&rho, &w)?,
                two_copy: c_from_c_squared(two_copy_bound(&rho, VariantChoice::Best)?),
            })
        })
        .collect()
}

#[derive(Serialize)]
pub struct NoisyBounds {
    pub theta: f64,
    pub p: f64,
    pub wootters: f64,
    pub two_copy: f64,
    pub singlet_witness: f64,
    pub optimized_witness: f64,
    pub optimizer_seed: Vec<Complex64>,
}

/// `p·|ψθ⟩⟨ψθ| + (1−p)·𝟙/4` with `|ψθ⟩ = cos θ|01⟩ − sin θ|10⟩`.
pub fn noisy_state(theta: f64, p: f64) -> Result<DensityMatrix> {
    let zero = Complex64::new(0.0, 0.0);
    let psi = PureState::normalized(
        vec![zero, Complex64::new(theta.cos(), 0.0), Complex64::new(-theta.sin(), 0.0), zero],
        BipartiteDims::qubits(),
    )?;
    let m = &psi.projector().scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
    DensityMatrix::from_unnormalized(m, BipartiteDims::qubits())
}

pub fn noisy_bounds(theta: f64, p: f64, restarts: usize, seed: u64) -> Result<NoisyBounds> {
    let rho = noisy_state(theta, p)?;
    let singlet = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A)?;
    let opt = optimize_witness(&rho, &OptimizeOptions { restarts, seed, ..Default::default() })?;
    let optimizer_seed = match opt.witness.seed() {
        Seed::Pure(phi) => phi.amplitudes().to_vec(),
        _ => Vec::new(),
    };
    Ok(NoisyBounds {
        theta,
        p,
        wootters: wootters_concurrence(&rho)?.value,
        two_copy: c_from_c_squared(two_copy_bound(&rho, VariantChoice::Best)?),
        singlet_witness: witness_bound(&rho, &singlet)?,
        optimized_witness: opt.bound,
        optimizer_seed,
    })
}

#[derive(Serialize)]
pub struct ShotComparison {
    pub p: f64,
    pub shots: u64,
    /// Exact `−Tr(ρW)` for the singlet witness.
    pub witness_exact: f64,
    pub witness_estimate: f64,
    pub witness_std_error: f64,
    /// Exact `4·Tr((ρ⊗ρ)V_A)`.
    pub two_copy_exact: f64,
    pub two_copy_estimate: f64,
    pub two_copy_std_error: f64,
}

/// Simulated measurements of the singlet witness and of `4V_A` on two copies
/// of a Werner state; estimates are reported with the bound's sign.
pub fn shot_comparison(p: f64, shots: u64, seed: u64) -> Result<ShotComparison> {
    let rho = werner_state(p)?;
    let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A)?;
    let single = simulate_expectation(&rho, w.operator(), shots, seed)?;
    let double = estimate_two_copy_bound(&rho, Variant::A, shots, seed.wrapping_add(1))?;
    Ok(ShotComparison {
        p,
        shots,
        witness_exact: witness_bound(&rho, &w)?,
        witness_estimate: -single.mean,
        witness_std_error: single.std_error,
        two_copy_exact: two_copy_bound(&rho, VariantChoice::One(Variant::A))?,
        two_copy_estimate: double.mean,
        two_copy_std_error: double.std_error,
    })
}

fn to_js<T: Serialize>(result: Result<T>) -> std::result::Result<String, JsValue> {
    let value = result.map_err(|e| JsValue::from_str(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = wernerCurve)]
pub fn werner_curve_js(points: usize) -> std::result::Result<String, JsValue> {
    to_js(werner_curve(points))
}

#[wasm_bindgen(js_name = noisyBounds)]
pub fn noisy_bounds_js(theta: f64, p: f64, restarts: usize, seed: u32) -> std::result::Result<String, JsValue> {
    to_js(noisy_bounds(theta, p, restarts, seed as u64))
}

#[wasm_bindgen(js_name = shotComparison)]
pub fn shot_comparison_js(p: f64, shots: u32, seed: u32) -> std::result::Result<String, JsValue> {
    to_js(shot_comparison(p, shots as u64, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_matches_closed_forms() {
        let curve = werner_curve(11).unwrap();
        assert_eq!(curve.len(), 11);
        for pt in &curve {
            let exact = ((3.0 * pt.p - 1.0) / 2.0).max(0.0);
            assert!((pt.wootters - exact).abs() < 1e-10);
            assert!((pt.witness - (3.0 * pt.p - 1.0) / 2.0).abs() < 1e-10);
            assert!(pt.two_copy <= pt.wootters + 1e-9);
        }
        assert!((curve[10].two_copy - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_state_reduces_to_werner() {
        let a = noisy_state(std::f64::consts::FRAC_PI_4, 0.6).unwrap();
        let b = werner_state(0.6).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn noisy_bounds_are_ordered() {
        let r = noisy_bounds(0.3, 0.9, 8, 1).unwrap();
        assert!(r.optimized_witness <= r.wootters + 1e-9);
        assert!(r.optimized_witness >= r.singlet_witness - 1e-9);
        assert!(r.two_copy <= r.wootters + 1e-9);
        assert_eq!(r.optimizer_seed.len(), 4);
    }

    #[test]
    fn shot_estimates_track_exact_values() {
        let r = shot_comparison(0.9, 100_000, 3).unwrap();
        assert!((r.witness_exact - 0.85).abs() < 1e-12);
        assert!((r.witness_estimate - r.witness_exact).abs() <= 5.0 * r.witness_std_error);
        assert!((r.two_copy_estimate - r.two_copy_exact).abs() <= 5.0 * r.two_copy_std_error);
    }

    #[test]
    fn json_wrappers_serialize() {
        let text = to_js(werner_curve(3)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert_eq!(v[1]["p"], 0.5);
    }
}
