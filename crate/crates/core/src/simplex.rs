//! Derivative-free Nelder-Mead minimizer used by the convex-roof estimate
//! and the witness optimizer.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, and rebuilds the
//! simplex around the incumbent whenever it collapses, until a rebuild no
//! longer improves the objective by more than `tol` or the iteration budget
//! runs out.

#[derive(Clone, Debug)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Incumbent value after every iteration; nonincreasing.
    pub history: Vec<f64>,
}

pub(crate) fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iters: usize,
    tol: f64,
) -> Minimum {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut best_x = x0.to_vec();
    let mut best_val = f(x0);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut scale = step;

    while iterations < max_iters {
        let start_val = best_val;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_val));
        for i in 0..n {
            let mut x = best_x.clone();
            x[i] += if x[i].abs() > 1e-3 { scale * x[i].abs().max(0.05) } else { scale };
            let v = f(&x);
            simplex.push((x, v));
        }
        let mut collapsed = false;
        while iterations < max_iters {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if (spread.is_finite() && spread <= tol && diameter <= tol.sqrt()) || diameter <= 1e-14 {
                collapsed = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let worst = simplex[n].0.clone();
            let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect() };

            let xr = along(alpha);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(alpha * beta);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(alpha * gamma);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-gamma);
                    let fc = f(&xc);
                    (xc, fc)
                };
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for (x, v) in simplex[1..].iter_mut() {
                        for (xi, bi) in x.iter_mut().zip(&best) {
                            *xi = bi + delta * (*xi - bi);
                        }
                        *v = f(x);
                    }
                }
            }
            let (bx, bv) = simplex.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty simplex");
            if *bv < best_val {
                best_val = *bv;
                best_x = bx.clone();
            }
            history.push(best_val);
        }
        if !collapsed {
            break;
        }
        if start_val - best_val <= tol {
            converged = true;
            break;
        }
        scale = (scale * 0.5).max(1e-4);
    }

    Minimum { x: best_x, value: best_val, iterations, converged, history }
}
