//! Quadrature rules: generalized Gauss–Laguerre and adaptive Simpson.
//!
//! Gauss–Laguerre nodes are found by Newton iteration on the Laguerre
//! recurrence; weights are assembled in log space so large `alpha`
//! (Gamma-shape minus one) cannot overflow. A rule of `n` nodes integrates
//! `x^alpha e^{-x} p(x)` exactly for polynomials `p` up to degree `2n−1`.

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_raw;

/// Nodes and weights for `∫_0^∞ x^alpha e^{−x} f(x) dx ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Raw rule; the weights sum to `Γ(alpha+1)`, which overflows `f64`
    /// for large `alpha` — use [`GaussLaguerre::gamma_expectation`] there.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        let (nodes, log_weights) = Self::nodes_log_weights(n, alpha)?;
        let weights: Vec<f64> = log_weights.iter().map(|&(sign, mag)| sign * mag.exp()).collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::numeric(
                "GaussLaguerre::new",
                format!("raw weights overflow for alpha = {alpha}; use gamma_expectation"),
            ));
        }
        Ok(GaussLaguerre { nodes, weights })
    }

    /// Rule with weights divided by `Γ(shape)`, turning the sum into the
    /// expectation `E[f(Z)]` for `Z ~ Gamma(shape, 1)`. Normalization
    /// happens in log space, so large shapes stay finite.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the check
    pub fn gamma_expectation(n: usize, shape: f64) -> Result<Self> {
        if !(shape > 0.0) {
            return Err(Error::domain("GaussLaguerre::gamma_expectation", format!("shape = {shape} must be > 0")));
        }
        let (nodes, log_weights) = Self::nodes_log_weights(n, shape - 1.0)?;
        let ln_norm = ln_gamma_raw(shape);
        let weights = log_weights.iter().map(|&(sign, mag)| sign * (mag - ln_norm).exp()).collect();
        Ok(GaussLaguerre { nodes, weights })
    }

    /// Newton–Laguerre nodes plus `(sign, ln |weight|)` pairs.
    #[allow(clippy::type_complexity)]
    fn nodes_log_weights(n: usize, alpha: f64) -> Result<(Vec<f64>, Vec<(f64, f64)>)> {
        if n < 2 {
            return Err(Error::domain("GaussLaguerre::new", "need at least 2 nodes"));
        }
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::domain("GaussLaguerre::new", format!("alpha = {alpha} must be > -1")));
        }
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![(0.0, 0.0); n];
        let mut z = 0.0f64;
        for i in 0..n {
            // Stroud–Secrest style initial guesses.
            if i == 0 {
                z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha);
            } else if i == 1 {
                z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf);
            } else {
                let ai = (i - 1) as f64;
                z += ((1.0 + 2.55 * ai) / (1.9 * ai)
                    + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                    * (z - nodes[i - 2])
                    / (1.0 + 0.3 * alpha);
            }
            let mut pp = 0.0;
            let mut p2 = 0.0;
            let mut last_step = f64::INFINITY;
            for _ in 0..100 {
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 1..=n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * jf - 1.0 + alpha - z) * p2 - (jf - 1.0 + alpha) * p3) / jf;
                }
                pp = (nf * p1 - (nf + alpha) * p2) / z;
                let z1 = z;
                z = z1 - p1 / pp;
                last_step = (z - z1).abs();
                if last_step <= 1e-14 * (1.0 + z.abs()) {
                    break;
                }
            }
            // Newton dithers at ulp level near the root; any step this
            // small means the node is converged for quadrature purposes.
            if last_step > 1e-10 * (1.0 + z.abs()) {
                return Err(Error::numeric("GaussLaguerre::new", format!("node {i} did not converge")));
            }
            nodes[i] = z;
            // w = −Γ(alpha+n)/(Γ(n)·pp·n·p2), assembled in logs.
            let mag = ln_gamma_raw(alpha + nf) - ln_gamma_raw(nf) - (pp * nf * p2).abs().ln();
            let sign = -(pp * nf * p2).signum();
            weights[i] = (sign, mag);
        }
        Ok((nodes, weights))
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Adaptive Simpson integration with absolute tolerance.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&f, a, b, fa, fb, fm, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1)
    }
}

/// Expectation `E[f(Z)]` for `Z ~ Exp(1)` by adaptive quadrature on a
/// truncated domain; the discarded tail mass is below 1e-305.
pub fn exp_expectation_adaptive(f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let g = |z: f64| (-z).exp() * f(z);
    // Split so the subdivision concentrates where e^{-z} carries mass.
    adaptive_simpson(g, 0.0, 1.0, tol * 0.25)
        + adaptive_simpson(g, 1.0, 8.0, tol * 0.25)
        + adaptive_simpson(g, 8.0, 60.0, tol * 0.25)
        + adaptive_simpson(g, 60.0, 700.0, tol * 0.25)
}
