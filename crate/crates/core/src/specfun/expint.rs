//! Exponential integral `E1` via series (small x) and continued fraction.

use super::EULER_GAMMA;

const EPS: f64 = 1e-17;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 500;

/// Continued-fraction value of `e^x · E1(x)`, valid for `x > 1`.
fn cf_scaled(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn series(x: f64) -> f64 {
    // E1(x) = −γ − ln x − Σ_{k≥1} (−x)^k/(k·k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=MAX_ITER {
        term *= -x / k as f64;
        let contrib = term / k as f64;
        sum += contrib;
        if contrib.abs() < EPS * sum.abs().max(1e-30) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

pub(crate) fn exp1_raw(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        series(x)
    } else {
        cf_scaled(x) * (-x).exp()
    }
}

/// `x·e^x·E1(x)` without overflow; tends to 1 as `x → ∞`.
pub(crate) fn exp1_scaled_raw(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        x * x.exp() * series(x)
    } else {
        x * cf_scaled(x)
    }
}
