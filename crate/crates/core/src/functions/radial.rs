//! Radial test functions `h(x) = |x|^-gamma 1_{1 <= |x| <= R}`.
//!
//! In polar coordinates `int xi(h) x_i x_j dx` reduces, up to an angular
//! constant, to `int_1^R xi(r^-gamma) r^(n+1) dr`, and `h` lies in
//! `L^p(mu_n)` as `R -> inf` iff `int_1^inf r^(n+1-gamma p) dr < inf`.

use serde::{Deserialize, Serialize};

use super::CompositionFunction;
use crate::error::{Error, Result};

/// Simpson panels per unit of `ln r`.
const PANELS_PER_UNIT: f64 = 400.0;

/// Ratio of consecutive per-decade increments at or above which the
/// integrand is judged not to decay.
const DIVERGENCE_RATIO: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    Convergent,
    Divergent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProbeReport {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub xi_label: String,
    /// `gamma p > n + 2`.
    pub in_lp: bool,
    /// `(R, int_1^R xi(r^-gamma) r^(n+1) dr)`.
    pub partials: Vec<(f64, f64)>,
    /// Increment of `int |xi(r^-gamma)| r^(n+1) dr` over the last decade
    /// divided by that over the one before.
    pub tail_ratio: f64,
    pub verdict: ProbeVerdict,
}

fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut m = ((b - a) * PANELS_PER_UNIT).ceil() as usize;
    m = m.max(8);
    if m % 2 == 1 {
        m += 1;
    }
    let h = (b - a) / m as f64;
    let mut s = g(a) + g(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(a + h * i as f64);
    }
    s * h / 3.0
}

/// Probe of the reduced radial integral for `xi`, with partial values at
/// `R in {10, 100, 1000, r_max}`.
pub fn radial_membership_and_k_probe(
    xi: &CompositionFunction,
    p: f64,
    n: usize,
    gamma: f64,
    r_max: f64,
) -> Result<RadialProbeReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    if !(r_max >= 1e4 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("R_max = {r_max} must be at least 1e4")));
    }
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    let k = (n + 2) as f64;
    // Substituting r = e^u: int_0^ln R xi(e^{-gamma u}) e^{(n+2) u} du.
    let signed = |u: f64| xi.eval((-gamma * u).exp()) * (k * u).exp();
    let absolute = |u: f64| signed(u).abs();

    let mut partials = Vec::new();
    let mut acc = 0.0;
    let mut last = 0.0;
    for r in [10.0, 100.0, 1000.0, r_max] {
        let u = f64::ln(r);
        acc += simpson(&signed, last, u);
        partials.push((r, acc));
        last = u;
    }

    let (u1, u2, u3) = ((r_max / 100.0).ln(), (r_max / 10.0).ln(), r_max.ln());
    let d1 = simpson(&absolute, u1, u2);
    let d2 = simpson(&absolute, u2, u3);
    let tail_ratio = if d1 > 0.0 {
        d2 / d1
    } else if d2 > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let verdict = if tail_ratio >= DIVERGENCE_RATIO {
        ProbeVerdict::Divergent
    } else {
        ProbeVerdict::Convergent
    };
    Ok(RadialProbeReport {
        n,
        p,
        gamma,
        xi_label: xi.label().to_string(),
        in_lp: gamma * p > k,
        partials,
        tail_ratio,
        verdict,
    })
}
