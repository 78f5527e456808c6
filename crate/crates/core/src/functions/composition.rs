use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::{real_pow, Expr};
use crate::error::{Error, Result};

/// A map `xi: R -> R` with a declared growth bound `|xi(t)| <= d |t|^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionFunction {
    label: String,
    expr: Expr,
    exponent_p: f64,
    growth_constant_d: f64,
}

impl CompositionFunction {
    /// Parses `expression` in the variable `t`. The bound is only declared
    /// here; see [`check_growth`] for the sampled test.
    pub fn new(label: &str, expression: &str, p: f64, d: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidComposition(format!("exponent p = {p} must be a finite real >= 1")));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidComposition(format!("growth constant d = {d} must be finite and >= 0")));
        }
        let expr = Expr::parse(expression)?;
        let at_zero = expr.eval(0.0);
        if at_zero != 0.0 {
            return Err(Error::InvalidComposition(format!(
                "xi(0) = {at_zero}, but the growth bound forces xi(0) = 0"
            )));
        }
        Ok(CompositionFunction {
            label: label.to_string(),
            expr,
            exponent_p: p,
            growth_constant_d: d,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn expression(&self) -> &str {
        self.expr.source()
    }

    pub fn exponent(&self) -> f64 {
        self.exponent_p
    }

    pub fn growth_constant(&self) -> f64 {
        self.growth_constant_d
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.expr.eval(t)
    }

    pub fn zero(p: f64) -> Self {
        Self::new("zero", "0", p, 0.0).expect("valid built-in")
    }

    /// `c t |t|^(p-1)`, odd.
    pub fn odd_power(c: f64, p: f64) -> Self {
        Self::new("odd_power", &format!("{c} * t * |t|^{}", p - 1.0), p, c.abs()).expect("valid built-in")
    }

    /// `c |t|^p`, even.
    pub fn even_power(c: f64, p: f64) -> Self {
        Self::new("even_power", &format!("{c} * |t|^{p}"), p, c.abs()).expect("valid built-in")
    }

    /// `c sign(t) min(|t|^q, |t|^p)` with `q >= p`: behaves like `|t|^q`
    /// near zero and like `|t|^p` at infinity.
    pub fn signed_power(c: f64, q: f64, p: f64) -> Result<Self> {
        if !(q >= p) {
            return Err(Error::InvalidComposition(format!("signed power needs q >= p, got q = {q}, p = {p}")));
        }
        Self::new(
            "signed_power",
            &format!("{c} * sign(t) * min(|t|^{q}, |t|^{p})"),
            p,
            c.abs(),
        )
    }

    /// `c sign(t) min(|t|^p, cap)`.
    pub fn clamped(c: f64, cap: f64, p: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::InvalidComposition(format!("clamp level {cap} must be positive")));
        }
        Self::new("clamped", &format!("{c} * sign(t) * min(|t|^{p}, {cap})"), p, c.abs())
    }

    /// The fixed family used by the extraction round trip and the suite.
    pub fn builtins(p: f64) -> Vec<CompositionFunction> {
        vec![
            Self::zero(p),
            Self::odd_power(1.0, p),
            Self::odd_power(-1.5, p),
            Self::even_power(0.5, p),
            Self::signed_power(2.0, p + 1.0, p).expect("q >= p"),
            Self::clamped(1.0, 1.5, p).expect("positive cap"),
        ]
    }

    /// Largest jump `|xi(t_{i+1}) - xi(t_i)|` over `2^level + 1` equally
    /// spaced samples of `[lo, hi]`.
    pub fn max_adjacent_jump(&self, lo: f64, hi: f64, level: u32) -> f64 {
        let m = 1usize << level;
        let h = (hi - lo) / m as f64;
        let mut prev = self.eval(lo);
        let mut worst = 0.0f64;
        for i in 1..=m {
            let cur = self.eval(lo + h * i as f64);
            worst = worst.max((cur - prev).abs());
            prev = cur;
        }
        worst
    }
}

#[derive(Serialize, Deserialize)]
struct XiDoc {
    label: String,
    expression: String,
    p: f64,
    d: f64,
}

impl Serialize for CompositionFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        XiDoc {
            label: self.label.clone(),
            expression: self.expression().to_string(),
            p: self.exponent_p,
            d: self.growth_constant_d,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CompositionFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = XiDoc::deserialize(d)?;
        CompositionFunction::new(&doc.label, &doc.expression, doc.p, doc.d).map_err(serde::de::Error::custom)
    }
}

/// Log-spaced sample magnitudes for [`check_growth`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub t_min: f64,
    pub t_max: f64,
    /// Number of magnitudes; each is tried with both signs.
    pub count: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            t_min: 1e-8,
            t_max: 1e8,
            count: 400,
        }
    }
}

impl SampleSpec {
    pub fn magnitudes(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.t_min];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let step = (b - a) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match i {
                0 => self.t_min,
                i if i == self.count - 1 => self.t_max,
                i => (a + step * i as f64).exp(),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    /// No sample exceeded the bound. Not a proof.
    NoViolationFound,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub label: String,
    pub p: f64,
    pub d: f64,
    pub samples: usize,
    pub max_ratio: f64,
    pub argmax_t: f64,
    pub verdict: GrowthVerdict,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.verdict == GrowthVerdict::NoViolationFound
    }
}

/// Sampled test of `|xi(t)| <= d |t|^p`, passing iff the largest ratio
/// `|xi(t)| / |t|^p` is at most `d (1 + 1e-9)`.
pub fn check_growth(xi: &CompositionFunction, p: f64, d: f64, spec: &SampleSpec) -> Result<GrowthReport> {
    if !(spec.t_min > 0.0 && spec.t_min <= spec.t_max && spec.t_max.is_finite() && spec.count >= 1) {
        return Err(Error::InvalidArgument(format!(
            "sample range needs 0 < t_min <= t_max < inf and count >= 1 (got {spec:?})"
        )));
    }
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax_t = spec.t_min;
    let mut samples = 0;
    for m in spec.magnitudes() {
        let denom = real_pow(m, p);
        for t in [m, -m] {
            let v = xi.eval(t).abs();
            // NaN means the bound is not established at t.
            let ratio = if v.is_nan() { f64::INFINITY } else { v / denom };
            samples += 1;
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax_t = t;
            }
        }
    }
    let verdict = if max_ratio <= d * (1.0 + 1e-9) {
        GrowthVerdict::NoViolationFound
    } else {
        GrowthVerdict::Violation
    };
    Ok(GrowthReport {
        label: xi.label().to_string(),
        p,
        d,
        samples,
        max_ratio,
        argmax_t,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonzero_at_origin() {
        assert!(matches!(
            CompositionFunction::new("shift", "t + 1", 1.0, 1.0),
            Err(Error::InvalidComposition(_))
        ));
        assert!(CompositionFunction::new("x", "t", 0.5, 1.0).is_err());
    }

    #[test]
    fn builtin_values() {
        let odd = CompositionFunction::odd_power(1.0, 2.0);
        assert_eq!(odd.eval(-2.0), -4.0);
        assert_eq!(odd.eval(3.0), 9.0);
        let even = CompositionFunction::even_power(0.5, 3.0);
        assert_eq!(even.eval(-2.0), 4.0);
        let sp = CompositionFunction::signed_power(2.0, 3.0, 2.0).unwrap();
        assert_eq!(sp.eval(0.5), 0.25);
        assert_eq!(sp.eval(-3.0), -18.0);
        let cl = CompositionFunction::clamped(1.0, 1.5, 1.0).unwrap();
        assert_eq!(cl.eval(-10.0), -1.5);
        assert_eq!(cl.eval(0.5), 0.5);
        assert!(CompositionFunction::signed_power(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn builtins_satisfy_their_bound() {
        for p in [1.0, 2.0, 3.0, 1.5] {
            for xi in CompositionFunction::builtins(p) {
                let r = check_growth(&xi, p, xi.growth_constant(), &SampleSpec::default()).unwrap();
                assert!(r.passed(), "{} at p = {p}: {r:?}", xi.label());
            }
        }
    }

    #[test]
    fn growth_equality_case() {
        let xi = CompositionFunction::new("two", "2*|t|^2", 2.0, 2.0).unwrap();
        let r = check_growth(&xi, 2.0, 2.0, &SampleSpec::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_ratio, 2.0);
        assert_eq!(r.samples, 800);
    }

    #[test]
    fn growth_violation_at_zero() {
        let xi = CompositionFunction::new("root", "|t|^1", 2.0, 1.0).unwrap();
        let r = check_growth(&xi, 2.0, 1.0, &SampleSpec::default()).unwrap();
        assert_eq!(r.verdict, GrowthVerdict::Violation);
        assert_eq!(r.argmax_t.abs(), 1e-8);
    }

    #[test]
    fn growth_violation_at_infinity() {
        let xi = CompositionFunction::new("quartic", "|t|^4", 2.0, 1.0).unwrap();
        let r = check_growth(&xi, 2.0, 1.0, &SampleSpec::default()).unwrap();
        assert_eq!(r.verdict, GrowthVerdict::Violation);
        assert_eq!(r.argmax_t.abs(), 1e8);
    }

    #[test]
    fn jumps_shrink_under_refinement() {
        let xi = CompositionFunction::clamped(1.0, 1.5, 2.0).unwrap();
        let coarse = xi.max_adjacent_jump(-4.0, 4.0, 4);
        let fine = xi.max_adjacent_jump(-4.0, 4.0, 10);
        assert!(fine < coarse / 16.0);
    }

    #[test]
    fn serde_round_trip() {
        let xi = CompositionFunction::odd_power(-1.5, 3.0);
        let s = serde_json::to_string(&xi).unwrap();
        let back: CompositionFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xi);
        for t in [-2.5, 0.1, 7.0] {
            assert_eq!(back.eval(t), xi.eval(t));
        }
    }
}
