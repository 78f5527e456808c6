use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::functions::{check_growth, CompositionFunction, SampleSpec, SimpleFunction};
use crate::geometry::{check_dim, polytope_moment, MomentMatrix};

/// The quarter-turn `rho = [[0, -1], [1, 0]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RotationTerm;

impl RotationTerm {
    pub const ENTRIES: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];

    pub fn matrix() -> MomentMatrix {
        MomentMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]])
    }

    /// `||phi rho phi^t - rho||_F` for a 2x2 `phi`.
    pub fn invariance_residual(phi: &nalgebra::DMatrix<f64>) -> f64 {
        let rho = Self::matrix();
        (&rho.congruence(phi) - &rho).frobenius_norm()
    }
}

/// A matrix-valued map on simple functions, possibly opaque.
pub trait Valuation: Send + Sync {
    fn dim(&self) -> usize;

    fn exponent(&self) -> f64;

    fn evaluate(&self, h: &SimpleFunction) -> Result<MomentMatrix>;

    /// Set when concurrent calls are unsafe; the harness then runs serially.
    fn is_serial(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        "valuation".into()
    }
}

type Evaluator = dyn Fn(&SimpleFunction) -> Result<MomentMatrix> + Send + Sync;

/// A [`Valuation`] wrapping an arbitrary evaluator.
#[derive(Clone)]
pub struct BlackBoxValuation {
    label: String,
    dim: usize,
    exponent: f64,
    serial: bool,
    evaluator: Arc<Evaluator>,
}

impl BlackBoxValuation {
    pub fn new<F>(label: &str, dim: usize, exponent: f64, evaluator: F) -> Self
    where
        F: Fn(&SimpleFunction) -> Result<MomentMatrix> + Send + Sync + 'static,
    {
        BlackBoxValuation {
            label: label.to_string(),
            dim,
            exponent,
            serial: false,
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn serial(mut self, serial: bool) -> Self {
        self.serial = serial;
        self
    }
}

impl std::fmt::Debug for BlackBoxValuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlackBoxValuation")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("exponent", &self.exponent)
            .field("serial", &self.serial)
            .finish_non_exhaustive()
    }
}

impl Valuation for BlackBoxValuation {
    fn dim(&self) -> usize {
        self.dim
    }

    fn exponent(&self) -> f64 {
        self.exponent
    }

    fn evaluate(&self, h: &SimpleFunction) -> Result<MomentMatrix> {
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: h.dim(),
            });
        }
        (self.evaluator)(h)
    }

    fn is_serial(&self) -> bool {
        self.serial
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `K(h) = sum alpha_i M(P_i)`.
pub fn moment_of_simple(h: &SimpleFunction) -> MomentMatrix {
    let mut acc = MomentMatrix::zeros(h.dim());
    for piece in h.pieces() {
        if piece.alpha != 0.0 {
            acc += &(polytope_moment(&piece.support) * piece.alpha);
        }
    }
    acc
}

/// One member `Psi(h) = K(xi o h) + s rho` of the constructive family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValuationSpec {
    pub n: usize,
    pub p: f64,
    pub xi: CompositionFunction,
    pub s: f64,
}

impl ValuationSpec {
    pub fn new(n: usize, p: f64, xi: CompositionFunction, s: f64) -> Result<Self> {
        let spec = ValuationSpec { n, p, xi, s };
        spec.validate()?;
        Ok(spec)
    }

    /// Dimension, exponent, rotation and sampled growth checks.
    pub fn validate(&self) -> Result<()> {
        self.check_form()?;
        if self.xi.exponent() != self.p {
            return Err(Error::InvalidComposition(format!(
                "xi is declared for p = {}, the valuation for p = {}",
                self.xi.exponent(),
                self.p
            )));
        }
        let report = check_growth(&self.xi, self.p, self.xi.growth_constant(), &SampleSpec::default())?;
        if !report.passed() {
            return Err(Error::InvalidComposition(format!(
                "xi '{}' violates |xi(t)| <= {} |t|^{}: ratio {} at t = {}",
                self.xi.label(),
                report.d,
                report.p,
                report.max_ratio,
                report.argmax_t
            )));
        }
        Ok(())
    }

    fn check_form(&self) -> Result<()> {
        check_dim(self.n)?;
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponent p = {} must be >= 1", self.p)));
        }
        if !self.s.is_finite() {
            return Err(Error::NonFinite);
        }
        if self.s != 0.0 && self.n != 2 {
            return Err(Error::RotationInHighDim { n: self.n, s: self.s });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for ValuationSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            n: usize,
            p: f64,
            xi: CompositionFunction,
            #[serde(default)]
            s: f64,
        }
        let doc = Doc::deserialize(d)?;
        ValuationSpec::new(doc.n, doc.p, doc.xi, doc.s).map_err(serde::de::Error::custom)
    }
}

/// `K(xi o h)`, plus `s rho` when `n = 2`.
pub fn psi_evaluate(spec: &ValuationSpec, h: &SimpleFunction) -> Result<MomentMatrix> {
    spec.check_form()?;
    if h.dim() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: h.dim(),
        });
    }
    let mut m = moment_of_simple(&h.compose(&spec.xi));
    if spec.n == 2 && spec.s != 0.0 {
        m += &(RotationTerm::matrix() * spec.s);
    }
    Ok(m)
}

impl Valuation for ValuationSpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn exponent(&self) -> f64 {
        self.p
    }

    fn evaluate(&self, h: &SimpleFunction) -> Result<MomentMatrix> {
        psi_evaluate(self, h)
    }

    fn label(&self) -> String {
        format!("psi[n={}, p={}, xi={}, s={}]", self.n, self.p, self.xi.label(), self.s)
    }
}
