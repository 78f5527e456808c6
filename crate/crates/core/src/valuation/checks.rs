use serde::{Deserialize, Serialize};

use super::{RotationTerm, Valuation};
use crate::error::{Error, Result};
use crate::functions::{lattice_join_meet, GridFunction, Piece, SimpleFunction};
use crate::geometry::{polytope_moment, MomentMatrix, Polytope, SLTransform};

/// `||V(h v f) + V(h ^ f) - V(h) - V(f)||_F`.
pub fn valuation_residual(v: &dyn Valuation, h: &GridFunction, f: &GridFunction) -> Result<f64> {
    let (join, meet) = lattice_join_meet(h, f)?;
    let lhs = &v.evaluate(&join.to_simple())? + &v.evaluate(&meet.to_simple())?;
    let rhs = &v.evaluate(&h.to_simple())? + &v.evaluate(&f.to_simple())?;
    Ok((&lhs - &rhs).frobenius_norm())
}

/// `||V(h o phi^-1) - phi V(h) phi^t||_F / (1 + ||V(h)||_F)`.
pub fn covariance_residual(v: &dyn Valuation, h: &SimpleFunction, phi: &SLTransform) -> Result<f64> {
    if phi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: phi.dim(),
        });
    }
    let base = v.evaluate(h)?;
    let moved = v.evaluate(&h.pullback(phi)?)?;
    Ok((&moved - &base.congruence(phi.matrix())).frobenius_norm() / (1.0 + base.frobenius_norm()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub n: usize,
    pub value: MomentMatrix,
    pub symmetric_norm: f64,
    pub antisymmetric_norm: f64,
    /// `(A_21 - A_12) / 2`, for `n = 2` only.
    pub s_hat: Option<f64>,
    pub tolerance: f64,
    pub conformant: bool,
}

/// `V(0)` must be `s rho` in the plane and vanish for `n >= 3`.
pub fn zero_structure(v: &dyn Valuation, tol: f64) -> Result<ZeroReport> {
    let n = v.dim();
    let value = v.evaluate(&SimpleFunction::zero(n))?;
    let symmetric_norm = value.symmetric_part().frobenius_norm();
    let antisymmetric_norm = value.antisymmetric_part().frobenius_norm();
    let (s_hat, conformant) = if n == 2 {
        (
            Some((value.get(1, 0) - value.get(0, 1)) / 2.0),
            symmetric_norm <= tol && value.is_finite(),
        )
    } else {
        (None, value.frobenius_norm() <= tol)
    };
    Ok(ZeroReport {
        n,
        value,
        symmetric_norm,
        antisymmetric_norm,
        s_hat,
        tolerance: tol,
        conformant,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiSample {
    pub alpha: f64,
    pub xi_hat: f64,
    /// `s` read off this response alone (`n = 2`).
    pub s_alpha: Option<f64>,
    /// Relative Frobenius misfit of `A - s rho - xi_hat M(P)`.
    pub fit_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub n: usize,
    pub samples: Vec<XiSample>,
    /// Mean of the per-`alpha` values (`n = 2`).
    pub s_hat: Option<f64>,
    /// Largest deviation of a per-`alpha` `s` from the mean.
    pub s_spread: f64,
    pub max_fit_residual: f64,
}

impl Extraction {
    pub fn xi_at(&self, alpha: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.alpha == alpha).map(|s| s.xi_hat)
    }

    /// `sum xi_hat(alpha_i) M(P_i) + s_hat rho`, defined when every
    /// coefficient of `h` was sampled.
    pub fn reconstruct(&self, h: &SimpleFunction) -> Result<MomentMatrix> {
        if h.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: h.dim(),
            });
        }
        let mut acc = MomentMatrix::zeros(self.n);
        for piece in h.pieces() {
            let xi = self.xi_at(piece.alpha).ok_or_else(|| {
                Error::InvalidArgument(format!("coefficient {} was not among the sampled alphas", piece.alpha))
            })?;
            if xi != 0.0 {
                acc += &(polytope_moment(&piece.support) * xi);
            }
        }
        if let Some(s) = self.s_hat {
            if s != 0.0 {
                acc += &(RotationTerm::matrix() * s);
            }
        }
        Ok(acc)
    }
}

/// Reads `xi(alpha)` and `s` off the responses `V(alpha 1_P)`, using the
/// convention `V(alpha 1_P) - s rho = xi(alpha) M(P)`.
pub fn extract_xi_and_s(v: &dyn Valuation, alphas: &[f64], p: &Polytope) -> Result<Extraction> {
    let n = v.dim();
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.dim(),
        });
    }
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite);
    }
    let m = polytope_moment(p);
    let m_norm2 = m.frobenius_dot(&m);
    if !p.is_full_dimensional() || m_norm2 == 0.0 {
        return Err(Error::DegenerateSupport);
    }
    let m_norm = m_norm2.sqrt();
    let responses: Vec<MomentMatrix> = alphas
        .iter()
        .map(|&a| v.evaluate(&SimpleFunction::indicator(a, p.clone())))
        .collect::<Result<_>>()?;

    let s_alpha: Vec<Option<f64>> = responses
        .iter()
        .map(|a| (n == 2).then(|| (a.get(1, 0) - a.get(0, 1)) / 2.0))
        .collect();
    let s_hat = if n == 2 && !alphas.is_empty() {
        Some(s_alpha.iter().flatten().sum::<f64>() / alphas.len() as f64)
    } else {
        None
    };
    let s_spread = match s_hat {
        Some(s) => s_alpha.iter().flatten().map(|x| (x - s).abs()).fold(0.0, f64::max),
        None => 0.0,
    };

    let mut samples = Vec::with_capacity(alphas.len());
    for ((&alpha, a), s_a) in alphas.iter().zip(&responses).zip(s_alpha) {
        let xi_hat = a.symmetric_part().frobenius_dot(&m) / m_norm2;
        let mut rest = a - &(&m * xi_hat);
        if let Some(s) = s_hat {
            rest = &rest - &(RotationTerm::matrix() * s);
        }
        samples.push(XiSample {
            alpha,
            xi_hat,
            s_alpha: s_a,
            fit_residual: rest.frobenius_norm() / m_norm,
        });
    }
    let max_fit_residual = samples.iter().map(|s| s.fit_residual).fold(0.0, f64::max);
    Ok(Extraction {
        n,
        samples,
        s_hat,
        s_spread,
        max_fit_residual,
    })
}

/// `||[V(h) - V(0)] - sum_i [V(alpha_i 1_{P_i}) - V(0)]||_F` for
/// `h = sum alpha_i 1_{P_i}`, all coefficients of one sign. With disjoint
/// interiors `h` is both the join (nonnegative case) and the meet
/// (nonpositive case) of its pieces.
pub fn decomposition_residual(v: &dyn Valuation, pieces: &[(f64, Polytope)]) -> Result<f64> {
    let nonneg = pieces.iter().all(|(a, _)| *a >= 0.0);
    let nonpos = pieces.iter().all(|(a, _)| *a <= 0.0);
    if !nonneg && !nonpos {
        return Err(Error::MixedSigns);
    }
    let n = v.dim();
    let h = SimpleFunction::new(n, pieces.iter().map(|(a, p)| Piece::new(*a, p.clone())).collect())?;
    let zero = v.evaluate(&SimpleFunction::zero(n))?;
    let whole = &v.evaluate(&h)? - &zero;
    let mut parts = MomentMatrix::zeros(n);
    for piece in h.pieces() {
        let single = SimpleFunction::from_disjoint(n, vec![piece.clone()]);
        parts += &(&v.evaluate(&single)? - &zero);
    }
    Ok((&whole - &parts).frobenius_norm())
}
