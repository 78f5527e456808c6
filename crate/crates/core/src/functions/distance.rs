use serde::{Deserialize, Serialize};

use super::expr::real_pow;
use crate::error::{Error, Result};
use crate::geometry::{vecops, AxisBox, Polytope};

/// The approximating set in [`indicator_distance`].
#[derive(Clone, Debug)]
pub enum Approximant {
    Polytope(Polytope),
    /// Interior-disjoint boxes, e.g. dyadic inner cells or runs.
    Boxes(Vec<AxisBox>),
}

impl Approximant {
    fn pieces(&self) -> Vec<Polytope> {
        match self {
            Approximant::Polytope(p) => vec![p.clone()],
            Approximant::Boxes(bs) => bs.iter().map(Polytope::from_box).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorDistance {
    /// `||alpha 1_A - alpha 1_P||_{L^p(mu_n)}`.
    pub exact: f64,
    /// `|alpha| a^(2/p) lambda(A △ P)^(1/p)`.
    pub bound: f64,
    /// `lambda(A △ P)`.
    pub symmetric_difference_volume: f64,
    /// `mu_n(A △ P)`.
    pub symmetric_difference_mu: f64,
    /// Radius `a` used for the bound.
    pub radius: f64,
}

/// Distance between the indicators of an approximant `A` and `P`, both
/// scaled by `alpha`. Without `ball_radius`, requires `A ⊆ P` and takes `a`
/// to be the largest vertex norm of `P`.
pub fn indicator_distance(
    alpha: f64,
    approx: &Approximant,
    p_target: &Polytope,
    p: f64,
    ball_radius: Option<f64>,
) -> Result<IndicatorDistance> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be >= 1")));
    }
    let n = p_target.dim();
    let pieces = approx.pieces();
    if let Some(q) = pieces.iter().find(|q| q.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.dim(),
        });
    }
    let tol = 1e-12 * vecops::extent_of(p_target.vertices()).max(1.0);
    let contained = pieces.iter().all(|q| p_target.contains_polytope(q, tol) || !q.is_full_dimensional());
    let max_norm = |ps: &mut dyn Iterator<Item = &Polytope>| {
        ps.flat_map(|q| q.vertices().map(vecops::norm).collect::<Vec<_>>())
            .fold(0.0f64, f64::max)
    };

    let (vol, mu, radius) = if contained && ball_radius.is_none() {
        let a_vol: f64 = pieces.iter().map(Polytope::volume).sum();
        let a_mu: f64 = pieces.iter().map(Polytope::mu_measure).sum();
        let radius = max_norm(&mut std::iter::once(p_target));
        (
            (p_target.volume() - a_vol).max(0.0),
            (p_target.mu_measure() - a_mu).max(0.0),
            radius,
        )
    } else {
        let Some(radius) = ball_radius else {
            return Err(Error::ContainmentViolation);
        };
        let needed = max_norm(&mut pieces.iter().chain(std::iter::once(p_target)));
        if needed > radius * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "ball radius {radius} does not contain both sets (needs {needed})"
            )));
        }
        let mut vol = p_target.volume();
        let mut mu = p_target.mu_measure();
        for q in &pieces {
            let common = q.intersection(p_target);
            vol += q.volume() - 2.0 * common.volume();
            mu += q.mu_measure() - 2.0 * common.mu_measure();
        }
        (vol.max(0.0), mu.max(0.0), radius)
    };
    let a = alpha.abs();
    Ok(IndicatorDistance {
        exact: a * mu.powf(1.0 / p),
        bound: a * real_pow(radius, 2.0 / p) * vol.powf(1.0 / p),
        symmetric_difference_volume: vol,
        symmetric_difference_mu: mu,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dyadic_inner_cubes;

    #[test]
    fn identical_sets() {
        let t = Polytope::standard_simplex(2);
        let d = indicator_distance(2.0, &Approximant::Polytope(t.clone()), &t, 1.0, None).unwrap();
        assert_eq!(d.exact, 0.0);
        assert_eq!(d.bound, 0.0);
    }

    #[test]
    fn triangle_inner_cells() {
        let t = Polytope::standard_simplex(2);
        let (cells, gap) = dyadic_inner_cubes(&t, 0.25).unwrap();
        let d = indicator_distance(1.0, &Approximant::Boxes(cells.clone()), &t, 1.0, None).unwrap();
        assert!((d.symmetric_difference_volume - 0.125).abs() < 1e-15);
        assert!((d.symmetric_difference_volume - gap).abs() < 1e-15);
        assert_eq!(d.radius, 1.0);
        assert!((d.bound - 0.125).abs() < 1e-15);
        // mu(T) = 1/6; six cells [i/4,(i+1)/4]x[j/4,(j+1)/4] with i+j <= 2.
        let cells_mu: f64 = cells.iter().map(|c| c.moment().trace()).sum();
        assert!((d.exact - (1.0 / 6.0 - cells_mu)).abs() < 1e-15);
        assert!(d.exact <= d.bound);
    }

    #[test]
    fn containment_required_without_radius() {
        let t = Polytope::standard_simplex(2);
        let outside = Approximant::Boxes(vec![AxisBox::cube(vec![0.5, 0.5], 0.5).unwrap()]);
        assert_eq!(
            indicator_distance(1.0, &outside, &t, 2.0, None).unwrap_err(),
            Error::ContainmentViolation
        );
        let d = indicator_distance(1.0, &outside, &t, 2.0, Some(2.0)).unwrap();
        // The box meets T only along a corner point.
        assert!((d.symmetric_difference_volume - 0.75).abs() < 1e-15);
        assert!(d.exact <= d.bound);
    }
}
