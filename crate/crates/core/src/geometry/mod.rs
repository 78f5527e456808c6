//! Exact convex-polytope machinery.
//!
//! Polytopes are stored as their extreme points in lexicographic order
//! together with a combinatorial facet list. All integration is exact up to
//! rounding: the degree-2 moment of a polytope is a sum of closed-form
//! simplex moments over a fan triangulation of its face lattice.

mod clip;
mod cubes;
mod hull;
mod matrix;
mod polytope;
mod random;
mod simplex;
mod transform;
pub(crate) mod vecops;

pub use clip::{clip_halfspace, halfspace_slice, Slice};
pub use cubes::{dyadic_inner_cubes, dyadic_inner_runs, is_dyadic, InnerApproximation};
pub use matrix::MomentMatrix;
pub use polytope::{polytope_moment, AxisBox, Facet, Polytope};
pub use random::random_polytope;
pub use simplex::{simplex_moment, Simplex};
pub use transform::{random_sl_matrix, transform_polytope, SLTransform};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 6;

/// Relative tolerance for simplex nondegeneracy, scaled by `scale^n`.
pub const VOLUME_EPS: f64 = 1e-12;

/// Per-coordinate tolerance for vertex-set equality.
pub const VERTEX_EQ_TOL: f64 = 1e-12;

/// Relative tolerance for incidence tests (point on hyperplane, rank).
pub(crate) const INCIDENCE_EPS: f64 = 1e-10;

/// A point of `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    /// Standard basis vector `e_i` (zero-based) in `R^n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        Point(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}
