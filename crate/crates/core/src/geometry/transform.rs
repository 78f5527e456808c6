use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::vecops::{self, lex_cmp};
use super::{check_dim, Facet, Polytope};
use crate::error::{Error, Result};

/// Default bound on `|det - 1|`.
pub const DET_TOLERANCE: f64 = 1e-9;

/// A linear map of determinant one, with its inverse cached.
#[derive(Clone, Debug, PartialEq)]
pub struct SLTransform {
    entries: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det_tolerance: f64,
}

impl SLTransform {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, DET_TOLERANCE)
    }

    pub fn with_tolerance(entries: DMatrix<f64>, det_tolerance: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        check_dim(entries.nrows())?;
        if !entries.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = (entries.determinant() - 1.0).abs();
        if !(deviation <= det_tolerance) {
            return Err(Error::NotSpecialLinear {
                deviation,
                tolerance: det_tolerance,
            });
        }
        let inverse = entries.clone().try_inverse().ok_or(Error::NotSpecialLinear {
            deviation,
            tolerance: det_tolerance,
        })?;
        Ok(SLTransform {
            entries,
            inverse,
            det_tolerance,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is in SL(n)")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn det_tolerance(&self) -> f64 {
        self.det_tolerance
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    /// Spectral condition number `sigma_max / sigma_min`.
    pub fn condition(&self) -> f64 {
        let sv = self.entries.clone().singular_values();
        sv.max() / sv.min()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.entries[(i, j)]).collect()).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &SLTransform) -> Result<SLTransform> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let tol = self.det_tolerance.max(other.det_tolerance);
        Self::with_tolerance(&self.entries * &other.entries, tol)
    }
}

impl Serialize for SLTransform {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SLTransform {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SLTransform::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// `phi(P)`: vertices mapped by `phi`, re-sorted lexicographically.
///
/// A linear bijection preserves the face lattice, so facets are carried
/// over combinatorially with normals mapped by `phi^{-t}`.
pub fn transform_polytope(phi: &SLTransform, p: &Polytope) -> Result<Polytope> {
    let n = p.dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phi.dim(),
        });
    }
    if p.is_empty() {
        return Ok(Polytope::empty(n));
    }
    let mapped: Vec<Vec<f64>> = p.vertices().map(|v| phi.apply(v)).collect();
    let mut order: Vec<usize> = (0..mapped.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&mapped[a], &mapped[b]));
    let mut remap = vec![0; mapped.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let coords: Vec<f64> = order.iter().flat_map(|&i| mapped[i].iter().copied()).collect();
    let inv_t = phi.inverse().transpose();
    let facets = p
        .facets()
        .iter()
        .map(|f| {
            let raw: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| inv_t[(i, j)] * f.normal[j]).sum())
                .collect();
            let len = vecops::norm(&raw);
            let mut vertices: Vec<usize> = f.vertices.iter().map(|&i| remap[i]).collect();
            vertices.sort_unstable();
            Facet {
                vertices,
                normal: raw.iter().map(|x| x / len).collect(),
                offset: f.offset / len,
            }
        })
        .collect();
    Ok(Polytope::from_parts(n, p.affine_dim(), coords, facets))
}

/// Product of `shear_count` elementary shears, each followed by a
/// determinant-one scaling `diag(.., k, .., 1/k, ..)`. Deterministic in
/// its arguments.
pub fn random_sl_matrix(seed: u64, n: usize, shear_count: usize, shear_bound: f64) -> Result<SLTransform> {
    if n < 2 {
        return Err(Error::InvalidArgument("random SL(n) matrices need n >= 2".into()));
    }
    check_dim(n)?;
    if !(shear_bound > 0.0 && shear_bound.is_finite()) {
        return Err(Error::InvalidArgument("shear bound must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::<f64>::identity(n, n);
    for _ in 0..shear_count {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let t = rng.random_range(-shear_bound..=shear_bound);
        // Row operation: row_i += t * row_j.
        for c in 0..n {
            let v = m[(j, c)];
            m[(i, c)] += t * v;
        }
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        let k = 2f64.powf(rng.random_range(-0.5..=0.5));
        for c in 0..n {
            m[(a, c)] *= k;
            m[(b, c)] /= k;
        }
    }
    SLTransform::new(m)
}
