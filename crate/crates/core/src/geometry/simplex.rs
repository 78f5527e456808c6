use nalgebra::DMatrix;

use super::{check_dim, vecops, MomentMatrix, Point, VOLUME_EPS};
use crate::error::{Error, Result};

/// A nondegenerate `n`-simplex in `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.first().map(Point::dim).unwrap_or(0);
        check_dim(n)?;
        if vertices.len() != n + 1 {
            return Err(Error::SimplexVertexCount {
                expected: n + 1,
                found: vertices.len(),
            });
        }
        if let Some(v) = vertices.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.dim(),
            });
        }
        if !vertices.iter().all(Point::is_finite) {
            return Err(Error::NonFinite);
        }
        let refs: Vec<&[f64]> = vertices.iter().map(|v| v.coords()).collect();
        let det = edge_determinant(&refs);
        let scale = refs[1..]
            .iter()
            .map(|v| vecops::norm(&vecops::sub(v, refs[0])))
            .fold(0.0_f64, f64::max);
        let threshold = VOLUME_EPS * scale.powi(n as i32);
        if !(det.abs() > threshold) {
            return Err(Error::DegenerateSimplex { det, threshold });
        }
        Ok(Simplex { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        let refs: Vec<&[f64]> = self.vertices.iter().map(|v| v.coords()).collect();
        edge_determinant(&refs).abs() / factorial(self.dim())
    }
}

/// Second moment `int_S x x^t dx` of a simplex:
/// `vol(S) / ((n+1)(n+2)) * (sum_k v_k v_k^t + s s^t)` with `s = sum_k v_k`.
pub fn simplex_moment(s: &Simplex) -> MomentMatrix {
    let n = s.dim();
    let refs: Vec<&[f64]> = s.vertices.iter().map(|v| v.coords()).collect();
    let mut acc = DMatrix::zeros(n, n);
    accumulate_simplex_moment(&refs, &mut acc, 1.0);
    MomentMatrix::from_matrix(acc)
}

/// Adds `weight * int_S x x^t dx` to `acc` and returns the simplex volume.
/// No degeneracy check: a flat simplex contributes (approximately) zero.
pub(crate) fn accumulate_simplex_moment(verts: &[&[f64]], acc: &mut DMatrix<f64>, weight: f64) -> f64 {
    let n = verts.len() - 1;
    let vol = edge_determinant(verts).abs() / factorial(n);
    let c = weight * vol / (((n + 1) * (n + 2)) as f64);
    let mut sum = vec![0.0; n];
    for v in verts {
        for i in 0..n {
            sum[i] += v[i];
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut e = sum[i] * sum[j];
            for v in verts {
                e += v[i] * v[j];
            }
            let e = c * e;
            acc[(i, j)] += e;
            if i != j {
                acc[(j, i)] += e;
            }
        }
    }
    vol
}

pub(crate) fn simplex_volume(verts: &[&[f64]]) -> f64 {
    edge_determinant(verts).abs() / factorial(verts.len() - 1)
}

/// `det[v_1 - v_0, ..., v_n - v_0]`.
pub(crate) fn edge_determinant(verts: &[&[f64]]) -> f64 {
    let n = verts.len() - 1;
    match n {
        1 => verts[1][0] - verts[0][0],
        2 => {
            let (a0, a1) = (verts[1][0] - verts[0][0], verts[1][1] - verts[0][1]);
            let (b0, b1) = (verts[2][0] - verts[0][0], verts[2][1] - verts[0][1]);
            a0 * b1 - a1 * b0
        }
        _ => DMatrix::from_fn(n, n, |r, c| verts[c + 1][r] - verts[0][r]).determinant(),
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
