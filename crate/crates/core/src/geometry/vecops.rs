//! Small dense vector helpers on `&[f64]` slices.

use nalgebra::DMatrix;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `a + t (b - a)`.
#[inline]
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Lexicographic comparison with exact float ordering (NaN-free input).
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Vector orthogonal to the `n - 1` rows of `rows` (each of length `n`),
/// computed as the generalized cross product (signed cofactors).
pub fn generalized_cross(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    debug_assert_eq!(rows.len() + 1, n);
    if n == 1 {
        return vec![1.0];
    }
    let mut out = vec![0.0; n];
    for (col, o) in out.iter_mut().enumerate() {
        let minor = DMatrix::from_fn(n - 1, n - 1, |r, c| {
            let cc = if c < col { c } else { c + 1 };
            rows[r][cc]
        });
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        *o = sign * minor.determinant();
    }
    out
}

/// Orthonormal basis of the span of `dirs` by modified Gram-Schmidt; a
/// direction is kept when its residual exceeds `tol`.
pub fn orthonormal_basis(dirs: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for d in dirs {
        let mut r = d.clone();
        // Two passes for numerical orthogonality.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let len = norm(&r);
        if len > tol {
            r.iter_mut().for_each(|x| *x /= len);
            basis.push(r);
        }
    }
    basis
}

/// Largest bounding-box side length of a point set; tolerances scale with it.
pub fn extent_of<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> f64 {
    let mut lo: Vec<f64> = Vec::new();
    let mut hi: Vec<f64> = Vec::new();
    for p in points {
        if lo.is_empty() {
            lo = p.to_vec();
            hi = p.to_vec();
            continue;
        }
        for (k, x) in p.iter().enumerate() {
            lo[k] = lo[k].min(*x);
            hi[k] = hi[k].max(*x);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(a, b)| b - a)
        .fold(f64::MIN_POSITIVE, f64::max)
}
