//! Inner approximation of a convex polytope by closed dyadic grid cells.

use super::{AxisBox, Polytope};
use crate::error::{Error, Result};

/// Cells of the grid `delta * Z^n` lying wholly inside a polytope, stored as
/// maximal runs along the first axis.
#[derive(Clone, Debug)]
pub struct InnerApproximation {
    pub delta: f64,
    /// Disjoint-interior boxes; each is a run of consecutive cells.
    pub runs: Vec<AxisBox>,
    /// Number of grid cells covered by the runs.
    pub cell_count: u64,
    /// `lambda(P) - sum lambda(cells) = lambda(P △ union of cells)`.
    pub gap: f64,
}

impl InnerApproximation {
    /// Expands the runs into individual closed cubes of side `delta`.
    pub fn cells(&self) -> Vec<AxisBox> {
        let mut out = Vec::with_capacity(self.cell_count as usize);
        for r in &self.runs {
            let count = ((r.upper[0] - r.lower[0]) / self.delta).round() as i64;
            let i0 = (r.lower[0] / self.delta).round() as i64;
            for i in 0..count {
                let mut lower = r.lower.clone();
                let mut upper = r.upper.clone();
                lower[0] = (i0 + i) as f64 * self.delta;
                upper[0] = (i0 + i + 1) as f64 * self.delta;
                out.push(AxisBox { lower, upper });
            }
        }
        out
    }
}

/// `delta = 2^-k` for some integer `k >= 0`.
pub fn is_dyadic(delta: f64) -> bool {
    delta > 0.0 && delta <= 1.0 && delta.is_finite() && delta.to_bits() & ((1u64 << 52) - 1) == 0
}

/// All grid cells `[i delta, (i+1) delta] x ...` contained in `p`, and the
/// measure of what they miss.
pub fn dyadic_inner_cubes(p: &Polytope, delta: f64) -> Result<(Vec<AxisBox>, f64)> {
    let approx = dyadic_inner_runs(p, delta)?;
    Ok((approx.cells(), approx.gap))
}

/// Run-compressed form of [`dyadic_inner_cubes`]; cost is linear in the
/// number of grid rows rather than cells.
pub fn dyadic_inner_runs(p: &Polytope, delta: f64) -> Result<InnerApproximation> {
    if !is_dyadic(delta) {
        return Err(Error::InvalidArgument(format!("grid width {delta} is not 2^-k with k >= 0")));
    }
    if !p.is_full_dimensional() {
        return Err(Error::InvalidArgument("inner cube approximation needs a full-dimensional polytope".into()));
    }
    let n = p.dim();
    let bb = p.bounding_box().expect("nonempty");
    let lo_idx: Vec<i64> = bb.lower.iter().map(|x| (x / delta).floor() as i64).collect();
    let hi_idx: Vec<i64> = bb.upper.iter().map(|x| (x / delta).ceil() as i64 - 1).collect();
    let tol = p.incidence_tol();
    let facets = p.facets();

    let mut runs = Vec::new();
    let mut cell_count = 0u64;
    let mut row: Vec<i64> = lo_idx[1..].to_vec();
    if lo_idx.iter().zip(&hi_idx).any(|(l, h)| l > h) {
        return Ok(InnerApproximation {
            delta,
            runs,
            cell_count,
            gap: p.volume(),
        });
    }
    'rows: loop {
        let (mut i_lo, mut i_hi) = (lo_idx[0], hi_idx[0]);
        for f in facets {
            let a = &f.normal;
            let rest: f64 = (1..n)
                .map(|k| {
                    let c = row[k - 1] as f64 * delta;
                    (a[k] * c).max(a[k] * (c + delta))
                })
                .sum();
            let r = f.offset + tol - rest;
            let a0 = a[0] * delta;
            if a0 > 0.0 {
                i_hi = i_hi.min((r / a0 - 1.0).floor() as i64);
            } else if a0 < 0.0 {
                i_lo = i_lo.max((r / a0).ceil() as i64);
            } else if r < 0.0 {
                i_hi = i_lo - 1;
            }
            if i_lo > i_hi {
                break;
            }
        }
        if i_lo <= i_hi {
            let mut lower = Vec::with_capacity(n);
            let mut upper = Vec::with_capacity(n);
            lower.push(i_lo as f64 * delta);
            upper.push((i_hi + 1) as f64 * delta);
            for &j in &row {
                lower.push(j as f64 * delta);
                upper.push((j + 1) as f64 * delta);
            }
            runs.push(AxisBox { lower, upper });
            cell_count += (i_hi - i_lo + 1) as u64;
        }
        // Odometer over the remaining axes.
        let mut k = 0;
        loop {
            if k == row.len() {
                break 'rows;
            }
            if row[k] < hi_idx[k + 1] {
                row[k] += 1;
                break;
            }
            row[k] = lo_idx[k + 1];
            k += 1;
        }
    }
    let cell_vol = delta.powi(n as i32);
    let gap = p.volume() - cell_count as f64 * cell_vol;
    Ok(InnerApproximation {
        delta,
        runs,
        cell_count,
        gap,
    })
}
