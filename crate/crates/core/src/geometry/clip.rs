use super::vecops::{self, dot};
use super::Polytope;
use crate::error::{Error, Result};

/// The two halves returned by [`halfspace_slice`].
#[derive(Clone, Debug)]
pub struct Slice {
    /// `P ∩ {x.u <= c_hi}`.
    pub below: Polytope,
    /// `P ∩ {x.u >= c_lo}`.
    pub above: Polytope,
}

impl Slice {
    /// `below ∩ above = P ∩ {c_lo <= x.u <= c_hi}`.
    pub fn overlap(&self) -> Polytope {
        self.below.intersection(&self.above)
    }

    /// True when one of the halves is lower-dimensional (measure zero).
    pub fn has_empty_half(&self) -> bool {
        !self.below.is_full_dimensional() || !self.above.is_full_dimensional()
    }
}

/// Splits `p` by the slab `c_lo <= x.u <= c_hi` into two convex pieces whose
/// union is `p` and whose intersection is `p` restricted to the slab.
pub fn halfspace_slice(p: &Polytope, u: &[f64], c_lo: f64, c_hi: f64) -> Result<Slice> {
    if u.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: u.len(),
        });
    }
    if !(c_lo <= c_hi) {
        return Err(Error::InvalidArgument(format!("slab bounds out of order: {c_lo} > {c_hi}")));
    }
    if vecops::norm(u) == 0.0 || !u.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidArgument("slice direction must be finite and nonzero".into()));
    }
    let neg: Vec<f64> = u.iter().map(|x| -x).collect();
    Ok(Slice {
        below: clip_halfspace(p, u, c_hi),
        above: clip_halfspace(p, &neg, -c_lo),
    })
}

/// `p ∩ {x : a.x <= b}`.
///
/// Full-dimensional polygons are clipped by walking the boundary; otherwise
/// the result is the hull of the kept vertices and the crossing points of
/// the edges that straddle the hyperplane.
pub fn clip_halfspace(p: &Polytope, a: &[f64], b: f64) -> Polytope {
    let n = p.dim();
    if p.is_empty() {
        return Polytope::empty(n);
    }
    let tol = p.incidence_tol() * vecops::norm(a);
    let side: Vec<f64> = p.vertices().map(|v| dot(a, v) - b).collect();
    if side.iter().all(|s| *s <= tol) {
        return p.clone();
    }
    if side.iter().all(|s| *s > tol) {
        return Polytope::empty(n);
    }
    let pts = if n == 2 && p.is_full_dimensional() {
        walk_polygon(p, &side, tol)
    } else {
        edge_crossings(p, &side, tol)
    };
    Polytope::from_raw_hull(n, &pts)
}

fn crossing(p: &[f64], q: &[f64], sp: f64, sq: f64) -> Vec<f64> {
    vecops::lerp(p, q, sp / (sp - sq))
}

fn walk_polygon(p: &Polytope, side: &[f64], tol: f64) -> Vec<Vec<f64>> {
    // Counter-clockwise ring around the vertex centroid.
    let m = p.num_vertices();
    let cx = p.vertices().map(|v| v[0]).sum::<f64>() / m as f64;
    let cy = p.vertices().map(|v| v[1]).sum::<f64>() / m as f64;
    let mut ring: Vec<usize> = (0..m).collect();
    ring.sort_by(|&i, &j| {
        let (vi, vj) = (p.vertex(i), p.vertex(j));
        let ai = (vi[1] - cy).atan2(vi[0] - cx);
        let aj = (vj[1] - cy).atan2(vj[0] - cx);
        ai.total_cmp(&aj)
    });
    let mut out = Vec::with_capacity(m + 2);
    for k in 0..m {
        let (i, j) = (ring[k], ring[(k + 1) % m]);
        let (si, sj) = (side[i], side[j]);
        if si <= tol {
            out.push(p.vertex(i).to_vec());
        }
        if (si < -tol && sj > tol) || (si > tol && sj < -tol) {
            out.push(crossing(p.vertex(i), p.vertex(j), si, sj));
        }
    }
    out
}

fn edge_crossings(p: &Polytope, side: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = p
        .vertices()
        .zip(side)
        .filter(|(_, s)| **s <= tol)
        .map(|(v, _)| v.to_vec())
        .collect();
    for (i, j) in p.edges() {
        let (si, sj) = (side[i], side[j]);
        if (si < -tol && sj > tol) || (si > tol && sj < -tol) {
            out.push(crossing(p.vertex(i), p.vertex(j), si, sj));
        }
    }
    out
}
