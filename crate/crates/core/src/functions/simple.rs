use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::real_pow;
use super::CompositionFunction;
use crate::error::{Error, Result};
use crate::geometry::{check_dim, transform_polytope, AxisBox, Point, Polytope, SLTransform};

/// Interior overlap tolerated between two supports of a simple function.
pub const OVERLAP_TOL: f64 = 1e-12;

/// One term `alpha * 1_P`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub alpha: f64,
    pub support: Arc<Polytope>,
}

impl Piece {
    pub fn new(alpha: f64, support: Polytope) -> Self {
        Piece {
            alpha,
            support: Arc::new(support),
        }
    }
}

/// `sum alpha_i 1_{P_i}` with pairwise interior-disjoint supports.
#[derive(Clone, Debug)]
pub struct SimpleFunction {
    dim: usize,
    pieces: Vec<Piece>,
}

impl SimpleFunction {
    /// Validates dimensions, finiteness, and pairwise disjointness.
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Result<Self> {
        check_dim(dim)?;
        for piece in &pieces {
            if piece.support.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: piece.support.dim(),
                });
            }
            if !piece.alpha.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let boxes: Vec<Option<AxisBox>> = pieces.iter().map(|p| interior_box(&p.support)).collect();
        for (i, j) in overlapping_pairs(&boxes, &boxes, true) {
            let v = pieces[i].support.intersection_volume(&pieces[j].support);
            if v > OVERLAP_TOL {
                return Err(Error::OverlappingInteriors {
                    first: i,
                    second: j,
                    volume: v,
                });
            }
        }
        Ok(SimpleFunction { dim, pieces })
    }

    /// For supports that are disjoint by construction (grid cells, cube
    /// runs, images of a valid function under a bijection). Not checked.
    pub fn from_disjoint(dim: usize, pieces: Vec<Piece>) -> Self {
        SimpleFunction { dim, pieces }
    }

    pub fn zero(dim: usize) -> Self {
        SimpleFunction {
            dim,
            pieces: Vec::new(),
        }
    }

    pub fn indicator(alpha: f64, support: Polytope) -> Self {
        let dim = support.dim();
        SimpleFunction {
            dim,
            pieces: vec![Piece::new(alpha, support)],
        }
    }

    /// `alpha` times the indicator of a union of interior-disjoint boxes.
    pub fn from_boxes(alpha: f64, dim: usize, boxes: &[AxisBox]) -> Self {
        let pieces = boxes
            .iter()
            .map(|b| Piece::new(alpha, Polytope::from_box(b)))
            .collect();
        SimpleFunction { dim, pieces }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.alpha == 0.0 || !p.support.is_full_dimensional())
    }

    /// Value at `x`; on shared boundaries the first piece wins (a null set).
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.support.contains(x, 0.0))
            .map_or(0.0, |p| p.alpha)
    }

    pub fn scale(&self, c: f64) -> SimpleFunction {
        SimpleFunction {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    alpha: c * p.alpha,
                    support: p.support.clone(),
                })
                .collect(),
        }
    }

    /// Pieces of `other` appended; the caller guarantees disjointness.
    pub fn concat_disjoint(&self, other: &SimpleFunction) -> SimpleFunction {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        SimpleFunction { dim: self.dim, pieces }
    }

    /// `(sum |alpha_i|^p mu_n(P_i))^(1/p)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }

    /// `sum |alpha_i|^p mu_n(P_i)`.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|q| q.alpha != 0.0)
            .map(|q| real_pow(q.alpha.abs(), p) * q.support.mu_measure())
            .sum()
    }

    /// Exact `||self - other||_{L^p(mu_n)}`.
    pub fn lp_distance(&self, other: &SimpleFunction, p: f64) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(lp_distance_pow(self, other, p).powf(1.0 / p))
    }

    /// `xi o h`: coefficients mapped, zero pieces dropped.
    pub fn compose(&self, xi: &CompositionFunction) -> SimpleFunction {
        SimpleFunction {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .filter_map(|p| {
                    let a = xi.eval(p.alpha);
                    (a != 0.0).then(|| Piece {
                        alpha: a,
                        support: p.support.clone(),
                    })
                })
                .collect(),
        }
    }

    /// `h o phi^{-1}`: every support carried to `phi(P_i)`.
    pub fn pullback(&self, phi: &SLTransform) -> Result<SimpleFunction> {
        if phi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: phi.dim(),
            });
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Ok(Piece {
                    alpha: p.alpha,
                    support: Arc::new(transform_polytope(phi, &p.support)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SimpleFunction { dim: self.dim, pieces })
    }
}

pub fn compose(xi: &CompositionFunction, h: &SimpleFunction) -> SimpleFunction {
    h.compose(xi)
}

pub fn lp_norm(h: &SimpleFunction, p: f64) -> f64 {
    h.lp_norm(p)
}

pub fn pullback(h: &SimpleFunction, phi: &SLTransform) -> Result<SimpleFunction> {
    h.pullback(phi)
}

fn interior_box(p: &Polytope) -> Option<AxisBox> {
    if p.is_full_dimensional() {
        p.bounding_box()
    } else {
        None
    }
}

fn boxes_overlap(a: &AxisBox, b: &AxisBox) -> bool {
    (0..a.dim()).all(|k| a.lower[k] < b.upper[k] && b.lower[k] < a.upper[k])
}

/// Index pairs `(i, j)` whose boxes have overlapping interiors, found by a
/// sweep along the first axis. With `same` set, `a` and `b` are the same
/// list and only `i < j` is reported.
fn overlapping_pairs(a: &[Option<AxisBox>], b: &[Option<AxisBox>], same: bool) -> Vec<(usize, usize)> {
    // Events: (lower, is_a, index), sorted by lower coordinate.
    let mut order: Vec<(f64, bool, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        if let Some(x) = x {
            order.push((x.lower[0], true, i));
        }
    }
    if !same {
        for (j, y) in b.iter().enumerate() {
            if let Some(y) = y {
                order.push((y.lower[0], false, j));
            }
        }
    }
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut active_a: Vec<usize> = Vec::new();
    let mut active_b: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &(lo, is_a, idx) in &order {
        let upper_of = |list: &[Option<AxisBox>], k: usize| list[k].as_ref().unwrap().upper[0];
        // Only the list about to be scanned needs pruning.
        if same || !is_a {
            active_a.retain(|&k| upper_of(a, k) > lo);
        }
        if !same && is_a {
            active_b.retain(|&k| upper_of(b, k) > lo);
        }
        if same {
            let me = a[idx].as_ref().unwrap();
            for &k in &active_a {
                if boxes_overlap(me, a[k].as_ref().unwrap()) {
                    out.push((k.min(idx), k.max(idx)));
                }
            }
            active_a.push(idx);
        } else if is_a {
            let me = a[idx].as_ref().unwrap();
            for &k in &active_b {
                if boxes_overlap(me, b[k].as_ref().unwrap()) {
                    out.push((idx, k));
                }
            }
            active_a.push(idx);
        } else {
            let me = b[idx].as_ref().unwrap();
            for &k in &active_a {
                if boxes_overlap(a[k].as_ref().unwrap(), me) {
                    out.push((k, idx));
                }
            }
            active_b.push(idx);
        }
    }
    out.sort_unstable();
    out
}

fn bbox_volume(b: &Option<AxisBox>) -> f64 {
    b.as_ref().map_or(0.0, AxisBox::volume)
}

/// `int |h - f|^p dmu_n`, split into the parts of each support not met by
/// the other function and the pairwise intersections. When a support is
/// contained in another, the intersection is that support unchanged, so
/// identical regions cancel exactly.
fn lp_distance_pow(h: &SimpleFunction, f: &SimpleFunction, p: f64) -> f64 {
    let hb: Vec<Option<AxisBox>> = h.pieces.iter().map(|q| interior_box(&q.support)).collect();
    let fb: Vec<Option<AxisBox>> = f.pieces.iter().map(|q| interior_box(&q.support)).collect();
    let mut h_rest: Vec<f64> = h.pieces.iter().map(|q| q.support.mu_measure()).collect();
    let mut f_rest: Vec<f64> = f.pieces.iter().map(|q| q.support.mu_measure()).collect();
    let mut total = 0.0;
    for (i, j) in overlapping_pairs(&hb, &fb, false) {
        let (pi, qj) = (&h.pieces[i].support, &f.pieces[j].support);
        // Clip the smaller body by the larger one.
        let common = if bbox_volume(&hb[i]) <= bbox_volume(&fb[j]) {
            pi.intersection(qj)
        } else {
            qj.intersection(pi)
        };
        let mu = common.mu_measure();
        if mu == 0.0 {
            continue;
        }
        h_rest[i] -= mu;
        f_rest[j] -= mu;
        let d = h.pieces[i].alpha - f.pieces[j].alpha;
        if d != 0.0 {
            total += real_pow(d.abs(), p) * mu;
        }
    }
    for (q, rest) in h.pieces.iter().zip(&h_rest) {
        total += real_pow(q.alpha.abs(), p) * rest.max(0.0);
    }
    for (q, rest) in f.pieces.iter().zip(&f_rest) {
        total += real_pow(q.alpha.abs(), p) * rest.max(0.0);
    }
    total
}

#[derive(Serialize, Deserialize)]
struct PolytopeDoc {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    alpha: f64,
    polytope: PolytopeDoc,
}

#[derive(Serialize, Deserialize)]
struct SimpleDoc {
    dim: usize,
    pieces: Vec<PieceDoc>,
}

impl Serialize for SimpleFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SimpleDoc {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|q| PieceDoc {
                    alpha: q.alpha,
                    polytope: PolytopeDoc {
                        dim: q.support.dim(),
                        vertices: q.support.vertices().map(<[f64]>::to_vec).collect(),
                    },
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SimpleDoc::deserialize(d)?;
        let pieces = doc
            .pieces
            .into_iter()
            .map(|q| {
                let pts: Vec<Point> = q.polytope.vertices.into_iter().map(Point).collect();
                Polytope::from_points_in(q.polytope.dim, &pts).map(|p| Piece::new(q.alpha, p))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        SimpleFunction::new(doc.dim, pieces).map_err(serde::de::Error::custom)
    }
}
