use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::hull::{self, RawFacet};
use super::simplex::{accumulate_simplex_moment, simplex_volume};
use super::vecops::{self, dot};
use super::{check_dim, MomentMatrix, Point, INCIDENCE_EPS, VERTEX_EQ_TOL};
use crate::error::{Error, Result};

/// A supporting hyperplane `normal . x = offset` with the polytope on the
/// side `normal . x <= offset`; `vertices` are the incident vertex indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl From<RawFacet> for Facet {
    fn from(f: RawFacet) -> Self {
        Facet {
            vertices: f.vertices,
            normal: f.normal,
            offset: f.offset,
        }
    }
}

/// Axis-aligned box `lower <= x <= upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        check_dim(lower.len())?;
        if lower.iter().chain(&upper).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidArgument("box lower corner exceeds upper corner".into()));
        }
        Ok(AxisBox { lower, upper })
    }

    /// Closed cube with the given lower corner and side length.
    pub fn cube(lower: Vec<f64>, side: f64) -> Result<Self> {
        let upper = lower.iter().map(|l| l + side).collect();
        AxisBox::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn sides(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }

    pub fn volume(&self) -> f64 {
        self.sides().iter().product()
    }

    /// All side lengths agree within `tol`.
    pub fn is_cube(&self, tol: f64) -> bool {
        let s = self.sides();
        s.iter().all(|x| (x - s[0]).abs() <= tol)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Closed-form `int_box x x^t dx`.
    pub fn moment(&self) -> MomentMatrix {
        let n = self.dim();
        let len = self.sides();
        let first: Vec<f64> = (0..n)
            .map(|k| (self.upper[k] * self.upper[k] - self.lower[k] * self.lower[k]) / 2.0)
            .collect();
        let second: Vec<f64> = (0..n)
            .map(|k| (self.upper[k].powi(3) - self.lower[k].powi(3)) / 3.0)
            .collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let rest: f64 = (0..n).filter(|&k| k != i && k != j).map(|k| len[k]).product();
            if i == j {
                second[i] * rest
            } else {
                first[i] * first[j] * rest
            }
        });
        MomentMatrix::from_matrix(m)
    }
}

/// A bounded convex polytope given by its extreme points.
///
/// Vertices are kept in lexicographic order. Full-dimensional polytopes also
/// carry their facets; lower-dimensional ones (including the empty set) are
/// Lebesgue-null and have zero moment.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    affine_dim: Option<usize>,
    coords: Vec<f64>,
    cuboid: Option<AxisBox>,
    facets: OnceLock<Vec<Facet>>,
}

impl Polytope {
    /// Convex hull of a point set; `points` may contain non-extreme points.
    pub fn from_points(points: &[Point]) -> Result<Self> {
        let n = points.first().map(Point::dim).ok_or_else(|| {
            Error::InvalidArgument("a polytope needs at least one point; use Polytope::empty".into())
        })?;
        Self::from_points_in(n, points)
    }

    pub fn from_points_in(n: usize, points: &[Point]) -> Result<Self> {
        check_dim(n)?;
        for p in points {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let raw: Vec<Vec<f64>> = points.iter().map(|p| p.0.clone()).collect();
        Ok(Self::from_raw_hull(n, &raw))
    }

    pub(crate) fn from_raw_hull(n: usize, raw: &[Vec<f64>]) -> Self {
        let h = hull::hull(raw, n);
        let facets = OnceLock::new();
        if h.affine_dim == Some(n) {
            let _ = facets.set(h.facets.into_iter().map(Facet::from).collect());
        } else {
            let _ = facets.set(Vec::new());
        }
        Polytope {
            dim: n,
            affine_dim: h.affine_dim,
            coords: h.vertices.concat(),
            cuboid: None,
            facets,
        }
    }

    /// Assembles a polytope from already-canonical parts (extreme points in
    /// lexicographic order and matching facets).
    pub(crate) fn from_parts(n: usize, affine_dim: Option<usize>, coords: Vec<f64>, facets: Vec<Facet>) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(facets);
        Polytope {
            dim: n,
            affine_dim,
            coords,
            cuboid: None,
            facets: cell,
        }
    }

    pub fn empty(n: usize) -> Self {
        let facets = OnceLock::new();
        let _ = facets.set(Vec::new());
        Polytope {
            dim: n,
            affine_dim: None,
            coords: Vec::new(),
            cuboid: None,
            facets,
        }
    }

    pub fn from_box(b: &AxisBox) -> Self {
        let n = b.dim();
        if b.sides().iter().any(|s| *s <= 0.0) {
            let corners = box_corners(b);
            return Self::from_raw_hull(n, &corners.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>());
        }
        Polytope {
            dim: n,
            affine_dim: Some(n),
            coords: box_corners(b),
            cuboid: Some(b.clone()),
            facets: OnceLock::new(),
        }
    }

    /// `conv{v_0, ..., v_n}`.
    pub fn simplex(vertices: &[Point]) -> Result<Self> {
        Self::from_points(vertices)
    }

    pub fn unit_cube(n: usize) -> Self {
        Self::from_box(&AxisBox::cube(vec![0.0; n], 1.0).expect("valid cube"))
    }

    /// `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut pts = vec![Point::origin(n)];
        pts.extend((0..n).map(|i| Point::basis(n, i)));
        Self::from_points(&pts).expect("valid simplex")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn affine_dim(&self) -> Option<usize> {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        self.affine_dim.is_none()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == Some(self.dim)
    }

    pub fn num_vertices(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn vertex_points(&self) -> Vec<Point> {
        self.vertices().map(|v| Point(v.to_vec())).collect()
    }

    /// The axis-aligned box this polytope was built from, if any.
    pub fn as_box(&self) -> Option<&AxisBox> {
        self.cuboid.as_ref()
    }

    /// Facets with outward unit normals (empty unless full-dimensional).
    pub fn facets(&self) -> &[Facet] {
        self.facets.get_or_init(|| match &self.cuboid {
            Some(b) => box_facets(b),
            None => Vec::new(),
        })
    }

    pub fn bounding_box(&self) -> Option<AxisBox> {
        if self.is_empty() {
            return None;
        }
        if let Some(b) = &self.cuboid {
            return Some(b.clone());
        }
        let mut lo = self.vertex(0).to_vec();
        let mut hi = lo.clone();
        for v in self.vertices() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Some(AxisBox { lower: lo, upper: hi })
    }

    /// Tolerance scale for incidence tests on this polytope.
    pub(crate) fn incidence_tol(&self) -> f64 {
        INCIDENCE_EPS * vecops::extent_of(self.vertices())
    }

    /// Membership in a full-dimensional polytope, with slack `tol` on every
    /// facet inequality. Lower-dimensional polytopes contain no point here:
    /// they are null sets for every measure used in this crate.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if !self.is_full_dimensional() {
            return false;
        }
        if let Some(b) = &self.cuboid {
            return x
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .all(|(v, (l, u))| *l - tol <= *v && *v <= *u + tol);
        }
        self.facets().iter().all(|f| dot(&f.normal, x) <= f.offset + tol)
    }

    /// Every vertex of `other` lies in `self` (so `other ⊆ self`).
    pub fn contains_polytope(&self, other: &Polytope, tol: f64) -> bool {
        other.vertices().all(|v| self.contains(v, tol))
    }

    /// Simplices (as vertex-index tuples) of the fan triangulation from the
    /// first vertex. Empty unless full-dimensional.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        let facets: Vec<Vec<usize>> = self.facets().iter().map(|f| f.vertices.clone()).collect();
        hull::triangulate(self.dim, self.num_vertices(), &facets)
    }

    /// Vertex pairs that span edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self.affine_dim {
            None | Some(0) => Vec::new(),
            Some(1) => vec![(0, 1)],
            Some(k) if k == self.dim => {
                let facets: Vec<Vec<usize>> = self.facets().iter().map(|f| f.vertices.clone()).collect();
                hull::edges(self.num_vertices(), &facets)
            }
            Some(_) => {
                let m = self.num_vertices();
                (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
            }
        }
    }

    /// Lebesgue volume.
    pub fn volume(&self) -> f64 {
        if !self.is_full_dimensional() {
            return 0.0;
        }
        if let Some(b) = &self.cuboid {
            return b.volume();
        }
        self.triangulation()
            .iter()
            .map(|s| {
                let vs: Vec<&[f64]> = s.iter().map(|&i| self.vertex(i)).collect();
                simplex_volume(&vs)
            })
            .sum()
    }

    /// `mu_n(P) = int_P |x|^2 dx = trace M(P)`.
    pub fn mu_measure(&self) -> f64 {
        polytope_moment(self).trace()
    }

    /// Vertex-set equality within `tol` per coordinate.
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        if self.dim != other.dim || self.num_vertices() != other.num_vertices() {
            return false;
        }
        let mut used = vec![false; other.num_vertices()];
        self.vertices().all(|v| {
            match other
                .vertices()
                .enumerate()
                .position(|(j, w)| !used[j] && vecops::approx_eq(v, w, tol))
            {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }

    /// `self ∩ other`. Convex, possibly empty or lower-dimensional.
    pub fn intersection(&self, other: &Polytope) -> Polytope {
        if let (Some(a), Some(b)) = (&self.cuboid, &other.cuboid) {
            let lower: Vec<f64> = a.lower.iter().zip(&b.lower).map(|(x, y)| x.max(*y)).collect();
            let upper: Vec<f64> = a.upper.iter().zip(&b.upper).map(|(x, y)| x.min(*y)).collect();
            if lower.iter().zip(&upper).any(|(l, u)| l > u) {
                return Polytope::empty(self.dim);
            }
            return Polytope::from_box(&AxisBox { lower, upper });
        }
        if !other.is_full_dimensional() {
            // Clip `other` by `self` instead; the result is the same set.
            if self.is_full_dimensional() {
                return other.intersection(self);
            }
            let pts: Vec<Point> = other
                .vertices()
                .filter(|v| self.vertices().any(|w| vecops::approx_eq(v, w, VERTEX_EQ_TOL)))
                .map(|v| Point(v.to_vec()))
                .collect();
            return Polytope::from_points_in(self.dim, &pts).unwrap_or_else(|_| Polytope::empty(self.dim));
        }
        let mut cur = self.clone();
        for f in other.facets() {
            if cur.is_empty() {
                break;
            }
            cur = super::clip::clip_halfspace(&cur, &f.normal, f.offset);
        }
        cur
    }

    /// Volume of `self ∩ other` with bounding-box rejection first.
    pub fn intersection_volume(&self, other: &Polytope) -> f64 {
        if !self.is_full_dimensional() || !other.is_full_dimensional() {
            return 0.0;
        }
        let (a, b) = (self.bounding_box().unwrap(), other.bounding_box().unwrap());
        let overlaps = (0..self.dim).all(|k| a.lower[k] < b.upper[k] && b.lower[k] < a.upper[k]);
        if !overlaps {
            return 0.0;
        }
        self.intersection(other).volume()
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeDoc {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeDoc {
            dim: self.dim,
            vertices: self.vertices().map(<[f64]>::to_vec).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PolytopeDoc::deserialize(d)?;
        let pts: Vec<Point> = doc.vertices.into_iter().map(Point).collect();
        Polytope::from_points_in(doc.dim, &pts).map_err(serde::de::Error::custom)
    }
}

/// `M(P) = int_P x x^t dx`; zero for lower-dimensional `P`.
pub fn polytope_moment(p: &Polytope) -> MomentMatrix {
    if !p.is_full_dimensional() {
        return MomentMatrix::zeros(p.dim);
    }
    if let Some(b) = &p.cuboid {
        return b.moment();
    }
    let mut acc = DMatrix::zeros(p.dim, p.dim);
    for s in p.triangulation() {
        let vs: Vec<&[f64]> = s.iter().map(|&i| p.vertex(i)).collect();
        accumulate_simplex_moment(&vs, &mut acc, 1.0);
    }
    MomentMatrix::from_matrix(acc)
}

fn box_corners(b: &AxisBox) -> Vec<f64> {
    let n = b.dim();
    let mut out = Vec::with_capacity(n << n);
    for mask in 0..(1usize << n) {
        for k in 0..n {
            let bit = (mask >> (n - 1 - k)) & 1;
            out.push(if bit == 1 { b.upper[k] } else { b.lower[k] });
        }
    }
    out
}

fn box_facets(b: &AxisBox) -> Vec<Facet> {
    let n = b.dim();
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        for side in 0..2 {
            let vertices = (0..(1usize << n))
                .filter(|mask| (mask >> (n - 1 - k)) & 1 == side)
                .collect();
            let mut normal = vec![0.0; n];
            normal[k] = if side == 1 { 1.0 } else { -1.0 };
            let offset = if side == 1 { b.upper[k] } else { -b.lower[k] };
            out.push(Facet {
                vertices,
                normal,
                offset,
            });
        }
    }
    out
}
