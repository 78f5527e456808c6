//! Extreme points, facets and fan triangulation for small point sets.
//!
//! Facets in dimension >= 3 are found by enumerating affinely independent
//! `n`-subsets and keeping the supporting hyperplanes. This is cubic-ish in
//! the point count but exact in its combinatorics, which is all the moment
//! code relies on. The plane case uses a monotone chain.

use super::vecops::{self, dot, lex_cmp};
use super::INCIDENCE_EPS;

#[derive(Clone, Debug, PartialEq)]
pub struct RawFacet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug)]
pub struct Hull {
    /// Extreme points in lexicographic order.
    pub vertices: Vec<Vec<f64>>,
    /// `None` for the empty set.
    pub affine_dim: Option<usize>,
    /// Facets (full-dimensional hulls only), indices into `vertices`.
    pub facets: Vec<RawFacet>,
}

/// Fixed-width bitset over point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    pub fn full(len: usize) -> Self {
        let mut b = Bits::new(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }
    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    pub fn and_assign(&mut self, o: &Bits) {
        self.0.iter_mut().zip(&o.0).for_each(|(a, b)| *a &= b);
    }
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, bits)| {
            (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

/// Convex hull of `points` in `R^n`.
pub fn hull(points: &[Vec<f64>], n: usize) -> Hull {
    if points.is_empty() {
        return Hull {
            vertices: Vec::new(),
            affine_dim: None,
            facets: Vec::new(),
        };
    }
    let extent = vecops::extent_of(points.iter().map(|p| p.as_slice()));
    let pts = dedupe(points, 1e-12 * extent);
    let eps = INCIDENCE_EPS * extent;

    let dirs: Vec<Vec<f64>> = pts[1..].iter().map(|p| vecops::sub(p, &pts[0])).collect();
    let basis = vecops::orthonormal_basis(&dirs, eps);
    let k = basis.len();

    let (extreme, facets) = if k == n {
        full_hull(&pts, n, eps)
    } else if k == 0 {
        (vec![0], Vec::new())
    } else {
        let projected: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let d = vecops::sub(p, &pts[0]);
                basis.iter().map(|b| dot(&d, b)).collect()
            })
            .collect();
        let (ext, _) = full_hull(&projected, k, eps);
        (ext, Vec::new())
    };

    // Canonical order and facet remapping.
    let mut order = extreme.clone();
    order.sort_by(|&a, &b| lex_cmp(&pts[a], &pts[b]));
    let mut remap = vec![usize::MAX; pts.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let facets = facets
        .into_iter()
        .map(|f| {
            let mut vs: Vec<usize> = f
                .vertices
                .iter()
                .filter_map(|&i| (remap[i] != usize::MAX).then_some(remap[i]))
                .collect();
            vs.sort_unstable();
            RawFacet {
                vertices: vs,
                ..f
            }
        })
        .collect();
    Hull {
        vertices: order.iter().map(|&i| pts[i].clone()).collect(),
        affine_dim: Some(k),
        facets,
    }
}

fn dedupe(points: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| vecops::approx_eq(p, q, tol)) {
            out.push(p.clone());
        }
    }
    out
}

/// Extreme-point indices and facets of a full-dimensional point set.
fn full_hull(pts: &[Vec<f64>], n: usize, eps: f64) -> (Vec<usize>, Vec<RawFacet>) {
    match n {
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, p) in pts.iter().enumerate() {
                if p[0] < pts[lo][0] {
                    lo = i;
                }
                if p[0] > pts[hi][0] {
                    hi = i;
                }
            }
            let facets = vec![
                RawFacet {
                    vertices: vec![lo],
                    normal: vec![-1.0],
                    offset: -pts[lo][0],
                },
                RawFacet {
                    vertices: vec![hi],
                    normal: vec![1.0],
                    offset: pts[hi][0],
                },
            ];
            (vec![lo, hi], facets)
        }
        2 => monotone_chain(pts, eps),
        _ => brute_force_hull(pts, n, eps),
    }
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull; collinear points are dropped.
fn monotone_chain(pts: &[Vec<f64>], eps: f64) -> (Vec<usize>, Vec<RawFacet>) {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| lex_cmp(&pts[a], &pts[b]));
    // Area tolerance: eps (a length) times a span of order the extent.
    let extent = vecops::extent_of(pts.iter().map(|p| p.as_slice()));
    let tol = eps * extent;
    let mut ring: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = ring.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while ring.len() >= start + 2
                && cross2(&pts[ring[ring.len() - 2]], &pts[ring[ring.len() - 1]], &pts[i]) <= tol
            {
                ring.pop();
            }
            ring.push(i);
        }
        ring.pop();
    }
    let m = ring.len();
    let facets = (0..m)
        .map(|e| {
            let (a, b) = (ring[e], ring[(e + 1) % m]);
            let d = vecops::sub(&pts[b], &pts[a]);
            let len = vecops::norm(&d);
            let normal = vec![d[1] / len, -d[0] / len];
            let offset = dot(&normal, &pts[a]);
            let mut vs = vec![a, b];
            vs.sort_unstable();
            RawFacet {
                vertices: vs,
                normal,
                offset,
            }
        })
        .collect();
    (ring, facets)
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn brute_force_hull(pts: &[Vec<f64>], n: usize, eps: f64) -> (Vec<usize>, Vec<RawFacet>) {
    let m = pts.len();
    let extent = vecops::extent_of(pts.iter().map(|p| p.as_slice()));
    let cross_floor = 1e-9 * extent.powi(n as i32 - 1);
    let mut facets: Vec<RawFacet> = Vec::new();
    let mut sets: Vec<Bits> = Vec::new();
    let mut combo: Vec<usize> = (0..n).collect();
    loop {
        let covered = sets.iter().any(|s| combo.iter().all(|&i| s.get(i)));
        if !covered {
            let rows: Vec<Vec<f64>> = combo[1..].iter().map(|&i| vecops::sub(&pts[i], &pts[combo[0]])).collect();
            let mut normal = vecops::generalized_cross(&rows, n);
            let len = vecops::norm(&normal);
            if len > cross_floor {
                normal.iter_mut().for_each(|x| *x /= len);
                let base = &pts[combo[0]];
                let mut on = Bits::new(m);
                let (mut pos, mut neg) = (false, false);
                for (j, p) in pts.iter().enumerate() {
                    let d = dot(&normal, p) - dot(&normal, base);
                    if d > eps {
                        pos = true;
                    } else if d < -eps {
                        neg = true;
                    } else {
                        on.set(j);
                    }
                    if pos && neg {
                        break;
                    }
                }
                if !(pos && neg) {
                    if pos {
                        normal.iter_mut().for_each(|x| *x = -*x);
                    }
                    let offset = dot(&normal, base);
                    facets.push(RawFacet {
                        vertices: on.ones().collect(),
                        normal,
                        offset,
                    });
                    sets.push(on);
                }
            }
        }
        if !next_combination(&mut combo, m) {
            break;
        }
    }
    let extreme: Vec<usize> = (0..m)
        .filter(|&v| {
            let mut meet = Bits::full(m);
            let mut any = false;
            for s in sets.iter().filter(|s| s.get(v)) {
                meet.and_assign(s);
                any = true;
            }
            any && meet.count() == 1
        })
        .collect();
    (extreme, facets)
}

/// Fan triangulation over the face lattice.
///
/// Each `k`-face is coned from its smallest vertex index over those of its
/// `(k-1)`-faces that avoid that vertex. Faces are vertex-index sets; the
/// facets of a face `F` are the inclusion-maximal proper sets `F ∩ G` for
/// facets `G` of the polytope.
pub fn triangulate(n: usize, num_vertices: usize, facets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let facet_bits: Vec<Bits> = facets
        .iter()
        .map(|f| {
            let mut b = Bits::new(num_vertices);
            f.iter().for_each(|&i| b.set(i));
            b
        })
        .collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n + 1);
    let all = Bits::full(num_vertices);
    cone(&all, n, &facet_bits, &mut prefix, &mut out);
    out
}

fn cone(face: &Bits, k: usize, facets: &[Bits], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let apex = face.ones().next().expect("faces are nonempty");
    if k == 0 {
        let mut s = prefix.clone();
        s.push(apex);
        out.push(s);
        return;
    }
    let size = face.count();
    let mut cands: Vec<Bits> = Vec::new();
    for f in facets {
        let mut c = face.clone();
        c.and_assign(f);
        let cnt = c.count();
        if cnt >= k && cnt < size && !cands.contains(&c) {
            cands.push(c);
        }
    }
    let maximal: Vec<&Bits> = cands
        .iter()
        .filter(|c| !cands.iter().any(|d| d != *c && c.is_subset(d)))
        .collect();
    prefix.push(apex);
    for g in maximal {
        if !g.get(apex) {
            cone(g, k - 1, facets, prefix, out);
        }
    }
    prefix.pop();
}

/// Vertex pairs spanning an edge (1-face) of a full-dimensional polytope.
pub fn edges(num_vertices: usize, facets: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let facet_bits: Vec<Bits> = facets
        .iter()
        .map(|f| {
            let mut b = Bits::new(num_vertices);
            f.iter().for_each(|&i| b.set(i));
            b
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..num_vertices {
        for j in i + 1..num_vertices {
            let mut meet = Bits::full(num_vertices);
            let mut any = false;
            for f in facet_bits.iter().filter(|f| f.get(i) && f.get(j)) {
                meet.and_assign(f);
                any = true;
            }
            if any && meet.count() == 2 {
                out.push((i, j));
            }
        }
    }
    out
}
