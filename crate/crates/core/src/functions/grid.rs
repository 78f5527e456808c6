use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CompositionFunction, Piece, SimpleFunction};
use crate::error::{Error, Result};
use crate::geometry::{check_dim, is_dyadic, AxisBox, Polytope};

/// A function constant on the cells `[i delta, (i+1) delta] x ...` of a
/// dyadic grid and zero elsewhere. Zero-valued cells are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    dim: usize,
    delta: f64,
    cells: BTreeMap<Vec<i64>, f64>,
}

impl GridFunction {
    pub fn new<I>(dim: usize, delta: f64, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, f64)>,
    {
        let mut g = Self::zero(dim, delta)?;
        for (index, value) in cells {
            g.insert(index, value)?;
        }
        Ok(g)
    }

    pub fn zero(dim: usize, delta: f64) -> Result<Self> {
        check_dim(dim)?;
        if !is_dyadic(delta) {
            return Err(Error::InvalidArgument(format!("grid width {delta} is not 2^-k with k >= 0")));
        }
        Ok(GridFunction {
            dim,
            delta,
            cells: BTreeMap::new(),
        })
    }

    /// Sets the value on one cell; zero removes it.
    pub fn insert(&mut self, index: Vec<i64>, value: f64) -> Result<()> {
        if index.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: index.len(),
            });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite);
        }
        if value == 0.0 {
            self.cells.remove(&index);
        } else {
            self.cells.insert(index, value);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, index: &[i64]) -> f64 {
        self.cells.get(index).copied().unwrap_or(0.0)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&[i64], f64)> + '_ {
        self.cells.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn cell_box(&self, index: &[i64]) -> AxisBox {
        AxisBox {
            lower: index.iter().map(|&i| i as f64 * self.delta).collect(),
            upper: index.iter().map(|&i| (i + 1) as f64 * self.delta).collect(),
        }
    }

    /// The same function on the grid of width `delta` (a dyadic divisor).
    pub fn refine_to(&self, delta: f64) -> Result<GridFunction> {
        if !is_dyadic(delta) || delta > self.delta {
            return Err(Error::InvalidArgument(format!(
                "cannot refine grid width {} to {delta}",
                self.delta
            )));
        }
        let factor = (self.delta / delta).round() as i64;
        let mut out = GridFunction::zero(self.dim, delta)?;
        for (index, &value) in &self.cells {
            let mut offset = vec![0i64; self.dim];
            'sub: loop {
                let sub: Vec<i64> = index.iter().zip(&offset).map(|(i, o)| i * factor + o).collect();
                out.cells.insert(sub, value);
                for o in offset.iter_mut() {
                    *o += 1;
                    if *o < factor {
                        continue 'sub;
                    }
                    *o = 0;
                }
                break;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        let mut out = GridFunction {
            dim: self.dim,
            delta: self.delta,
            cells: BTreeMap::new(),
        };
        for (k, &v) in &self.cells {
            let w = c * v;
            if w != 0.0 {
                out.cells.insert(k.clone(), w);
            }
        }
        out
    }

    /// Cellwise `xi`, valid off the support because `xi(0) = 0`.
    pub fn compose(&self, xi: &CompositionFunction) -> GridFunction {
        let mut out = GridFunction {
            dim: self.dim,
            delta: self.delta,
            cells: BTreeMap::new(),
        };
        for (k, &v) in &self.cells {
            let w = xi.eval(v);
            if w != 0.0 {
                out.cells.insert(k.clone(), w);
            }
        }
        out
    }

    /// One box piece per cell.
    pub fn to_simple(&self) -> SimpleFunction {
        let pieces = self
            .cells
            .iter()
            .map(|(k, &v)| Piece {
                alpha: v,
                support: Arc::new(Polytope::from_box(&self.cell_box(k))),
            })
            .collect();
        SimpleFunction::from_disjoint(self.dim, pieces)
    }

    pub fn join(&self, other: &GridFunction) -> Result<GridFunction> {
        Ok(lattice_join_meet(self, other)?.0)
    }

    pub fn meet(&self, other: &GridFunction) -> Result<GridFunction> {
        Ok(lattice_join_meet(self, other)?.1)
    }
}

/// Cellwise `(max(h, f), min(h, f))`, absent cells counting as zero.
pub fn lattice_join_meet(h: &GridFunction, f: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    if h.dim != f.dim || h.delta != f.delta {
        return Err(Error::GridMismatch {
            left: h.delta,
            right: f.delta,
            left_dim: h.dim,
            right_dim: f.dim,
        });
    }
    let mut join = BTreeMap::new();
    let mut meet = BTreeMap::new();
    let keys: std::collections::BTreeSet<&Vec<i64>> = h.cells.keys().chain(f.cells.keys()).collect();
    for k in keys {
        let a = h.cells.get(k).copied().unwrap_or(0.0);
        let b = f.cells.get(k).copied().unwrap_or(0.0);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi != 0.0 {
            join.insert(k.clone(), hi);
        }
        if lo != 0.0 {
            meet.insert(k.clone(), lo);
        }
    }
    let wrap = |cells| GridFunction {
        dim: h.dim,
        delta: h.delta,
        cells,
    };
    Ok((wrap(join), wrap(meet)))
}

#[derive(Serialize, Deserialize)]
struct CellDoc {
    index: Vec<i64>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    dim: usize,
    delta: f64,
    cells: Vec<CellDoc>,
}

impl Serialize for GridFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridDoc {
            dim: self.dim,
            delta: self.delta,
            cells: self
                .cells
                .iter()
                .map(|(k, &v)| CellDoc {
                    index: k.clone(),
                    value: v,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = GridDoc::deserialize(d)?;
        GridFunction::new(doc.dim, doc.delta, doc.cells.into_iter().map(|c| (c.index, c.value)))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(i: i64, j: i64, v: f64) -> GridFunction {
        GridFunction::new(2, 1.0, [(vec![i, j], v)]).unwrap()
    }

    #[test]
    fn same_cell_max_min() {
        let (j, m) = lattice_join_meet(&cell(0, 0, 2.0), &cell(0, 0, 3.0)).unwrap();
        assert_eq!(j, cell(0, 0, 3.0));
        assert_eq!(m, cell(0, 0, 2.0));
    }

    #[test]
    fn disjoint_cells() {
        let (j, m) = lattice_join_meet(&cell(0, 0, 2.0), &cell(1, 0, 3.0)).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j.get(&[0, 0]), 2.0);
        assert_eq!(j.get(&[1, 0]), 3.0);
        assert!(m.is_empty());
    }

    #[test]
    fn negative_against_absent() {
        let h = cell(0, 0, -1.0);
        let f = GridFunction::zero(2, 1.0).unwrap();
        let (j, m) = lattice_join_meet(&h, &f).unwrap();
        assert!(j.is_empty());
        assert_eq!(m, h);
    }

    #[test]
    fn mismatched_grids() {
        let f = GridFunction::new(2, 0.5, [(vec![0, 0], 1.0)]).unwrap();
        assert!(matches!(
            lattice_join_meet(&cell(0, 0, 1.0), &f),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn refinement_splits_cells() {
        let g = cell(1, -1, 4.0).refine_to(0.25).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.get(&[4, -4]), 4.0);
        assert_eq!(g.get(&[7, -1]), 4.0);
        assert_eq!(g.get(&[8, -1]), 0.0);
        let a = cell(1, -1, 4.0).to_simple().lp_norm(2.0);
        let b = g.to_simple().lp_norm(2.0);
        assert!((a - b).abs() <= 1e-14 * a);
    }

    #[test]
    fn zero_cells_are_dropped() {
        let g = GridFunction::new(2, 1.0, [(vec![0, 0], 0.0), (vec![1, 1], 2.0)]).unwrap();
        assert_eq!(g.len(), 1);
        assert!(GridFunction::new(2, 1.0, [(vec![0], 1.0)]).is_err());
        assert!(GridFunction::zero(2, 0.3).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let g = GridFunction::new(3, 0.5, [(vec![0, 1, -2], 1.25), (vec![3, 0, 0], -7.0)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: GridFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
