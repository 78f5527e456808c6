//! Seeded generators for suite cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functions::{CompositionFunction, GridFunction, Piece, SimpleFunction};
use crate::geometry::{random_polytope, random_sl_matrix, AxisBox, Polytope, SLTransform};
use crate::seed;
use crate::valuation::ValuationSpec;

pub fn rng_for(case_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(case_seed)
}

/// `-2, -1.75, ..., 2`: the extraction grid.
pub fn alpha_grid() -> Vec<f64> {
    (0..17).map(|k| -2.0 + 0.25 * k as f64).collect()
}

/// A built-in `xi` for exponent `p`, and `s` drawn from `{-5, 0, 5}` in
/// the plane (zero otherwise).
pub fn random_spec(rng: &mut ChaCha8Rng, n: usize, p: f64) -> ValuationSpec {
    let mut family = CompositionFunction::builtins(p);
    let xi = family.swap_remove(rng.random_range(0..family.len()));
    let s = if n == 2 { [-5.0, 0.0, 5.0][rng.random_range(0..3)] } else { 0.0 };
    ValuationSpec::new(n, p, xi, s).expect("built-in specs are valid")
}

/// Up to `max_cells` cells in `[-2, 2)^n / delta` with values in
/// `[-3, 3]`; a few values are exact small integers so ties occur.
pub fn random_grid(rng: &mut ChaCha8Rng, n: usize, delta: f64, max_cells: usize) -> GridFunction {
    let span = (2.0 / delta) as i64;
    let count = rng.random_range(1..=max_cells);
    let cells: Vec<(Vec<i64>, f64)> = (0..count)
        .map(|_| {
            let index = (0..n).map(|_| rng.random_range(-span..span)).collect();
            let value = if rng.random_bool(0.25) {
                rng.random_range(-3i32..=3) as f64
            } else {
                rng.random_range(-3.0..=3.0)
            };
            (index, value)
        })
        .collect();
    GridFunction::new(n, delta, cells).expect("generated cells are valid")
}

/// A pair of grid functions sharing part of their support.
pub fn random_grid_pair(rng: &mut ChaCha8Rng, n: usize) -> (GridFunction, GridFunction) {
    let delta = [1.0, 0.5, 0.25][rng.random_range(0..3)];
    let h = random_grid(rng, n, delta, 6);
    let mut f = random_grid(rng, n, delta, 6);
    let shared: Vec<Vec<i64>> = h.cells().map(|(k, _)| k.to_vec()).collect();
    for k in shared {
        if rng.random_bool(0.5) {
            let v = if rng.random_bool(0.3) { h.get(&k) } else { rng.random_range(-3.0..=3.0) };
            f.insert(k, v).expect("same dimension");
        }
    }
    (h, f)
}

/// Either a random polytope indicator plus a disjoint cell, or a random
/// grid function.
pub fn random_simple(rng: &mut ChaCha8Rng, n: usize) -> Result<SimpleFunction> {
    if rng.random_bool(0.5) {
        let poly_seed = rng.random::<u64>();
        let p = random_polytope(poly_seed, n, rng.random_range(n + 1..=n + 6), 1.0)?;
        let far = AxisBox::cube(vec![2.0; n], 0.5)?;
        let a = rng.random_range(-3.0..=3.0);
        let b = rng.random_range(-3.0..=3.0);
        Ok(SimpleFunction::from_disjoint(
            n,
            vec![Piece::new(a, p), Piece::new(b, Polytope::from_box(&far))],
        ))
    } else {
        Ok(random_grid(rng, n, 0.5, 5).to_simple())
    }
}

/// A random `SL(n)` matrix whose condition number is at most `max_cond`,
/// found by redrawing with fewer shears when needed.
pub fn bounded_sl_matrix(case_seed: u64, n: usize, max_cond: f64) -> Result<SLTransform> {
    let mut shears = 2 * n;
    for attempt in 0..64u64 {
        let phi = random_sl_matrix(seed::derive(&[case_seed, attempt]), n, shears, 1.0)?;
        if phi.condition() <= max_cond {
            return Ok(phi);
        }
        if attempt % 8 == 7 && shears > 1 {
            shears -= 1;
        }
    }
    Err(Error::InvalidArgument(format!(
        "no SL({n}) draw with condition <= {max_cond} for seed {case_seed}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_covers_zero() {
        let g = alpha_grid();
        assert_eq!(g.len(), 17);
        assert_eq!(g[8], 0.0);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[16], 2.0);
    }

    #[test]
    fn bounded_matrices() {
        for s in 0..30 {
            for n in 2..=4 {
                let phi = bounded_sl_matrix(s, n, 50.0).unwrap();
                assert!(phi.condition() <= 50.0);
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_grid_pair(&mut rng_for(5), 3);
        let b = random_grid_pair(&mut rng_for(5), 3);
        assert_eq!(a, b);
        let s1 = random_spec(&mut rng_for(6), 3, 2.0);
        assert_eq!(s1.s, 0.0);
    }
}
