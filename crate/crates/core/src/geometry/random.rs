use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_dim, Polytope};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 16;

/// Hull of `m_points` uniform samples in `[-scale, scale]^n`, redrawn until
/// full-dimensional. Deterministic in `seed`.
pub fn random_polytope(seed: u64, n: usize, m_points: usize, scale: f64) -> Result<Polytope> {
    check_dim(n)?;
    if m_points < n + 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least n + 1 = {} points, got {m_points}",
            n + 1
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let pts: Vec<Vec<f64>> = (0..m_points)
            .map(|_| (0..n).map(|_| rng.random_range(-scale..=scale)).collect())
            .collect();
        let p = Polytope::from_raw_hull(n, &pts);
        if p.is_full_dimensional() {
            return Ok(p);
        }
    }
    Err(Error::DegenerateDraw {
        attempts: MAX_ATTEMPTS,
    })
}
