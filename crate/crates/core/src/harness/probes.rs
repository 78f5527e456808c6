use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{CompositionFunction, FunctionSequence, SimpleFunction};
use crate::geometry::{dyadic_inner_runs, polytope_moment, MomentMatrix, Polytope};
use crate::valuation::{moment_monte_carlo, moment_of_simple, MonteCarloSampler, Valuation};
use crate::{parallel, seed};

/// Norm level below which the residual must already be under tolerance.
pub const CONTINUITY_NORM_LEVEL: f64 = 1e-6;

/// Trailing rows over which the residual must not increase.
pub const MONOTONE_WINDOW: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub k: usize,
    /// `||h_k - h||_{L^p(mu_n)}`.
    pub norm: f64,
    /// `||V(h_k) - V(h)||_F`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub sequence: String,
    pub valuation: String,
    pub p: f64,
    pub tolerance: f64,
    pub rows: Vec<ContinuityRow>,
    pub monotone_tail: bool,
    pub small_norm_ok: bool,
    pub passed: bool,
}

/// Tabulates both columns over the sequence's schedule. Passes when the
/// last [`MONOTONE_WINDOW`] residuals never increase and every row with
/// norm below [`CONTINUITY_NORM_LEVEL`] has residual below `tol`.
pub fn continuity_probe(
    v: &dyn Valuation,
    seq: &FunctionSequence,
    k_max: usize,
    tol: f64,
) -> Result<ContinuityReport> {
    let p = v.exponent();
    let limit = seq.limit();
    let base = v.evaluate(limit)?;
    let rows = parallel::map(seq.indices(k_max), v.is_serial(), |k| -> Result<ContinuityRow> {
        let h = seq.term(k)?;
        Ok(ContinuityRow {
            k,
            norm: h.lp_distance(limit, p)?,
            residual: (&v.evaluate(&h)? - &base).frobenius_norm(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let tail = &rows[rows.len().saturating_sub(MONOTONE_WINDOW)..];
    let monotone_tail = tail.windows(2).all(|w| w[1].residual <= w[0].residual);
    let small_norm_ok = rows
        .iter()
        .filter(|r| r.norm < CONTINUITY_NORM_LEVEL)
        .all(|r| r.residual < tol);
    Ok(ContinuityReport {
        sequence: seq.label().to_string(),
        valuation: v.label(),
        p,
        tolerance: tol,
        monotone_tail,
        small_norm_ok,
        passed: !rows.is_empty() && monotone_tail && small_norm_ok,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeVerdict {
    Converging,
    /// Every level tiles `P` exactly.
    ExactTiling,
    NotConverging,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeLevel {
    pub delta: f64,
    pub cells: u64,
    pub gap: f64,
    /// `||K(xi(alpha) 1_cells) - xi(alpha) M(P)||_F`.
    pub error: f64,
    /// `E(delta) / E(2 delta)`; absent on the first level.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeConvergenceReport {
    pub xi: String,
    pub alpha: f64,
    pub window: (f64, f64),
    pub levels: Vec<CubeLevel>,
    pub verdict: CubeVerdict,
}

impl CubeConvergenceReport {
    pub fn passed(&self) -> bool {
        self.verdict != CubeVerdict::NotConverging
    }
}

/// Moment error of the dyadic inner approximation at each `delta`. Passes
/// when the error falls at every halving and the last ratio lies in
/// `window`, or when all errors vanish.
pub fn cube_convergence_probe(
    p: &Polytope,
    xi: &CompositionFunction,
    alpha: f64,
    levels: &[f64],
    window: (f64, f64),
) -> Result<CubeConvergenceReport> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("no levels given".into()));
    }
    if levels.windows(2).any(|w| w[1] != w[0] / 2.0) {
        return Err(Error::InvalidArgument("levels must halve strictly".into()));
    }
    let c = xi.eval(alpha);
    let target = polytope_moment(p) * c;
    let mut out: Vec<CubeLevel> = Vec::with_capacity(levels.len());
    for &delta in levels {
        let approx = dyadic_inner_runs(p, delta)?;
        let h = SimpleFunction::from_boxes(c, p.dim(), &approx.runs);
        let error = (&moment_of_simple(&h) - &target).frobenius_norm();
        let ratio = out.last().map(|prev| error / prev.error);
        out.push(CubeLevel {
            delta,
            cells: approx.cell_count,
            gap: approx.gap,
            error,
            ratio,
        });
    }
    // Rounding-level errors count as zero.
    let floor = 1e-14 * target.frobenius_norm().max(f64::MIN_POSITIVE);
    let verdict = if out.iter().all(|l| l.error <= floor) {
        CubeVerdict::ExactTiling
    } else {
        let decreasing = out.windows(2).all(|w| w[1].error < w[0].error);
        let last_ok = out
            .last()
            .and_then(|l| l.ratio)
            .is_some_and(|r| window.0 <= r && r <= window.1);
        if decreasing && last_ok {
            CubeVerdict::Converging
        } else {
            CubeVerdict::NotConverging
        }
    };
    Ok(CubeConvergenceReport {
        xi: xi.label().to_string(),
        alpha,
        window,
        levels: out,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckTarget {
    pub index: usize,
    pub exact: MomentMatrix,
    pub estimate: MomentMatrix,
    pub stderr: MomentMatrix,
    /// Largest `|estimate - exact| / stderr` over entries.
    pub max_z: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub samples: u64,
    pub seed: u64,
    pub z_limit: f64,
    pub targets: Vec<CrosscheckTarget>,
    pub fraction_within: f64,
    pub required_fraction: f64,
    pub passed: bool,
}

/// Exact `M(P)` against a uniform-sampling estimate over the bounding box
/// of each target. Passes when at least 95% of targets have every entry
/// within 4 standard errors.
pub fn oracle_crosscheck(targets: &[Polytope], samples: u64, seed_value: u64) -> Result<CrosscheckReport> {
    const Z: f64 = 4.0;
    const REQUIRED: f64 = 0.95;
    let mut out = Vec::with_capacity(targets.len());
    for (index, p) in targets.iter().enumerate() {
        let exact = polytope_moment(p);
        let n = p.dim();
        let Some(region) = p.bounding_box() else {
            out.push(CrosscheckTarget {
                index,
                exact: exact.clone(),
                estimate: MomentMatrix::zeros(n),
                stderr: MomentMatrix::zeros(n),
                max_z: 0.0,
                within: true,
            });
            continue;
        };
        let sampler = MonteCarloSampler {
            region,
            sample_count: samples,
            seed: seed::derive(&[seed_value, index as u64]),
        };
        let est = moment_monte_carlo(|x| if p.contains(x, 0.0) { 1.0 } else { 0.0 }, &sampler)?;
        let mut max_z = 0.0f64;
        let mut within = true;
        for i in 0..n {
            for j in 0..n {
                let diff = (est.mean.get(i, j) - exact.get(i, j)).abs();
                let se = est.stderr.get(i, j);
                if diff > Z * se {
                    within = false;
                }
                if se > 0.0 {
                    max_z = max_z.max(diff / se);
                } else if diff > 0.0 {
                    max_z = f64::MAX;
                }
            }
        }
        out.push(CrosscheckTarget {
            index,
            exact,
            estimate: est.mean,
            stderr: est.stderr,
            max_z,
            within,
        });
    }
    let fraction_within = if out.is_empty() {
        1.0
    } else {
        out.iter().filter(|t| t.within).count() as f64 / out.len() as f64
    };
    Ok(CrosscheckReport {
        samples,
        seed: seed_value,
        z_limit: Z,
        targets: out,
        fraction_within,
        required_fraction: REQUIRED,
        passed: fraction_within >= REQUIRED,
    })
}
