use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cases::{self, rng_for};
use super::probes::{continuity_probe, cube_convergence_probe, oracle_crosscheck, CubeVerdict};
use crate::error::{Error, Result};
use crate::functions::{FunctionSequence, GridFunction, SimpleFunction};
use crate::functions::CompositionFunction;
use crate::geometry::{random_polytope, transform_polytope, AxisBox, MomentMatrix, Polytope, SLTransform};
use crate::valuation::{
    covariance_residual, decomposition_residual, extract_xi_and_s, psi_evaluate, valuation_residual,
    zero_structure, RotationTerm, Valuation, ValuationSpec,
};
use crate::{parallel, seed};

pub const SCHEMA_VERSION: u32 = 1;

/// Failing cases listed in full per property; the rest are only counted.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub dims: Vec<usize>,
    pub p_values: Vec<f64>,
    pub cases_per_property: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub parallel: bool,
    /// Upper bound on `cond(phi)` for random `SL(n)` draws.
    pub max_condition: f64,
    /// Accepted last-level ratio for cube convergence.
    pub ratio_window: (f64, f64),
    /// Monte Carlo samples per oracle target.
    pub oracle_samples: u64,
    /// Cap on oracle targets (each is expensive).
    pub oracle_targets: usize,
}

/// Property ids with their default tolerances.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("k_bridge", 1e-12),
    ("valuation_identity", 1e-10),
    ("covariance", 1e-9),
    ("zero_structure", 1e-12),
    ("extraction_xi", 1e-9),
    ("extraction_s", 1e-10),
    ("extraction_fit", 1e-10),
    ("reproduction", 1e-8),
    ("decomposition", 1e-10),
    ("rho_invariance", 1e-12),
    ("continuity", 1e-6),
    ("cube_convergence", 0.8),
    ("oracle_crosscheck", 4.0),
];

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            master_seed: 0,
            dims: vec![2, 3, 4],
            p_values: vec![1.0, 2.0, 3.0],
            cases_per_property: 100,
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            parallel: true,
            max_condition: 50.0,
            ratio_window: (0.3, 0.8),
            oracle_samples: 200_000,
            oracle_targets: 20,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cases_per_property == 0 {
            return Err(Error::InvalidArgument("cases_per_property must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|n| !(2..=crate::geometry::MAX_DIM).contains(n)) {
            return Err(Error::InvalidArgument(format!(
                "dims must be a nonempty subset of 2..={} (got {:?})",
                crate::geometry::MAX_DIM,
                self.dims
            )));
        }
        if self.p_values.is_empty() || self.p_values.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
            return Err(Error::InvalidArgument(format!("p values must be finite and >= 1 (got {:?})", self.p_values)));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("tolerance for {k} must be positive (got {v})")));
        }
        if let Some(k) = self.tolerances.keys().find(|k| !DEFAULT_TOLERANCES.iter().any(|(id, _)| id == k)) {
            return Err(Error::InvalidArgument(format!("unknown property '{k}' in tolerances")));
        }
        if !(self.max_condition >= 1.0) {
            return Err(Error::InvalidArgument("max_condition must be >= 1".into()));
        }
        let (lo, hi) = self.ratio_window;
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::InvalidArgument(format!("ratio window ({lo}, {hi}) is empty")));
        }
        if self.oracle_samples < 2 {
            return Err(Error::InvalidArgument("oracle_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self, id: &str) -> f64 {
        self.tolerances.get(id).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == id)
                .map_or(1e-9, |(_, v)| *v)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub seed: u64,
    /// Absent when the case raised an error.
    pub residual: Option<f64>,
    pub descriptor: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Every case must have `residual <= tolerance`.
    AllWithin,
    /// At least 95% of cases must have `residual <= tolerance`.
    Fraction95,
    /// The case verdict decides; the residual is informational.
    Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub id: String,
    pub description: String,
    pub rule: Rule,
    pub tolerance: f64,
    pub cases: usize,
    pub errors: usize,
    pub max_residual: f64,
    pub argmax: Option<CaseRecord>,
    pub failure_count: usize,
    pub failures: Vec<CaseRecord>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub item: String,
    pub properties: Vec<String>,
    pub covered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub arch: String,
    pub os: String,
    pub float_model: String,
}

impl Platform {
    fn current() -> Self {
        Platform {
            arch: std::env::consts::ARCH.into(),
            os: std::env::consts::OS.into(),
            float_model: "IEEE-754 binary64, round to nearest".into(),
        }
    }
}

/// Fields that legitimately differ between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub wall_time_seconds: f64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub valuation: String,
    pub config: SuiteConfig,
    pub platform: Platform,
    pub properties: Vec<PropertyReport>,
    pub coverage: Vec<CoverageRow>,
    pub passed: bool,
    pub runtime: Runtime,
}

impl SuiteReport {
    pub fn property(&self, id: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.id == id)
    }

    /// The report with timing zeroed, for run-to-run comparison.
    pub fn without_runtime(&self) -> SuiteReport {
        SuiteReport {
            runtime: Runtime {
                wall_time_seconds: 0.0,
                threads: 0,
            },
            ..self.clone()
        }
    }
}

/// Builds the valuation under test for a given constructive spec.
pub type ValuationFactory<'a> = &'a (dyn Fn(&ValuationSpec) -> Box<dyn Valuation> + Sync);

struct Outcome {
    residual: f64,
    /// Overrides `residual <= tol` for [`Rule::Verdict`] properties.
    verdict: Option<bool>,
    descriptor: String,
}

impl Outcome {
    fn value(residual: f64, descriptor: String) -> Result<Outcome> {
        Ok(Outcome {
            residual,
            verdict: None,
            descriptor,
        })
    }
}

struct Ctx<'a> {
    config: &'a SuiteConfig,
    factory: ValuationFactory<'a>,
}

impl Ctx<'_> {
    /// `(n, p)` for case `index`, cycling through allowed dimensions.
    fn combo(&self, index: usize, allowed: &[usize]) -> (usize, f64) {
        let dims: Vec<usize> = self.config.dims.iter().copied().filter(|n| allowed.contains(n)).collect();
        let dims = if dims.is_empty() { vec![allowed[0]] } else { dims };
        let combos: Vec<(usize, f64)> = dims
            .iter()
            .flat_map(|&n| self.config.p_values.iter().map(move |&p| (n, p)))
            .collect();
        combos[index % combos.len()]
    }
}

const ALL_DIMS: &[usize] = &[2, 3, 4, 5, 6];

fn spec_tag(s: &ValuationSpec) -> String {
    format!("n={} p={} xi={} s={}", s.n, s.p, s.xi.label(), s.s)
}

struct Property {
    id: &'static str,
    description: &'static str,
    rule: Rule,
    /// Number of cases given the configured count.
    cases: fn(&SuiteConfig) -> usize,
    run: fn(&Ctx, usize, u64) -> Result<Outcome>,
}

fn all_cases(c: &SuiteConfig) -> usize {
    c.cases_per_property
}

fn few_cases(c: &SuiteConfig) -> usize {
    c.cases_per_property.min(10)
}

fn oracle_cases(c: &SuiteConfig) -> usize {
    c.cases_per_property.min(c.oracle_targets).max(1)
}

fn relative_frobenius(a: &MomentMatrix, b: &MomentMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// `int_S x x^t dx` for `S = v0 + A Delta`, from the moments of the
/// standard simplex `Delta`; shares no arithmetic with the fan summation.
fn affine_simplex_moment(verts: &[&[f64]]) -> nalgebra::DMatrix<f64> {
    use nalgebra::{DMatrix, DVector};
    let n = verts.len() - 1;
    let a = DMatrix::from_fn(n, n, |r, c| verts[c + 1][r] - verts[0][r]);
    let v0 = DVector::from_column_slice(verts[0]);
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let second = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 1.0 } / fact(n + 2));
    let first = DVector::from_element(n, 1.0 / fact(n + 1));
    let am = &a * first;
    let inner = &a * second * a.transpose() + &am * v0.transpose() + &v0 * am.transpose() + &v0 * v0.transpose() / fact(n);
    inner * a.determinant().abs()
}

fn k_bridge(_ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(case_seed);
    let n = [2, 3][index % 2];
    let alpha = rng.random_range(-5.0..=5.0);
    let m = rng.random_range(n + 1..=n + 8);
    let p = random_polytope(rng.random(), n, m, rng.random_range(0.5..=2.0))?;
    let identity = ValuationSpec::new(n, 1.0, CompositionFunction::odd_power(1.0, 1.0), 0.0)?;
    let through_psi = psi_evaluate(&identity, &SimpleFunction::indicator(alpha, p.clone()))?;
    let mut direct = nalgebra::DMatrix::zeros(n, n);
    for s in p.triangulation() {
        let verts: Vec<&[f64]> = s.iter().map(|&i| p.vertex(i)).collect();
        direct += affine_simplex_moment(&verts);
    }
    let direct = MomentMatrix::from_matrix(direct * alpha);
    Outcome::value(
        relative_frobenius(&through_psi, &direct),
        format!("n={n} alpha={alpha} vertices={}", p.num_vertices()),
    )
}

fn valuation_identity(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (n, p) = ctx.combo(index, ALL_DIMS);
    let mut rng = rng_for(case_seed);
    let spec = cases::random_spec(&mut rng, n, p);
    let (h, f) = cases::random_grid_pair(&mut rng, n);
    let v = (ctx.factory)(&spec);
    let r = valuation_residual(v.as_ref(), &h, &f)?;
    Outcome::value(r, format!("{} cells={}+{}", spec_tag(&spec), h.len(), f.len()))
}

fn covariance(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (n, p) = ctx.combo(index, ALL_DIMS);
    let mut rng = rng_for(case_seed);
    let spec = cases::random_spec(&mut rng, n, p);
    let h = cases::random_simple(&mut rng, n)?;
    let phi = cases::bounded_sl_matrix(rng.random(), n, ctx.config.max_condition)?;
    let v = (ctx.factory)(&spec);
    let r = covariance_residual(v.as_ref(), &h, &phi)?;
    Outcome::value(
        r,
        format!("{} pieces={} cond={:.3}", spec_tag(&spec), h.pieces().len(), phi.condition()),
    )
}

fn zero_structure_case(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (n, p) = ctx.combo(index, ALL_DIMS);
    let spec = cases::random_spec(&mut rng_for(case_seed), n, p);
    let v = (ctx.factory)(&spec);
    let report = zero_structure(v.as_ref(), ctx.config.tolerance("zero_structure"))?;
    let r = match report.s_hat {
        Some(s) => report.symmetric_norm.max((s - spec.s).abs()),
        None => report.value.frobenius_norm(),
    };
    Outcome::value(r, spec_tag(&spec))
}

/// Shared set-up for the extraction properties.
fn extraction_setup(ctx: &Ctx, index: usize, case_seed: u64) -> Result<(ValuationSpec, Polytope, Box<dyn Valuation>)> {
    let (n, p) = ctx.combo(index, ALL_DIMS);
    let mut rng = rng_for(case_seed);
    let spec = cases::random_spec(&mut rng, n, p);
    let poly = if rng.random_bool(0.5) {
        Polytope::unit_cube(n)
    } else {
        random_polytope(rng.random(), n, n + 4, 1.0)?
    };
    let v = (ctx.factory)(&spec);
    Ok((spec, poly, v))
}

fn extraction_xi(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (spec, poly, v) = extraction_setup(ctx, index, case_seed)?;
    let e = extract_xi_and_s(v.as_ref(), &cases::alpha_grid(), &poly)?;
    let r = e
        .samples
        .iter()
        .map(|s| (s.xi_hat - spec.xi.eval(s.alpha)).abs())
        .fold(0.0, f64::max);
    Outcome::value(r, spec_tag(&spec))
}

fn extraction_s(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (spec, poly, v) = extraction_setup(ctx, index, case_seed)?;
    let e = extract_xi_and_s(v.as_ref(), &cases::alpha_grid(), &poly)?;
    // Off the plane the antisymmetric part must vanish instead.
    let r = match e.s_hat {
        Some(s) => (s - spec.s).abs().max(e.s_spread),
        None => e.max_fit_residual,
    };
    Outcome::value(r, spec_tag(&spec))
}

fn extraction_fit(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (spec, poly, v) = extraction_setup(ctx, index, case_seed)?;
    let e = extract_xi_and_s(v.as_ref(), &cases::alpha_grid(), &poly)?;
    Outcome::value(e.max_fit_residual, spec_tag(&spec))
}

/// `V` against the member of the family rebuilt from its own extraction,
/// on a grid function whose values come from the sampled grid.
fn reproduction(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (spec, poly, v) = extraction_setup(ctx, index, case_seed)?;
    let grid = cases::alpha_grid();
    let e = extract_xi_and_s(v.as_ref(), &grid, &poly)?;
    let mut rng = rng_for(seed::derive(&[case_seed, 1]));
    let n = spec.n;
    let cells: Vec<(Vec<i64>, f64)> = (0..rng.random_range(1..=6))
        .map(|_| {
            let index = (0..n).map(|_| rng.random_range(-4..4)).collect();
            (index, grid[rng.random_range(0..grid.len())])
        })
        .collect();
    let h = GridFunction::new(n, 0.5, cells)?.to_simple();
    let got = v.evaluate(&h)?;
    let rebuilt = e.reconstruct(&h)?;
    Outcome::value(
        (&got - &rebuilt).frobenius_norm() / (1.0 + got.frobenius_norm()),
        spec_tag(&spec),
    )
}

fn decomposition(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (n, p) = ctx.combo(index, ALL_DIMS);
    let mut rng = rng_for(case_seed);
    let spec = cases::random_spec(&mut rng, n, p);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let count = rng.random_range(1..=4);
    // Distinct unit cells along the first axis.
    let pieces: Vec<(f64, Polytope)> = (0..count)
        .map(|k| {
            let mut lower = vec![0.0; n];
            lower[0] = k as f64;
            let cell = AxisBox::cube(lower, 1.0).expect("unit cell");
            (sign * rng.random_range(0.1..=3.0), Polytope::from_box(&cell))
        })
        .collect();
    let v = (ctx.factory)(&spec);
    let r = decomposition_residual(v.as_ref(), &pieces)?;
    Outcome::value(r, format!("{} pieces={count} sign={sign}", spec_tag(&spec)))
}

fn rho_invariance(ctx: &Ctx, _index: usize, case_seed: u64) -> Result<Outcome> {
    let phi = cases::bounded_sl_matrix(case_seed, 2, ctx.config.max_condition)?;
    Outcome::value(
        RotationTerm::invariance_residual(phi.matrix()),
        format!("cond={:.3}", phi.condition()),
    )
}

/// Coefficient sequences `alpha + 1/k`; the residual is the last entry of
/// the table, which must be under tolerance with a non-increasing tail.
fn continuity(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (n, p) = ctx.combo(index, &[2, 3]);
    let mut rng = rng_for(case_seed);
    let spec = cases::random_spec(&mut rng, n, p);
    let alpha = rng.random_range(-2.0..=2.0);
    let poly = if rng.random_bool(0.5) {
        Polytope::unit_cube(n)
    } else {
        random_polytope(rng.random(), n, n + 4, 1.0)?
    };
    let v = (ctx.factory)(&spec);
    let tol = ctx.config.tolerance("continuity");
    let probe = continuity_probe(v.as_ref(), &FunctionSequence::coefficient(alpha, poly), 1 << 40, tol)?;
    let last = probe.rows.last().map_or(f64::INFINITY, |r| r.residual);
    Ok(Outcome {
        residual: last,
        verdict: Some(probe.monotone_tail && last <= tol),
        descriptor: format!("{} alpha={alpha} rows={}", spec_tag(&spec), probe.rows.len()),
    })
}

/// Standard triangle (case 0) or a well-conditioned image of it.
fn cube_convergence(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let p = ctx.config.p_values[index % ctx.config.p_values.len()];
    let mut rng = rng_for(case_seed);
    let spec = cases::random_spec(&mut rng, 2, p);
    let triangle = Polytope::standard_simplex(2);
    let body = if index == 0 {
        triangle
    } else {
        let phi: SLTransform = cases::bounded_sl_matrix(rng.random(), 2, 4.0)?;
        transform_polytope(&phi, &triangle)?
    };
    let alpha = rng.random_range(0.5..=2.0);
    let levels: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
    let report = cube_convergence_probe(&body, &spec.xi, alpha, &levels, ctx.config.ratio_window)?;
    let last_ratio = report.levels.last().and_then(|l| l.ratio).unwrap_or(0.0);
    Ok(Outcome {
        residual: if last_ratio.is_finite() { last_ratio } else { 0.0 },
        verdict: Some(report.verdict != CubeVerdict::NotConverging),
        descriptor: format!("xi={} alpha={alpha} verdict={:?}", spec.xi.label(), report.verdict),
    })
}

fn oracle(ctx: &Ctx, index: usize, case_seed: u64) -> Result<Outcome> {
    let (n, _) = ctx.combo(index, &[2, 3]);
    let mut rng = rng_for(case_seed);
    let target = random_polytope(rng.random(), n, rng.random_range(n + 1..=n + 8), 1.0)?;
    let report = oracle_crosscheck(&[target], ctx.config.oracle_samples, rng.random())?;
    let t = &report.targets[0];
    Outcome::value(t.max_z, format!("n={n} samples={}", report.samples))
}

const PROPERTIES: &[Property] = &[
    Property {
        id: "k_bridge",
        description: "K(alpha 1_P) = alpha M(P) through two summation paths",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: k_bridge,
    },
    Property {
        id: "valuation_identity",
        description: "V(h v f) + V(h ^ f) = V(h) + V(f) on grid functions",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: valuation_identity,
    },
    Property {
        id: "covariance",
        description: "V(h o phi^-1) = phi V(h) phi^t for condition-bounded phi in SL(n)",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: covariance,
    },
    Property {
        id: "zero_structure",
        description: "V(0) = s rho for n = 2 and V(0) = 0 for n >= 3",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: zero_structure_case,
    },
    Property {
        id: "extraction_xi",
        description: "xi recovered on the 17-point grid",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: extraction_xi,
    },
    Property {
        id: "extraction_s",
        description: "s recovered and constant across alpha",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: extraction_s,
    },
    Property {
        id: "extraction_fit",
        description: "responses to alpha 1_P are xi(alpha) M(P) + s rho",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: extraction_fit,
    },
    Property {
        id: "reproduction",
        description: "V reproduced by the extracted (xi, s) on grid functions",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: reproduction,
    },
    Property {
        id: "decomposition",
        description: "V(h) - V(0) is additive over same-sign disjoint pieces",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: decomposition,
    },
    Property {
        id: "rho_invariance",
        description: "phi rho phi^t = rho for phi in SL(2)",
        rule: Rule::AllWithin,
        cases: all_cases,
        run: rho_invariance,
    },
    Property {
        id: "continuity",
        description: "V(h_k) -> V(h) along alpha_k = alpha + 1/k",
        rule: Rule::Verdict,
        cases: few_cases,
        run: continuity,
    },
    Property {
        id: "cube_convergence",
        description: "moment error of dyadic inner cells falls with ratio in the window",
        rule: Rule::Verdict,
        cases: few_cases,
        run: cube_convergence,
    },
    Property {
        id: "oracle_crosscheck",
        description: "M(P) within 4 standard errors of a Monte Carlo estimate",
        rule: Rule::Fraction95,
        cases: oracle_cases,
        run: oracle,
    },
];

/// In-scope items and the properties that exercise them.
const COVERAGE: &[(&str, &[&str])] = &[
    ("valuation identity on the function lattice", &["valuation_identity", "decomposition"]),
    ("SL(n) covariance", &["covariance"]),
    ("moment matrix K and M(P)", &["k_bridge", "oracle_crosscheck"]),
    ("K(alpha 1_P) = alpha M(P)", &["k_bridge"]),
    ("growth class of xi", &["extraction_xi", "reproduction"]),
    ("constructive family K(xi o h) + s rho", &["covariance", "valuation_identity", "reproduction"]),
    ("measure mu_n and the L^p(mu_n) norm", &["continuity"]),
    ("cube approximation and symmetric difference", &["cube_convergence"]),
    ("zero structure, n = 2 and n >= 3", &["zero_structure"]),
    ("continuity of h -> K(xi o h)", &["continuity"]),
    ("extraction of (xi, s) from responses", &["extraction_xi", "extraction_s", "extraction_fit"]),
    ("inclusion-exclusion decomposition", &["decomposition"]),
    ("rho invariance under SL(2)", &["rho_invariance", "covariance"]),
];

/// Seed of case `index` of property `id`.
pub fn case_seed(master_seed: u64, id: &str, index: usize) -> u64 {
    seed::derive(&[master_seed, seed::name_id(id), index as u64])
}

pub fn property_ids() -> Vec<&'static str> {
    PROPERTIES.iter().map(|p| p.id).collect()
}

/// Reruns a single case; returns its residual and descriptor.
pub fn rerun_case(
    config: &SuiteConfig,
    factory: ValuationFactory,
    id: &str,
    index: usize,
) -> Result<(f64, String)> {
    let prop = PROPERTIES
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown property '{id}'")))?;
    let ctx = Ctx { config, factory };
    let o = (prop.run)(&ctx, index, case_seed(config.master_seed, id, index))?;
    Ok((o.residual, o.descriptor))
}

fn default_factory(spec: &ValuationSpec) -> Box<dyn Valuation> {
    Box::new(spec.clone())
}

/// Runs every property against the constructive family itself.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    run_suite_with(config, &default_factory)
}

/// Runs every property against `factory(spec)` in place of `Psi(spec)`.
pub fn run_suite_with(config: &SuiteConfig, factory: ValuationFactory) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let probe_spec = ValuationSpec::new(2, config.p_values[0], CompositionFunction::zero(config.p_values[0]), 0.0)?;
    let probe_v = factory(&probe_spec);
    let serial = !config.parallel || probe_v.is_serial();
    let label = probe_v.label();
    let ctx = Ctx { config, factory };

    let mut properties = Vec::with_capacity(PROPERTIES.len());
    for prop in PROPERTIES {
        let tol = config.tolerance(prop.id);
        let count = (prop.cases)(config);
        let indices: Vec<usize> = (0..count).collect();
        let outcomes = parallel::map(indices, serial, |i| {
            let s = case_seed(config.master_seed, prop.id, i);
            (i, s, (prop.run)(&ctx, i, s))
        });
        properties.push(summarize(prop, tol, outcomes));
    }
    let coverage = COVERAGE
        .iter()
        .map(|(item, props)| CoverageRow {
            item: item.to_string(),
            properties: props.iter().map(|s| s.to_string()).collect(),
            covered: props.iter().all(|p| properties.iter().any(|r: &PropertyReport| r.id == *p && r.cases > 0)),
        })
        .collect::<Vec<_>>();
    let passed = properties.iter().all(|p| p.passed) && coverage.iter().all(|c| c.covered);
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        valuation: label,
        config: config.clone(),
        platform: Platform::current(),
        properties,
        coverage,
        passed,
        runtime: Runtime {
            wall_time_seconds: start.elapsed().as_secs_f64(),
            threads: if serial { 1 } else { parallel::thread_count() },
        },
    })
}

fn summarize(prop: &Property, tol: f64, outcomes: Vec<(usize, u64, Result<Outcome>)>) -> PropertyReport {
    let cases = outcomes.len();
    let mut errors = 0;
    let mut max_residual = 0.0f64;
    let mut argmax: Option<CaseRecord> = None;
    let mut failures = Vec::new();
    let mut failure_count = 0;
    let mut within = 0usize;
    for (index, seed, outcome) in outcomes {
        let (record, ok) = match outcome {
            Ok(o) => {
                let ok = match (prop.rule, o.verdict) {
                    (Rule::Verdict, Some(v)) => v,
                    _ => o.residual <= tol,
                };
                let rec = CaseRecord {
                    index,
                    seed,
                    residual: Some(o.residual),
                    descriptor: o.descriptor,
                };
                if argmax.is_none() || o.residual > max_residual {
                    max_residual = max_residual.max(o.residual);
                    argmax = Some(rec.clone());
                }
                (rec, ok)
            }
            Err(e) => {
                errors += 1;
                (
                    CaseRecord {
                        index,
                        seed,
                        residual: None,
                        descriptor: format!("error: {e}"),
                    },
                    false,
                )
            }
        };
        if ok {
            within += 1;
        } else {
            failure_count += 1;
            if failures.len() < MAX_LISTED_FAILURES {
                failures.push(record);
            }
        }
    }
    let passed = match prop.rule {
        Rule::AllWithin | Rule::Verdict => failure_count == 0,
        Rule::Fraction95 => errors == 0 && cases > 0 && within as f64 >= 0.95 * cases as f64,
    };
    PropertyReport {
        id: prop.id.to_string(),
        description: prop.description.to_string(),
        rule: prop.rule,
        tolerance: tol,
        cases,
        errors,
        max_residual,
        argmax,
        failure_count,
        failures,
        passed,
    }
}
