//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::process::{Command, ExitCode};
use std::time::Instant;

use valuation_lab::functions::{
    radial_membership_and_k_probe, CompositionFunction, FunctionSequence, GridFunction, ProbeVerdict, SimpleFunction,
};
use valuation_lab::geometry::{random_polytope, Polytope};
use valuation_lab::harness::{
    cases::alpha_grid, continuity_probe, cube_convergence_probe, oracle_crosscheck, rerun_case, CubeVerdict,
    SuiteConfig, SuiteReport,
};
use valuation_lab::valuation::{
    extract_xi_and_s, moment_of_simple, psi_evaluate, valuation_residual, BlackBoxValuation, RotationTerm,
    ValuationSpec,
};
use valuation_lab::{io, seed, Result};

type Verdict = Result<(bool, String)>;
type Check = fn() -> Verdict;

fn identity_factory(spec: &ValuationSpec) -> Box<dyn valuation_lab::valuation::Valuation> {
    Box::new(spec.clone())
}

/// Worst residual of `id` over `count` cases, with the failing count.
fn sweep(config: &SuiteConfig, id: &str, count: usize, tol: f64) -> Result<(f64, usize, Vec<String>)> {
    let mut worst = 0.0f64;
    let mut bad = 0;
    let mut descriptors = Vec::with_capacity(count);
    for i in 0..count {
        let (r, d) = rerun_case(config, &identity_factory, id, i)?;
        worst = worst.max(r);
        if !(r <= tol) {
            bad += 1;
        }
        descriptors.push(d);
    }
    Ok((worst, bad, descriptors))
}

fn k_bridge() -> Verdict {
    let config = SuiteConfig::default();
    let (worst, bad, _) = sweep(&config, "k_bridge", 500, 1e-12)?;
    Ok((bad == 0, format!("500 cases, n in {{2,3}}, max relative {worst:.3e} (tol 1e-12)")))
}

fn oracle() -> Verdict {
    let mut targets = Vec::new();
    for i in 0..50u64 {
        targets.push(random_polytope(seed::derive(&[2, i]), 2, 3 + (i as usize % 8), 1.0)?);
    }
    for i in 0..20u64 {
        targets.push(random_polytope(seed::derive(&[3, i]), 3, 4 + (i as usize % 8), 1.0)?);
    }
    let report = oracle_crosscheck(&targets, 1_000_000, 2024)?;
    let worst = report.targets.iter().map(|t| t.max_z).fold(0.0, f64::max);
    Ok((
        report.passed,
        format!(
            "50 2D + 20 3D targets, 1e6 samples: {:.1}% within 4 SE (need 95%), max z {worst:.2}",
            100.0 * report.fraction_within
        ),
    ))
}

fn covariance() -> Verdict {
    let config = SuiteConfig::default();
    let (worst, bad, descriptors) = sweep(&config, "covariance", 500, 1e-9)?;
    let rotating = descriptors
        .iter()
        .filter(|d| d.starts_with("n=2 ") && !d.contains(" s=0 "))
        .count();
    Ok((
        bad == 0 && rotating > 0,
        format!("500 cases, n in {{2,3,4}}, cond <= 50, max {worst:.3e} (tol 1e-9), {rotating} n=2 cases with s != 0"),
    ))
}

fn valuation_identity() -> Verdict {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for n in [2, 3] {
        for p in [1.0, 2.0, 3.0] {
            let config = SuiteConfig {
                dims: vec![n],
                p_values: vec![p],
                ..SuiteConfig::default()
            };
            let (w, b, _) = sweep(&config, "valuation_identity", 500, 1e-10)?;
            worst = worst.max(w);
            bad += b;
        }
    }
    let kk = BlackBoxValuation::new("K*K", 2, 1.0, |h| {
        let m = moment_of_simple(h);
        Ok(m.matmul(&m))
    });
    let h = GridFunction::new(2, 1.0, [(vec![0, 0], 1.0)])?;
    let f = GridFunction::new(2, 1.0, [(vec![1, 0], 1.0)])?;
    let broken = valuation_residual(&kk, &h, &f)?;
    Ok((
        bad == 0 && broken > 1e-3,
        format!("6 x 500 grid pairs, max {worst:.3e} (tol 1e-10); K*K on two cells {broken:.3e} (need > 1e-3)"),
    ))
}

fn zero_structure() -> Verdict {
    let z2 = psi_evaluate(
        &ValuationSpec::new(2, 1.0, CompositionFunction::odd_power(1.0, 1.0), 5.0)?,
        &SimpleFunction::zero(2),
    )?;
    let d2 = (&z2 - &(RotationTerm::matrix() * 5.0)).frobenius_norm();
    let z3 = psi_evaluate(
        &ValuationSpec::new(3, 1.0, CompositionFunction::odd_power(1.0, 1.0), 0.0)?,
        &SimpleFunction::zero(3),
    )?;
    let d3 = z3.frobenius_norm();
    Ok((
        d2 <= 1e-12 && d3 <= 1e-12,
        format!("n=2, s=5: |Psi(0) - 5 rho| = {d2:.1e}; n=3: |Psi(0)| = {d3:.1e} (tol 1e-12)"),
    ))
}

fn extraction() -> Verdict {
    let grid = alpha_grid();
    let body = Polytope::unit_cube(2);
    let (mut xi_err, mut s_err, mut fit) = (0.0f64, 0.0f64, 0.0f64);
    let mut count = 0;
    for p in [1.0, 2.0, 3.0] {
        for xi in CompositionFunction::builtins(p) {
            for s in [-5.0, 0.0, 5.0] {
                let spec = ValuationSpec::new(2, p, xi.clone(), s)?;
                let e = extract_xi_and_s(&spec, &grid, &body)?;
                for sample in &e.samples {
                    xi_err = xi_err.max((sample.xi_hat - xi.eval(sample.alpha)).abs());
                }
                s_err = s_err.max((e.s_hat.unwrap_or(f64::NAN) - s).abs());
                fit = fit.max(e.max_fit_residual);
                count += 1;
            }
        }
    }
    Ok((
        xi_err <= 1e-9 && s_err <= 1e-10 && fit <= 1e-10,
        format!("{count} (xi, s) specs on 17 alphas: xi {xi_err:.1e} (1e-9), s {s_err:.1e} (1e-10), fit {fit:.1e} (1e-10)"),
    ))
}

fn continuity() -> Verdict {
    let spec = ValuationSpec::new(2, 1.0, CompositionFunction::odd_power(1.0, 1.0), 0.0)?;
    let coeff = continuity_probe(&spec, &FunctionSequence::coefficient(1.0, Polytope::unit_cube(2)), 1 << 20, 1e-6)?;
    let cubes = continuity_probe(&spec, &FunctionSequence::inner_cubes(1.0, Polytope::standard_simplex(2)), 19, 1e-6)?;
    let reached = |r: &valuation_lab::harness::ContinuityReport| r.rows.iter().any(|row| row.norm < 1e-6);
    let describe = |name: &str, r: &valuation_lab::harness::ContinuityReport| {
        let last = r.rows.last().expect("rows");
        format!(
            "{name}: k={} norm {:.2e} residual {:.2e} monotone={}",
            last.k, last.norm, last.residual, r.monotone_tail
        )
    };
    Ok((
        coeff.passed && cubes.passed && reached(&coeff) && reached(&cubes),
        format!("{}; {}", describe("alpha+1/k", &coeff), describe("dyadic", &cubes)),
    ))
}

fn cube_convergence() -> Verdict {
    let xi = CompositionFunction::odd_power(1.0, 1.0);
    let levels: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
    let tri = cube_convergence_probe(&Polytope::standard_simplex(2), &xi, 1.0, &levels, (0.3, 0.8))?;
    let ratios: Vec<f64> = tri.levels.iter().filter_map(|l| l.ratio).collect();
    let every_ratio = ratios.iter().all(|r| (0.3..=0.8).contains(r));
    let square = cube_convergence_probe(&Polytope::unit_cube(2), &xi, 1.0, &[0.5, 0.25], (0.3, 0.8))?;
    let square_err = square.levels.iter().map(|l| l.error).fold(0.0, f64::max);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok((
        tri.verdict == CubeVerdict::Converging && every_ratio && square.verdict == CubeVerdict::ExactTiling,
        format!(
            "triangle ratios [{}] in [0.3, 0.8]; unit square max error {square_err:.1e} (exact tiling)",
            shown.join(", ")
        ),
    ))
}

fn radial() -> Verdict {
    let abs = CompositionFunction::new("|t|", "|t|", 2.0, 1.0)?;
    let a = radial_membership_and_k_probe(&abs, 2.0, 2, 3.0, 1e4)?;
    let b = radial_membership_and_k_probe(&abs, 2.0, 2, 5.0, 1e4)?;
    let sq = CompositionFunction::even_power(1.0, 2.0);
    let c = radial_membership_and_k_probe(&sq, 2.0, 2, 3.0, 1e4)?;
    let a_ok = a.in_lp
        && a.verdict == ProbeVerdict::Divergent
        && a.partials.iter().all(|&(r, v)| (v - (r - 1.0)).abs() <= 1e-8 * r);
    let b_ok = b.verdict == ProbeVerdict::Convergent;
    let c_ok = c.verdict == ProbeVerdict::Convergent && c.partials.iter().all(|&(_, v)| v <= 0.5 + 1e-12);
    Ok((
        a_ok && b_ok && c_ok,
        format!(
            "|t| gamma=3: {:?} (in L^2: {}); |t| gamma=5: {:?}; t^2 gamma=3: {:?}",
            a.verdict, a.in_lp, b.verdict, c.verdict
        ),
    ))
}

fn determinism() -> Verdict {
    let run = |threads: Option<&str>| -> Result<SuiteReport> {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_valuation-lab"));
        cmd.args(["verify", "--seed", "7", "--out", "-"]);
        if let Some(t) = threads {
            cmd.env("VALUATION_LAB_THREADS", t);
        }
        let out = cmd.output()?;
        if out.status.code() != Some(0) {
            return Err(valuation_lab::Error::InvalidArgument(format!(
                "verify exited with {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            )));
        }
        io::from_str(&String::from_utf8_lossy(&out.stdout))
    };
    let first = run(None)?.without_runtime();
    let second = run(None)?.without_runtime();
    let serial = run(Some("0"))?.without_runtime();
    let same = io::to_string(&first)? == io::to_string(&second)?;
    let same_serial = io::to_string(&first)? == io::to_string(&serial)?;
    Ok((
        same && same_serial,
        format!("two runs identical: {same}; serial run identical: {same_serial}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("K-bridge", k_bridge),
        ("oracle validation of M(P)", oracle),
        ("SL(n) covariance", covariance),
        ("valuation identity", valuation_identity),
        ("zero structure", zero_structure),
        ("extraction round-trip", extraction),
        ("continuity", continuity),
        ("cube convergence", cube_convergence),
        ("radial probes", radial),
        ("determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {detail} [{:.2}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
