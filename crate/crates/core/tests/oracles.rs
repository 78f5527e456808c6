//! Worked examples checked against brute-force quadrature or Monte Carlo
//! written here, independent of the library's integrators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use valuation_lab::functions::{
    indicator_distance, radial_membership_and_k_probe, Approximant, CompositionFunction, FunctionSequence, GridFunction,
    ProbeVerdict, SimpleFunction,
};
use valuation_lab::geometry::{
    dyadic_inner_cubes, halfspace_slice, polytope_moment, AxisBox, MomentMatrix, Point, Polytope, SLTransform,
};
use valuation_lab::valuation::{
    covariance_residual, decomposition_residual, extract_xi_and_s, moment_of_simple, psi_evaluate, valuation_residual,
    BlackBoxValuation, ValuationSpec,
};

fn poly(pts: &[&[f64]]) -> Polytope {
    Polytope::from_points(&pts.iter().map(|p| Point::new(p.to_vec())).collect::<Vec<_>>()).unwrap()
}

fn triangle() -> Polytope {
    poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])
}

/// Midpoint rule on an `m x m` grid over `[lo, hi]^2`.
fn midpoint_2d(lo: f64, hi: f64, m: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> [f64; 3] {
    let h = (hi - lo) / m as f64;
    let mut acc = [0.0; 3];
    for i in 0..m {
        let x = lo + (i as f64 + 0.5) * h;
        for j in 0..m {
            let y = lo + (j as f64 + 0.5) * h;
            let v = f(x, y);
            for k in 0..3 {
                acc[k] += v[k];
            }
        }
    }
    acc.map(|a| a * h * h)
}

/// Mean and standard error of `x_i x_j 1_inside(x)` over the cube `[0,1]^n`.
fn mc_entry(n: usize, i: usize, j: usize, samples: usize, seed: u64, inside: impl Fn(&[f64]) -> bool) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        x.iter_mut().for_each(|c| *c = rng.random::<f64>());
        let v = if inside(&x) { x[i] * x[j] } else { 0.0 };
        s += v;
        s2 += v * v;
    }
    let mean = s / samples as f64;
    let var = (s2 / samples as f64 - mean * mean) * samples as f64 / (samples - 1) as f64;
    (mean, (var / samples as f64).sqrt())
}

#[test]
fn segment_moment_matches_simpson() {
    let seg = Polytope::from_points(&[Point::new(vec![0.0]), Point::new(vec![1.0])]).unwrap();
    let m = polytope_moment(&seg);
    // Simpson is exact for x^2.
    let simpson = (0.0 + 4.0 * 0.25 + 1.0) / 6.0;
    assert!((m.get(0, 0) - simpson).abs() < 1e-15);
}

#[test]
fn triangle_moment_matches_quadrature() {
    let m = polytope_moment(&triangle());
    let q = midpoint_2d(0.0, 1.0, 3000, |x, y| if x + y <= 1.0 { [x * x, x * y, y * y] } else { [0.0; 3] });
    // midpoint error on the diagonal boundary is O(h)
    assert!((m.get(0, 0) - q[0]).abs() < 1e-3, "{} vs {}", m.get(0, 0), q[0]);
    assert!((m.get(0, 1) - q[1]).abs() < 1e-3);
    assert!((m.get(1, 1) - q[2]).abs() < 1e-3);
    assert!((m.get(0, 0) - 1.0 / 12.0).abs() < 1e-15);
    assert!((m.get(0, 1) - 1.0 / 24.0).abs() < 1e-15);
}

#[test]
fn tetrahedron_moment_matches_monte_carlo() {
    let tet = Polytope::standard_simplex(3);
    let m = polytope_moment(&tet);
    let inside = |x: &[f64]| x[0] + x[1] + x[2] <= 1.0;
    for (i, j, exact) in [(0, 0, 1.0 / 60.0), (1, 2, 1.0 / 120.0), (2, 2, 1.0 / 60.0)] {
        let (mean, se) = mc_entry(3, i, j, 2_000_000, 11 + i as u64 * 3 + j as u64, inside);
        assert!((mean - m.get(i, j)).abs() < 4.0 * se, "entry ({i},{j}): {mean} +- {se}");
        assert!((m.get(i, j) - exact).abs() < 1e-15);
    }
}

#[test]
fn squares_match_tensor_integrals() {
    let sq = polytope_moment(&Polytope::unit_cube(2));
    let q = midpoint_2d(0.0, 1.0, 400, |x, y| [x * x, x * y, y * y]);
    // midpoint on x^2 is off by h^2/12
    assert!((sq.get(0, 0) - q[0]).abs() < 1e-5);
    assert!((sq.get(0, 1) - q[1]).abs() < 1e-12);
    let centered = Polytope::from_box(&AxisBox::new(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap());
    let c = polytope_moment(&centered);
    assert_eq!(c.get(0, 1), 0.0);
    let qc = midpoint_2d(-0.5, 0.5, 400, |x, y| [x * x, x * y, y * y]);
    assert!((c.get(0, 0) - qc[0]).abs() < 1e-5);
    assert!(qc[1].abs() < 1e-12);
}

#[test]
fn clipped_triangle_areas_match_cell_count() {
    let s = halfspace_slice(&triangle(), &[1.0, 0.0], 0.5, 0.5).unwrap();
    let m = 2000;
    let h = 1.0 / m as f64;
    let (mut left, mut right) = (0usize, 0usize);
    for i in 0..m {
        let x = (i as f64 + 0.5) * h;
        for j in 0..m {
            let y = (j as f64 + 0.5) * h;
            if x + y <= 1.0 {
                if x <= 0.5 {
                    left += 1;
                } else {
                    right += 1;
                }
            }
        }
    }
    let (left, right) = (left as f64 * h * h, right as f64 * h * h);
    assert!((s.below.volume() - left).abs() < 2e-3);
    assert!((s.above.volume() - right).abs() < 2e-3);
    assert!((s.below.volume() - 3.0 / 8.0).abs() < 1e-14);
    assert!((s.above.volume() - 1.0 / 8.0).abs() < 1e-14);
}

#[test]
fn dyadic_cells_match_corner_enumeration() {
    for (delta, expected) in [(0.25, 6usize), (0.125, 28)] {
        let (cells, gap) = dyadic_inner_cubes(&triangle(), delta).unwrap();
        let k = (1.0 / delta) as i64;
        // a cell lies in the triangle iff its far corner does
        let brute = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| (i + 1 + j + 1) as f64 * delta <= 1.0)
            .count();
        assert_eq!(cells.len(), brute);
        assert_eq!(brute, expected);
        assert!((gap - (0.5 - brute as f64 * delta * delta)).abs() < 1e-15);
    }
}

#[test]
fn lp_norm_matches_quadrature() {
    let h = SimpleFunction::indicator(3.0, Polytope::unit_cube(2));
    let q = midpoint_2d(0.0, 1.0, 500, |x, y| [9.0 * (x * x + y * y), 0.0, 0.0]);
    assert!((h.lp_norm(2.0) - q[0].sqrt()).abs() < 1e-5);
    assert!((h.lp_norm(2.0) - 2.449490).abs() < 1e-6);
    let second = Polytope::from_box(&AxisBox::cube(vec![2.0, 0.0], 1.0).unwrap());
    let two = SimpleFunction::new(2, vec![
        valuation_lab::functions::Piece::new(1.0, Polytope::unit_cube(2)),
        valuation_lab::functions::Piece::new(1.0, second.clone()),
    ])
    .unwrap();
    let mu2 = midpoint_2d(0.0, 1.0, 500, |x, y| [(x + 2.0).powi(2) + y * y, 0.0, 0.0])[0];
    assert!((two.lp_norm(1.0) - (2.0 / 3.0 + mu2)).abs() < 1e-5);
    assert!((second.mu_measure() - (19.0 / 3.0 + 1.0 / 3.0)).abs() < 1e-14);
}

#[test]
fn triangle_gap_distance_matches_monte_carlo() {
    let t = triangle();
    let (cells, gap) = dyadic_inner_cubes(&t, 0.25).unwrap();
    let d = indicator_distance(1.0, &Approximant::Boxes(cells.clone()), &t, 1.0, None).unwrap();
    let in_cells = |x: &[f64]| cells.iter().any(|b| b.contains(x));
    let gap_region = |x: &[f64]| x[0] + x[1] <= 1.0 && !in_cells(x);
    let (e00, s00) = mc_entry(2, 0, 0, 2_000_000, 5, gap_region);
    let (e11, s11) = mc_entry(2, 1, 1, 2_000_000, 6, gap_region);
    let mu = e00 + e11;
    assert!((d.exact - mu).abs() < 4.0 * (s00 + s11), "{} vs {mu}", d.exact);
    assert!((gap - 0.125).abs() < 1e-15);
    assert!((d.bound - 0.125).abs() < 1e-15);
    assert!(d.exact <= d.bound);
}

#[test]
fn radial_partials_match_closed_forms() {
    let abs = CompositionFunction::new("abs", "|t|", 2.0, 1.0).unwrap();
    let div = radial_membership_and_k_probe(&abs, 2.0, 2, 3.0, 1e4).unwrap();
    assert!(div.in_lp);
    assert_eq!(div.verdict, ProbeVerdict::Divergent);
    for &(r, v) in &div.partials {
        assert!((v - (r - 1.0)).abs() < 1e-8 * r, "R={r}: {v}");
    }
    let conv = radial_membership_and_k_probe(&abs, 2.0, 2, 5.0, 1e4).unwrap();
    assert_eq!(conv.verdict, ProbeVerdict::Convergent);
    for &(r, v) in &conv.partials {
        assert!((v - (1.0 - 1.0 / r)).abs() < 1e-10);
    }
    let sq = CompositionFunction::even_power(1.0, 2.0);
    let r = radial_membership_and_k_probe(&sq, 2.0, 2, 3.0, 1e4).unwrap();
    assert_eq!(r.verdict, ProbeVerdict::Convergent);
    // membership integral int_1^inf r^{-gamma p + n + 1} dr = 1 / (gamma p - n - 2)
    let bound = 1.0 / (3.0 * 2.0 - 4.0);
    assert!(r.partials.iter().all(|&(_, v)| v <= bound + 1e-12));
}

#[test]
fn psi_examples() {
    let sq = Polytope::unit_cube(2);
    let id = ValuationSpec::new(2, 1.0, CompositionFunction::odd_power(1.0, 1.0), 0.0).unwrap();
    let three = psi_evaluate(&id, &SimpleFunction::indicator(3.0, sq.clone())).unwrap();
    let want = MomentMatrix::from_rows(&[vec![1.0, 0.75], vec![0.75, 1.0]]);
    assert!((&three - &want).frobenius_norm() < 1e-15);

    let spec = ValuationSpec::new(2, 2.0, CompositionFunction::odd_power(1.0, 2.0), 5.0).unwrap();
    let got = psi_evaluate(&spec, &SimpleFunction::indicator(2.0, sq)).unwrap();
    let want = MomentMatrix::from_rows(&[vec![4.0 / 3.0, -4.0], vec![6.0, 4.0 / 3.0]]);
    assert!((&got - &want).frobenius_norm() < 1e-14);

    let halves = SimpleFunction::new(2, vec![
        valuation_lab::functions::Piece::new(1.0, triangle()),
        valuation_lab::functions::Piece::new(1.0, poly(&[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])),
    ])
    .unwrap();
    let tiled = moment_of_simple(&halves);
    let want = MomentMatrix::from_rows(&[vec![1.0 / 3.0, 0.25], vec![0.25, 1.0 / 3.0]]);
    assert!((&tiled - &want).frobenius_norm() < 1e-15);
}

#[test]
fn product_operator_breaks_the_identity_by_hand() {
    // Disjoint cells C = [0,1]^2, C' = [1,2]x[0,1]: join = both, meet = 0.
    let kk = BlackBoxValuation::new("K*K", 2, 1.0, |h| {
        let m = moment_of_simple(h);
        Ok(m.matmul(&m))
    });
    let h = GridFunction::new(2, 1.0, [(vec![0, 0], 1.0)]).unwrap();
    let f = GridFunction::new(2, 1.0, [(vec![1, 0], 1.0)]).unwrap();
    let r = valuation_residual(&kk, &h, &f).unwrap();
    // (A + B)^2 - A^2 - B^2 = AB + BA
    let a = nalgebra::Matrix2::<f64>::new(1.0 / 3.0, 0.25, 0.25, 1.0 / 3.0);
    let b = nalgebra::Matrix2::new(7.0 / 3.0, 0.75, 0.75, 1.0 / 3.0);
    let hand = (a * b + b * a).norm();
    assert!((r - hand).abs() < 1e-14, "{r} vs {hand}");
    assert!(r > 1e-3);
}

#[test]
fn non_special_map_breaks_covariance_by_hand() {
    let phi = SLTransform::with_tolerance(nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]), 2.0).unwrap();
    let v = BlackBoxValuation::new("K", 2, 1.0, |h| Ok(moment_of_simple(h)));
    let h = SimpleFunction::indicator(1.0, Polytope::unit_cube(2));
    let r = covariance_residual(&v, &h, &phi).unwrap();
    // image [0,2]x[0,1] has M = [[8/3,1],[1,2/3]]; phi M phi^t = [[4/3,1/2],[1/2,1/3]]
    let lhs = nalgebra::Matrix2::<f64>::new(8.0 / 3.0, 1.0, 1.0, 2.0 / 3.0);
    let rhs = nalgebra::Matrix2::new(4.0 / 3.0, 0.5, 0.5, 1.0 / 3.0);
    let norm_v = nalgebra::Matrix2::<f64>::new(1.0 / 3.0, 0.25, 0.25, 1.0 / 3.0).norm();
    let hand = (lhs - rhs).norm() / (1.0 + norm_v);
    assert!((r - hand).abs() < 1e-13, "{r} vs {hand}");
}

#[test]
fn extraction_example() {
    let spec = ValuationSpec::new(2, 2.0, CompositionFunction::odd_power(1.0, 2.0), 5.0).unwrap();
    let e = extract_xi_and_s(&spec, &[-2.0, -1.0, 1.0, 2.0], &Polytope::unit_cube(2)).unwrap();
    let xi: Vec<f64> = e.samples.iter().map(|s| s.xi_hat).collect();
    for (got, want) in xi.iter().zip([-4.0, -1.0, 1.0, 4.0]) {
        assert!((got - want).abs() < 1e-14);
    }
    assert!((e.s_hat.unwrap() - 5.0).abs() < 1e-14);
    assert!(e.max_fit_residual <= 1e-10);
}

#[test]
fn decomposition_example() {
    let spec = ValuationSpec::new(2, 1.0, CompositionFunction::odd_power(1.0, 1.0), 5.0).unwrap();
    let c0 = Polytope::unit_cube(2);
    let c1 = Polytope::from_box(&AxisBox::cube(vec![1.0, 0.0], 1.0).unwrap());
    let r = decomposition_residual(&spec, &[(2.0, c0.clone()), (3.0, c1.clone())]).unwrap();
    assert!(r <= 1e-10);
    assert!(decomposition_residual(&spec, &[(2.0, c0), (-3.0, c1)]).is_err());
}

#[test]
fn sequence_columns_match_closed_forms() {
    let coeff = FunctionSequence::coefficient(1.5, Polytope::unit_cube(2));
    for k in [1usize, 4, 64] {
        for p in [1.0, 2.0, 3.0] {
            let want = (1.0 / k as f64) * (2.0f64 / 3.0).powf(1.0 / p);
            assert!((coeff.distance(k, p).unwrap() - want).abs() < 1e-14);
        }
    }
    let cubes = FunctionSequence::inner_cubes(1.0, triangle());
    // at delta = 2^-k the residual set has area 2^-(k+1)
    for k in [2usize, 3, 4] {
        let term = cubes.term(k).unwrap();
        let covered: f64 = term.pieces().iter().map(|q| q.support.volume()).sum();
        assert!((0.5 - covered - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
    }
}
