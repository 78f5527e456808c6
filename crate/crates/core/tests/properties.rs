use proptest::prelude::*;
use valuation_lab::functions::{lattice_join_meet, CompositionFunction, GridFunction, SimpleFunction};
use valuation_lab::geometry::{
    clip_halfspace, polytope_moment, random_polytope, transform_polytope, MomentMatrix, Polytope,
};
use valuation_lab::harness::cases::bounded_sl_matrix;
use valuation_lab::io;
use valuation_lab::valuation::{covariance_residual, moment_of_simple, psi_evaluate, ValuationSpec};

fn grid(n: usize) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec((prop::collection::vec(-3i64..3, n), -3.0f64..3.0), 1..8)
        .prop_map(move |cells| GridFunction::new(n, 0.5, cells).unwrap())
}

fn grid_pair() -> impl Strategy<Value = (GridFunction, GridFunction)> {
    (2usize..=3).prop_flat_map(|n| (grid(n), grid(n)))
}

fn polytope() -> impl Strategy<Value = Polytope> {
    (any::<u64>(), 2usize..=3, 0usize..6, 0.3f64..2.0)
        .prop_map(|(seed, n, extra, scale)| random_polytope(seed, n, n + 1 + extra, scale).unwrap())
}

fn close(a: &MomentMatrix, b: &MomentMatrix, rel: f64) -> bool {
    (a - b).frobenius_norm() <= rel * (1.0 + a.frobenius_norm().max(b.frobenius_norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_laws((h, f) in grid_pair()) {
        let (join, meet) = lattice_join_meet(&h, &f).unwrap();
        let (join2, meet2) = lattice_join_meet(&f, &h).unwrap();
        prop_assert_eq!(&join, &join2);
        prop_assert_eq!(&meet, &meet2);
        // absorption
        prop_assert_eq!(h.join(&h.meet(&f).unwrap()).unwrap(), h.clone());
        prop_assert_eq!(h.meet(&h.join(&f).unwrap()).unwrap(), h.clone());
        // max + min = sum, cellwise
        for (k, _) in h.cells().chain(f.cells()) {
            let lhs = join.get(k) + meet.get(k);
            prop_assert!((lhs - (h.get(k) + f.get(k))).abs() < 1e-15);
        }
    }

    #[test]
    fn norm_power_is_a_valuation((h, f) in grid_pair(), p in 1.0f64..3.0) {
        let (join, meet) = lattice_join_meet(&h, &f).unwrap();
        let s = |g: &GridFunction| g.to_simple().lp_norm_pow(p);
        let lhs = s(&join) + s(&meet);
        let rhs = s(&h) + s(&f);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn monotone_xi_preserves_order((h, f) in grid_pair(), p in 1.0f64..3.0) {
        let xi = CompositionFunction::odd_power(1.0, p);
        let (join, meet) = lattice_join_meet(&h, &f).unwrap();
        let (cj, cm) = (join.compose(&xi), meet.compose(&xi));
        for (k, _) in join.cells().chain(meet.cells()) {
            prop_assert!(cm.get(k) <= cj.get(k));
        }
    }

    #[test]
    fn moment_is_homogeneous(p in polytope(), c in -4.0f64..4.0) {
        let h = SimpleFunction::indicator(1.0, p.clone());
        let scaled = moment_of_simple(&h.scale(c));
        prop_assert!(close(&scaled, &(moment_of_simple(&h) * c), 1e-14));
    }

    #[test]
    fn special_linear_maps_preserve_volume(p in polytope(), seed in any::<u64>()) {
        let phi = bounded_sl_matrix(seed, p.dim(), 50.0).unwrap();
        let image = transform_polytope(&phi, &p).unwrap();
        prop_assert!((image.volume() - p.volume()).abs() <= 1e-11 * (1.0 + p.volume()));
    }

    #[test]
    fn moment_is_covariant(p in polytope(), seed in any::<u64>()) {
        let phi = bounded_sl_matrix(seed, p.dim(), 50.0).unwrap();
        let image = polytope_moment(&transform_polytope(&phi, &p).unwrap());
        let pushed = polytope_moment(&p).congruence(phi.matrix());
        prop_assert!(close(&image, &pushed, 1e-10));
        let h = SimpleFunction::indicator(1.5, p);
        prop_assert!(covariance_residual(&valuation_lab::valuation::BlackBoxValuation::new(
            "K", h.dim(), 1.0, |g| Ok(moment_of_simple(g))), &h, &phi).unwrap() <= 1e-9);
    }

    #[test]
    fn moment_is_psd_with_trace_mu(p in polytope()) {
        let m = polytope_moment(&p);
        prop_assert!(m.is_symmetric(1e-15));
        prop_assert!(m.min_symmetric_eigenvalue() >= -1e-14);
        prop_assert!((m.trace() - p.mu_measure()).abs() <= 1e-14 * (1.0 + m.trace()));
    }

    #[test]
    fn moment_is_additive_under_clipping(p in polytope(), angle in 0.0f64..std::f64::consts::TAU, offset in -0.5f64..0.5) {
        let n = p.dim();
        let mut u = vec![0.0; n];
        u[0] = angle.cos();
        u[1] = angle.sin();
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let below = clip_halfspace(&p, &u, offset);
        let above = clip_halfspace(&p, &neg, -offset);
        let sum = &polytope_moment(&below) + &polytope_moment(&above);
        prop_assert!(close(&sum, &polytope_moment(&p), 1e-11));
    }

    #[test]
    fn psi_at_zero_is_the_rotation_term(s in -10.0f64..10.0, p in 1.0f64..3.0) {
        let spec = ValuationSpec::new(2, p, CompositionFunction::odd_power(1.0, p), s).unwrap();
        let z = psi_evaluate(&spec, &SimpleFunction::zero(2)).unwrap();
        prop_assert_eq!(z.get(0, 1), -s);
        prop_assert_eq!(z.get(1, 0), s);
        prop_assert_eq!(z.get(0, 0), 0.0);
    }

    #[test]
    fn documents_round_trip_bit_exactly(p in polytope(), (h, _) in grid_pair()) {
        let text = io::to_string(&p).unwrap();
        let back: Polytope = io::from_str(&text).unwrap();
        prop_assert_eq!(io::to_string(&back).unwrap(), text);
        let m = polytope_moment(&p);
        let mb: MomentMatrix = io::from_str(&io::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(m, mb);
        let simple = h.to_simple();
        let st = io::to_string(&simple).unwrap();
        let sb: SimpleFunction = io::from_str(&st).unwrap();
        prop_assert_eq!(io::to_string(&sb).unwrap(), st);
        let gb: GridFunction = io::from_str(&io::to_string(&h).unwrap()).unwrap();
        prop_assert_eq!(gb, h);
    }
}
