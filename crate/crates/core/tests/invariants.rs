use std::sync::Arc;

use proptest::prelude::*;

use logman::fit::log_spaced;
use logman::green::{log_substitution, poisson_solve};
use logman::logistic::{solve_bvp_monotone, IterationSettings};
use logman::nonexistence::{nonintegrability_from_samples, params_check, NonexistenceParams, Theorem};
use logman::radial::Geometry;
use logman::spectrum::dirichlet_bottom;
use logman::{fmt17, Coefficient, LogisticProblem, ModelManifold, RadialField, RadialGrid};

fn e3() -> ModelManifold {
    ModelManifold::euclidean(3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn discrete_divergence_theorem(coeffs in proptest::collection::vec(-2.0f64..2.0, 4), curvature in 0.1f64..2.0) {
        let m = ModelManifold::hyperbolic(3, curvature).unwrap();
        let grid = Arc::new(RadialGrid::uniform(2.0, 60).unwrap());
        let u = RadialField::from_fn(grid.clone(), |r| coeffs.iter().enumerate().map(|(k, c)| c * r.powi(k as i32)).sum());
        let g = Geometry::new(&m, grid.clone()).unwrap();
        let lap = g.laplacian(u.values());
        let last = grid.len() - 1;
        let total: f64 = (0..last).map(|i| g.volumes()[i] * lap[i]).sum();
        let flux = g.faces()[last - 1] * (u.values()[last] - u.values()[last - 1]);
        prop_assert!((total - flux).abs() <= 1e-9 * (1.0 + flux.abs()));
    }

    #[test]
    fn constant_shift_moves_the_bottom(c in -3.0f64..3.0, mu in 0.0f64..4.0) {
        let grid = Arc::new(RadialGrid::uniform(1.0, 200).unwrap());
        let base = dirichlet_bottom(&e3(), &Coefficient::Constant(0.0), 0.0, grid.clone()).unwrap().eigenvalue;
        let shifted = dirichlet_bottom(&e3(), &Coefficient::Constant(c), mu, grid).unwrap().eigenvalue;
        prop_assert!((shifted - (base - mu * c)).abs() <= 1e-7 * (1.0 + base.abs()));
    }

    #[test]
    fn monotone_iterates_are_monotone(a in -1.0f64..2.0, b in 0.2f64..3.0, boundary in 0.1f64..3.0, cubic in any::<bool>()) {
        let sigma = if cubic { 3.0 } else { 2.0 };
        let p = LogisticProblem::new(e3(), Coefficient::Constant(a), Coefficient::Constant(b), sigma).unwrap();
        let grid = Arc::new(RadialGrid::uniform(2.0, 80).unwrap());
        let ceiling = boundary.max(p.equilibrium_bound(2.0));
        let sub = RadialField::constant(grid.clone(), 0.0);
        let sup = RadialField::constant(grid.clone(), ceiling);
        let rep = solve_bvp_monotone(&p, grid, boundary, &sub, &sup, &IterationSettings::default()).unwrap();
        for r in &rep.ledger {
            prop_assert!(r.descending_increase <= 1e-12 && r.ascending_decrease <= 1e-12);
        }
        let lower = rep.lower.unwrap();
        for (d, l) in rep.solution.values().iter().zip(lower.values()) {
            prop_assert!(*d >= *l - 1e-12);
        }
        prop_assert!(rep.solution.values()[..rep.solution.values().len() - 1].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn params_check_is_exact_and_mu_window_closes(h in 1.0f64..4.0, mu in 2.0f64..10.0) {
        let beyond = NonexistenceParams { h, sigma: 1.5, mu: mu + 1e-9, ..Default::default() };
        prop_assert!(!params_check(Theorem::Thm33, &beyond).overall().holds());
        let rep = params_check(Theorem::Thm33, &NonexistenceParams { h, sigma: 1.5, ..Default::default() });
        let again = params_check(Theorem::Thm33, &NonexistenceParams { h, sigma: 1.5, ..Default::default() });
        prop_assert_eq!(rep.overall(), again.overall());
    }

    #[test]
    fn nonintegrability_is_scale_invariant(s in 0.0f64..3.0, k in -1.0f64..2.0, scale in 1e-6f64..1e6) {
        let rs = log_spaced(10.0, 1e4, 32);
        let f: Vec<f64> = rs.iter().map(|r| r.powf(s) * r.ln().powf(k)).collect();
        let g: Vec<f64> = f.iter().map(|v| v * scale).collect();
        let a = nonintegrability_from_samples(&rs, &f, 0.0, 0.05).unwrap();
        let b = nonintegrability_from_samples(&rs, &g, 0.0, 0.05).unwrap();
        prop_assert_eq!(a.divergent, b.divergent);
        prop_assert!((a.power - b.power).abs() < 1e-8);
    }

    #[test]
    fn poisson_is_linear_and_monotone(c1 in 0.0f64..2.0, c2 in 0.0f64..2.0, width in 0.3f64..1.5) {
        let grid = Arc::new(RadialGrid::uniform(3.0, 600).unwrap());
        let bump = RadialField::from_fn(grid.clone(), |r| if r < width { (1.0 - (r / width).powi(2)).powi(2) } else { 0.0 });
        let m = e3();
        let base = poisson_solve(&m, &bump).unwrap().v;
        let scaled = poisson_solve(&m, &bump.map(|_, v| c1 * v)).unwrap().v;
        for (x, y) in base.values().iter().zip(scaled.values()) {
            prop_assert!((c1 * x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
        let bigger = poisson_solve(&m, &bump.map(|_, v| (c1 + c2) * v)).unwrap().v;
        for (x, y) in scaled.values().iter().zip(bigger.values()) {
            prop_assert!(*y <= *x + 1e-12);
        }
        let sol = poisson_solve(&m, &bump).unwrap();
        let sub = log_substitution(&m, &sol.v, &sol.source_average).unwrap();
        prop_assert!(sub.lower_bound >= 1.0);
    }
}
