use proptest::prelude::*;

use zero_lab::expr::Expr;
use zero_lab::harness::standard_checks;
use zero_lab::model::*;
use zero_lab::scenarios::{random_linear, random_radial};
use zero_lab::solver::solve_trajectory;
use zero_lab::zeros::trace_trajectory;

/// `Σ c_k sin(kπx)`, which vanishes at both ends of `[0, 1]`.
fn sine_series(coef: &[f64]) -> Profile {
    let terms: Vec<String> = coef.iter().enumerate().map(|(k, c)| format!("{c}*sin({}*pi*x)", k + 1)).collect();
    Profile::Expr(Expr::parse(&terms.join(" + ")).unwrap())
}

fn dirichlet_heat(coef: &[f64], c: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(
        "prop",
        CoefficientField::constant(1.0, 0.0, c),
        MovingDomain::fixed(0.0, 1.0),
        BoundaryPair::both(BoundaryCondition::DirichletZero),
        sine_series(coef),
    );
    cfg.grid.nodes = 101;
    cfg.time = TimeSettings::new(0.02, 2e-4);
    cfg
}

fn coefficients() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2..6).prop_filter("nonzero", |v| v.iter().any(|c| c.abs() > 0.1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn configs_survive_json(seed in 0u64..1000, idx in 0u64..50, radial in any::<bool>()) {
        let cfg = if radial { random_radial(seed, idx) } else { random_linear(seed, idx) };
        let back = build_scenario(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn maximum_principle(coef in coefficients(), c in -3.0f64..=0.0) {
        let cfg = dirichlet_heat(&coef, c);
        let traj = solve_trajectory(&cfg).unwrap();
        let s0 = &traj.snapshots[0];
        let hi = s0.values.iter().cloned().fold(0.0, f64::max);
        let lo = s0.values.iter().cloned().fold(0.0, f64::min);
        for s in &traj.snapshots {
            for &u in &s.values {
                prop_assert!(u <= hi + 1e-9 && u >= lo - 1e-9, "u = {} outside [{}, {}] at t = {}", u, lo, hi, s.t);
            }
        }
    }

    #[test]
    fn dirichlet_ends_count_once_each(coef in coefficients()) {
        let cfg = dirichlet_heat(&coef, 0.0);
        let zt = trace_trajectory(&solve_trajectory(&cfg).unwrap(), &cfg.tolerances).unwrap();
        for inv in &zt.inventories {
            let ends: Vec<f64> = inv.zeros.iter().filter(|z| z.at_boundary).map(|z| z.location).collect();
            prop_assert_eq!(ends, vec![0.0, 1.0]);
        }
    }

    #[test]
    fn zero_curves_never_cross(coef in coefficients()) {
        let cfg = dirichlet_heat(&coef, 0.0);
        let zt = trace_trajectory(&solve_trajectory(&cfg).unwrap(), &cfg.tolerances).unwrap();
        for k in 1..zt.inventories.len() {
            let alive: Vec<_> = zt.curves.iter().filter(|c| c.at(k - 1).is_some() && c.at(k).is_some()).collect();
            for (i, a) in alive.iter().enumerate() {
                for b in &alive[i + 1..] {
                    let before = a.at(k - 1).unwrap() - b.at(k - 1).unwrap();
                    let after = a.at(k).unwrap() - b.at(k).unwrap();
                    prop_assert!(before * after > 0.0, "curves {} and {} swap at sample {}", a.id, b.id, k);
                }
            }
        }
    }

    #[test]
    fn checks_are_reproducible(idx in 0u64..100) {
        let cfg = random_linear(7, idx);
        let traj = solve_trajectory(&cfg).unwrap();
        let a = standard_checks(&traj, &cfg.tolerances, &cfg.boundary).unwrap();
        let b = standard_checks(&traj, &cfg.tolerances, &cfg.boundary).unwrap();
        prop_assert_eq!(&a.reports, &b.reports);
        prop_assert_eq!(solve_trajectory(&cfg).unwrap(), traj);
    }
}
