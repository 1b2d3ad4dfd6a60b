use std::f64::consts::PI;

use zero_lab::expr::Expr;
use zero_lab::model::*;
use zero_lab::solver::solve_trajectory;
use zero_lab::stefan::*;

fn stefan_cfg(u0: &str, g0: f64, h0: f64, m: usize, horizon: f64, dt: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(
        "stefan",
        CoefficientField::heat(),
        MovingDomain::fixed(g0, h0),
        BoundaryPair::both(BoundaryCondition::FreeStefan { mu: 1.0 }),
        Profile::Expr(Expr::parse(u0).unwrap()),
    );
    cfg.grid.nodes = m;
    cfg.time = TimeSettings::new(horizon, dt);
    cfg
}

fn state(g: f64, h: f64, m: usize, f: impl Fn(f64) -> f64) -> FreeBoundaryState {
    FreeBoundaryState::new(Snapshot::from_fn(0.0, g, h, m, f).unwrap(), 1.0).unwrap()
}

#[test]
fn slope_exact_on_quadratics() {
    let s = state(0.3, 1.3, 11, |x| 2.0 * (x - 0.3) * (1.3 - x));
    assert!((boundary_slope(&s, Side::Right) + 2.0).abs() < 1e-12);
    assert!((boundary_slope(&s, Side::Left) - 2.0).abs() < 1e-12);
    let z = state(0.0, 1.0, 11, |_| 0.0);
    assert_eq!(boundary_slope(&z, Side::Right), 0.0);
}

#[test]
fn slope_second_order_on_sine() {
    let err = |m: usize| (boundary_slope(&state(0.0, 1.0, m, |x| (PI * x).sin()), Side::Right) + PI).abs();
    let (e1, e2) = (err(51), err(101));
    assert!(e2 < 2e-3 && (3.5..4.5).contains(&(e1 / e2)), "{e1} {e2}");
}

#[test]
fn zero_state_is_stationary() {
    let s = state(-1.0, 1.0, 21, |_| 0.0);
    let next = step_free_boundary(&s, &CoefficientField::heat(), 1e-3).unwrap();
    assert_eq!((next.g, next.h), (-1.0, 1.0));
    assert!(next.profile.values.iter().all(|&v| v == 0.0));
}

#[test]
fn conserved_quantity_without_reaction() {
    let cfg = stefan_cfg("cos(pi*x/2)", -1.0, 1.0, 201, 1.0, 2e-3);
    let traj = solve_trajectory(&cfg).unwrap();
    let fronts = traj.fronts.as_ref().unwrap();
    let q0 = fronts[0].q;
    for f in fronts {
        assert!((f.q - q0).abs() <= 1e-3 * q0, "t={} Q={} Q0={q0}", f.t, f.q);
    }
    for w in fronts.windows(2) {
        assert!(w[1].g <= w[0].g && w[1].h >= w[0].h);
    }
    for s in &traj.snapshots {
        assert!(s.left().abs() <= 1e-12 * s.scale() && s.right().abs() <= 1e-12 * s.scale());
    }
}

#[test]
fn bistable_front_advances() {
    let mut cfg = stefan_cfg("0.95*(1 - x^2)^2 * (1 + x^2)", -1.0, 1.0, 201, 1.0, 2e-3);
    cfg.coefficients.reaction = Some(Reaction::Bistable { theta: TimeFunction::Constant(0.3) });
    let traj = solve_trajectory(&cfg).unwrap();
    let fronts = traj.fronts.as_ref().unwrap();
    for w in fronts.windows(2) {
        assert!(w[1].h > w[0].h, "h stalled at t={}", w[1].t);
    }
    for (k, s) in traj.boundary.slopes[1].iter().enumerate().skip(1) {
        assert!(*s < 0.0, "u_x(h) = {s} at sample {k}");
    }
}

#[test]
fn front_cfl_violation_is_reported() {
    let s = state(0.0, 1.0, 21, |x| 50.0 * x * (1.0 - x));
    assert!(matches!(step_free_boundary(&s, &CoefficientField::heat(), 0.01), Err(zero_lab::LabError::Solver { .. })));
}

#[test]
fn max_location_tracking() {
    let snap = |t: f64, c: f64| Snapshot::from_fn(t, 0.0, 1.0, 101, |x| (-(x - c) * (x - c) * 20.0).exp()).unwrap();
    let tr = track_max_location(&[snap(0.0, 0.4), snap(1.0, 0.4)]);
    assert!(tr.gamma.iter().all(|g| (g - 0.4).abs() < 1e-4));
    let tr = track_max_location(&[snap(0.0, 0.4), snap(1.0, 0.5)]);
    assert!((tr.drift(1.0).unwrap() - 0.1).abs() < 1e-3);
    let flat = Snapshot::from_fn(2.0, 0.0, 1.0, 11, |x| if (0.3..=0.61).contains(&x) { 1.0 } else { 0.0 }).unwrap();
    let tr = track_max_location(&[snap(0.0, 0.4), flat]);
    assert_eq!(tr.plateau, vec![false, true]);
    assert_eq!(tr.drift(1.0), Some(0.0));
}

#[test]
fn front_csv_header() {
    let csv = fronts_csv(&[zero_lab::solver::FrontSample { t: 0.0, g: -1.0, h: 1.0, q: 2.5 }]);
    assert_eq!(csv, "t,g,h,Q\n0,-1,1,2.5\n");
}
