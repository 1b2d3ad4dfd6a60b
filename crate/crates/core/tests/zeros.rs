use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zero_lab::model::{Side, Snapshot};
use zero_lab::zeros::*;
use zero_lab::LabError;

const TZ: f64 = 1e-8;
const TD: f64 = 1e-4;

fn inv(t: f64, m: usize, f: impl Fn(f64) -> f64) -> ZeroInventory {
    count_zeros(&Snapshot::from_fn(t, 0.0, 1.0, m, f).unwrap(), TZ, TD).unwrap()
}

#[test]
fn sine_has_three_zeros() {
    let z = inv(0.0, 101, |x| (2.0 * PI * x).sin());
    assert_eq!(z.count(), 3);
    let locs = z.locations();
    assert!(locs[0].abs() < 1e-12 && (locs[1] - 0.5).abs() < 1e-12 && (locs[2] - 1.0).abs() < 1e-12);
    assert!(z.zeros.iter().all(|z| z.kind == ZeroKind::Simple));
    assert!(z.zeros[0].at_boundary && z.zeros[2].at_boundary && !z.zeros[1].at_boundary);
}

#[test]
fn constant_has_none() {
    assert_eq!(inv(0.0, 101, |_| 1.0).count(), 0);
}

#[test]
fn tangential_zero_is_multiple() {
    let z = inv(0.0, 101, |x| (x - 0.5) * (x - 0.5));
    assert_eq!(z.count(), 1);
    assert_eq!(z.zeros[0].kind, ZeroKind::Multiple);
    assert!((z.zeros[0].location - 0.5).abs() < 1e-12);
}

#[test]
fn identically_zero_profile_is_an_error() {
    let s = Snapshot::from_fn(0.3, 0.0, 1.0, 11, |_| 0.0).unwrap();
    assert_eq!(count_zeros(&s, TZ, TD), Err(LabError::ProfileZero { time: 0.3 }));
}

/// Sign changes of `p` on a fine grid, refined by bisection.
fn bisection_roots(p: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let n = 20_000;
    let mut roots = Vec::new();
    for k in 0..n {
        let (mut a, mut b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
        if p(a) == 0.0 {
            roots.push(a);
            continue;
        }
        if p(a).signum() == p(b).signum() {
            continue;
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if p(a).signum() == p(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if p(1.0) == 0.0 {
        roots.push(1.0);
    }
    roots
}

#[test]
fn random_quintics_match_root_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let k = rng.gen_range(0..=5usize);
        let mut roots: Vec<f64> = Vec::new();
        while roots.len() < k {
            let r = rng.gen_range(0.03..0.97);
            if roots.iter().all(|q| (q - r).abs() > 0.06) {
                roots.push(r);
            }
        }
        roots.sort_by(f64::total_cmp);
        // remaining degree: real roots outside [0, 1] and complex pairs
        let extra_real: Vec<f64> = (0..(5 - k) % 2).map(|_| rng.gen_range(1.2..3.0)).collect();
        let pairs: Vec<(f64, f64)> = (0..(5 - k) / 2).map(|_| (rng.gen_range(-1.0..2.0), rng.gen_range(0.2..1.0))).collect();
        let p = |x: f64| {
            let mut v = 1.0;
            for r in &roots {
                v *= x - r;
            }
            for r in &extra_real {
                v *= x - r;
            }
            for (c, d) in &pairs {
                v *= (x - c) * (x - c) + d * d;
            }
            v
        };
        let oracle = bisection_roots(&p);
        assert_eq!(oracle.len(), k, "oracle disagrees with construction in case {case}");
        let z = inv(0.0, 401, p);
        assert_eq!(z.count(), k, "case {case}: roots {roots:?}, found {:?}", z.locations());
        for (found, exact) in z.locations().iter().zip(&oracle) {
            assert!((found - exact).abs() < 2e-3);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn refinement_keeps_simple_counts(omega in 1.0f64..20.0, phi in 0.1f64..3.0) {
        let f = |x: f64| (omega * x + phi).sin();
        // true zeros: ωx + φ = jπ for x ∈ [0, 1]
        let lo = (phi / PI).ceil() as i64;
        let hi = ((omega + phi) / PI).floor() as i64;
        let truth = (hi - lo + 1).max(0) as usize;
        for j in lo..=hi {
            let x = (j as f64 * PI - phi) / omega;
            prop_assume!(x > 0.01 && x < 0.99);
        }
        let c1 = inv(0.0, 201, f).count();
        let c2 = inv(0.0, 401, f).count();
        prop_assert_eq!(c1, truth);
        prop_assert!(c2 <= c1);
        prop_assert_eq!(c2, truth);
    }
}

fn analytic_trace(t0: f64, t1: f64, dt: f64, m: usize, u: impl Fn(f64, f64) -> f64) -> ZeroTrace {
    let steps = ((t1 - t0) / dt).round() as usize;
    let invs: Vec<ZeroInventory> = (0..=steps)
        .map(|k| {
            let t = t0 + k as f64 * dt;
            inv(t, m, |x| u(x, t))
        })
        .collect();
    trace_zero_curves(&invs, None).unwrap()
}

#[test]
fn two_mode_boundary_exit() {
    let tr = analytic_trace(0.0, 0.05, 1e-4, 801, |x, t| {
        (-PI * PI * t).exp() * (PI * x).sin() + (-4.0 * PI * PI * t).exp() * (2.0 * PI * x).sin()
    });
    assert_eq!(tr.drops.len(), 1, "{:?}", tr.drops);
    let d = &tr.drops[0];
    assert_eq!((d.z_before, d.z_after), (3, 2));
    let t_star = 2f64.ln() / (3.0 * PI * PI);
    assert!((d.t_after - t_star).abs() <= 2e-3 && (d.t_before - t_star).abs() <= 2e-3);
    assert!(matches!(d.witnesses[..], [Witness::BoundaryExit { side: Side::Right, .. }]));
    assert!(tr.order_preserved());
}

#[test]
fn interior_merge() {
    let tr = analytic_trace(-0.02, 0.02, 1.6e-4, 801, |x, t| {
        (-PI * PI * t).exp() * (PI * x).sin() + (-9.0 * PI * PI * t).exp() * (3.0 * PI * x).sin()
    });
    let first = &tr.inventories[0];
    assert_eq!(first.count(), 4);
    assert!((first.zeros[1].location - 0.3530).abs() < 1e-3 && (first.zeros[2].location - 0.6470).abs() < 1e-3);
    let total: usize = tr.drops.iter().map(|d| d.z_before - d.z_after).sum();
    assert_eq!(total, 2);
    let d = &tr.drops[0];
    assert!(d.t_before <= 0.0 && tr.drops.last().unwrap().t_after >= 0.0);
    let merge = d.witnesses.iter().find(|w| matches!(w, Witness::Merge { .. })).expect("merge witness");
    assert!((merge.location() - 0.5).abs() <= 5e-3);
}

#[test]
fn stationary_eigenfunction_has_no_events() {
    let tr = analytic_trace(0.0, 0.1, 1e-3, 201, |x, _| (2.0 * PI * x).sin());
    assert!(tr.drops.is_empty());
    assert!(tr.counts().iter().all(|&c| c == 3));
    assert_eq!(tr.curves.len(), 3);
    assert!(tr.curves.iter().all(|c| c.locations.iter().all(|x| (x - c.locations[0]).abs() < 1e-12)));
}

fn samples(n: usize, t0: f64, t1: f64, w: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let ts: Vec<f64> = (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect();
    let ws = ts.iter().map(|&t| w(t)).collect();
    (ts, ws)
}

#[test]
fn constant_trace_has_no_runs() {
    let (t, w) = samples(101, 0.0, 1.0, |_| 1.0);
    let mc = classify_moments(&t, &w, None, TZ, 5, 2).unwrap();
    assert!(mc.runs.is_empty() && mc.moments.is_empty());
}

#[test]
fn crossing_is_nzn() {
    let (t, w) = samples(101, 0.0, 1.0, |t| t - 0.5);
    let mc = classify_moments(&t, &w, None, TZ, 5, 2).unwrap();
    assert_eq!(mc.moments.len(), 1);
    assert_eq!(mc.moments[0].label.to_string(), "NZN");
    assert!((mc.moments[0].t_start - 0.5).abs() < 1e-12);
    assert_eq!(mc.a_intervals, vec![AInterval { r: 0.0, s: 0.5, r1: 0.5, s1: 1.0 }]);
    // the same crossing between samples
    let (t, w) = samples(100, 0.0, 1.0, |t| t - 0.5);
    let mc = classify_moments(&t, &w, None, TZ, 5, 2).unwrap();
    assert_eq!(mc.moments.len(), 1);
    assert!(mc.runs[0].virtual_run);
    assert_eq!(mc.moments[0].label.to_string(), "NZN");
    assert!((mc.moments[0].t_start - 0.5).abs() < 1e-12);
}

#[test]
fn ramp_gives_zzn_and_zzz() {
    let (t, w) = samples(101, 0.0, 1.0, |t| f64::max(0.0, t - 0.5));
    let mc = classify_moments(&t, &w, None, TZ, 5, 2).unwrap();
    assert_eq!(mc.runs.len(), 1);
    assert_eq!((mc.runs[0].t_start, mc.runs[0].t_end), (0.0, 0.5));
    let labels: Vec<String> = mc.labels().iter().map(|l| l.to_string()).collect();
    assert_eq!(labels, vec!["ZZZ", "ZZN"]);
    assert!(mc.a_intervals.is_empty());
}

#[test]
fn oscillation_gives_x() {
    let (t, w) = samples(1001, -0.5, 0.5, |t| if t > 0.0 { t * t * (1.0 / t).sin() } else { t });
    let mc = classify_moments(&t, &w, None, TZ, 5, 2).unwrap();
    assert!(mc.has_x());
    let at_zero = mc.moments.iter().find(|m| m.t_start.abs() < 1e-9).unwrap();
    assert_eq!(at_zero.label.0, Context::N);
    assert_eq!(at_zero.label.1, Context::X);
}

#[test]
fn short_trace_rejected() {
    let (t, w) = samples(10, 0.0, 1.0, |t| t);
    assert!(classify_moments(&t, &w, None, TZ, 5, 2).is_err());
}
