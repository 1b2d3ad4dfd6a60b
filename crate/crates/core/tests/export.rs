use zero_lab::export::*;
use zero_lab::model::{Side, Snapshot};
use zero_lab::plot::{fronts_svg, z_staircase_svg, zero_curves_svg};
use zero_lab::scenarios::*;
use zero_lab::solver::solve_trajectory;
use zero_lab::zeros::{classify_side, trace_trajectory};

fn snapshots() -> Vec<Snapshot> {
    (0..4).map(|k| Snapshot::from_fn(0.1 * k as f64, -1.0, 2.0, 17, |x| x * x - 0.3 * k as f64).unwrap()).collect()
}

#[test]
fn binary_dump_round_trips() {
    let snaps = snapshots();
    let mut buf = Vec::new();
    write_binary(&snaps, &mut buf).unwrap();
    assert_eq!(&buf[..8], BINARY_MAGIC);
    assert_eq!(buf.len(), 8 + 16 + 4 * 8 * (2 * 17 + 1));
    assert_eq!(read_binary(buf.as_slice()).unwrap(), snaps);

    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(read_binary(bad.as_slice()).is_err());
    assert!(read_binary(&buf[..buf.len() - 3]).is_err());

    let mut ragged = snaps.clone();
    ragged.push(Snapshot::from_fn(1.0, 0.0, 1.0, 5, |x| x).unwrap());
    assert!(write_binary(&ragged, &mut Vec::new()).is_err());
}

#[test]
fn profiles_are_long_format() {
    let csv = profiles_csv(&snapshots());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x,u");
    assert_eq!(lines.len(), 1 + 4 * 17);
    assert_eq!(lines[1], "0,-1,1");
}

#[test]
fn trace_and_events_of_two_mode_heat() {
    let cfg = two_mode_heat();
    let traj = solve_trajectory(&cfg).unwrap();
    let zt = trace_trajectory(&traj, &cfg.tolerances).unwrap();
    let moments = [classify_side(&traj, Side::Left, &cfg.tolerances).unwrap(), classify_side(&traj, Side::Right, &cfg.tolerances).unwrap()];

    let csv = trace_csv(&traj, &zt);
    assert!(csv.starts_with("t,Z,w1,w2\n"));
    assert_eq!(csv.lines().count(), 1 + traj.snapshots.len());

    let log = events_log(&zt, &moments);
    let events: Vec<serde_json::Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let times: Vec<f64> = events.iter().map(|e| e["t"].as_f64().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    let kinds: Vec<&str> = events.iter().map(|e| e["type"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"drop") && kinds.contains(&"boundary-exit") && kinds.contains(&"moment-label"));
    let exit = events.iter().find(|e| e["type"] == "boundary-exit").unwrap();
    assert_eq!(exit["payload"]["side"], "right");
}

#[test]
fn free_boundary_trace_has_front_columns() {
    let cfg = stefan_conservation(51, 5e-3, 0.1);
    let traj = solve_trajectory(&cfg).unwrap();
    let zt = trace_trajectory(&traj, &cfg.tolerances).unwrap();
    let csv = trace_csv(&traj, &zt);
    assert!(csv.starts_with("t,Z,w1,w2,g,h,Q\n"));
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last.len(), 7);
    assert!(last[4] < -1.0 && last[5] > 1.0);

    let svg = fronts_svg(traj.fronts.as_ref().unwrap());
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 2);
}

#[test]
fn figures_are_svg() {
    let cfg = interior_merge();
    let traj = solve_trajectory(&cfg).unwrap();
    let zt = trace_trajectory(&traj, &cfg.tolerances).unwrap();
    let stairs = z_staircase_svg(&zt);
    assert!(stairs.starts_with("<svg") && stairs.trim_end().ends_with("</svg>"));
    assert_eq!(stairs.matches("<polyline").count(), 1);
    let curves = zero_curves_svg(&zt);
    assert!(curves.matches("<polyline").count() >= 2);
    // the merge witness is marked
    assert!(curves.contains("<circle"));
}

#[test]
fn builtins_validate() {
    for name in BUILTINS {
        let cfg = builtin(name).unwrap_or_else(|| panic!("{name}"));
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    assert!(builtin("nope").is_none());
}

#[test]
fn random_scenarios_are_seeded() {
    assert_eq!(random_linear(3, 17), random_linear(3, 17));
    assert_ne!(random_linear(3, 17), random_linear(4, 17));
    assert_ne!(random_linear(3, 17), random_linear(3, 18));
    for i in 0..30 {
        let cfg = random_linear(0, i);
        cfg.validate().unwrap();
        for k in 0..=20 {
            let (x, t) = (k as f64 / 20.0, 0.01 * k as f64);
            let a = cfg.coefficients.a(x, t);
            assert!((0.5..=2.0).contains(&a), "a = {a}");
        }
        let (nodes, vals) = cfg.initial_nodes();
        let changes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert!((1..=6).contains(&changes), "{} sign changes on {} nodes", changes, nodes.len());

        let rad = random_radial(0, i);
        rad.validate().unwrap();
        assert!(rad.boundary.left.label() == "neumann" && rad.boundary.right.label() == "robin");
    }
}
