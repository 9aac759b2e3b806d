use std::path::PathBuf;

use atcr_core::controllers::transform_error;
use atcr_core::runner::{read_trace_csv, write_trace_csv, ObserverScoring, TRACE_VERSION_LINE};
use atcr_core::{
    compare, load_config, run_scenario, ControllerKind, DisturbanceSpec, ObserverKind, Reference,
    RunConfig, Variant,
};

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn with(controller: ControllerKind, observer: ObserverKind) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.controller.kind = controller;
    cfg.observer.kind = observer;
    cfg
}

#[test]
fn shipped_config_is_the_default() {
    let mut cfg = load_config(&workspace_root().join("configs/reference.toml")).unwrap();
    cfg.base_dir = PathBuf::new();
    assert_eq!(cfg, RunConfig::default());
}

#[test]
fn trace_is_self_consistent() {
    let cfg = RunConfig::default();
    let run = run_scenario(&cfg).unwrap();
    assert_eq!(
        run.trace.len(),
        cfg.sim.step_count() / cfg.output.decimation + 1
    );
    for row in &run.trace {
        assert_eq!(row.e1, row.x - row.xd);
        assert_eq!(row.e2, row.y - row.yd);
        let e = [row.e1, row.e2, row.e3];
        let rho = [row.rho1, row.rho2, row.rho3];
        let eta = [row.eta1, row.eta2, row.eta3];
        let mut outside = false;
        for i in 0..3 {
            let eps = cfg.envelope.eps[i];
            outside |= e[i].abs() >= eps * rho[i];
            if e[i].abs() < eps * rho[i] {
                assert!((eta[i] - transform_error(e[i], rho[i], eps)).abs() < 1e-12);
            }
        }
        assert_eq!(row.violation_flag == 1, outside, "t = {}", row.t);
    }
}

#[test]
fn violation_flags_match_forced_violations() {
    // An envelope that shrinks faster than the transient can follow.
    let mut cfg = with(ControllerKind::Ppc, ObserverKind::Asmdob);
    cfg.sim.t_final = 3.0;
    cfg.envelope.k_rho = 20.0;
    cfg.envelope.rho_inf = [0.001, 0.001, 0.001];
    let run = run_scenario(&cfg).unwrap();
    assert!(!run.events.is_empty());
    for row in &run.trace {
        let e = [row.e1, row.e2, row.e3];
        let rho = [row.rho1, row.rho2, row.rho3];
        let outside = (0..3).any(|i| e[i].abs() >= cfg.envelope.eps[i] * rho[i]);
        assert_eq!(row.violation_flag == 1, outside, "t = {}", row.t);
    }
    for ev in &run.events {
        assert!(ev.error.abs() >= ev.bound);
    }
}

#[test]
fn trace_csv_round_trips() {
    let mut cfg = RunConfig::default();
    cfg.sim.t_final = 2.0;
    let run = run_scenario(&cfg).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&run.trace, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRACE_VERSION_LINE));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("t,x,y,theta,xd,yd,v,omega,e1,e2,e3,d1,d2,d3,dhat1,"));
    let back = read_trace_csv(buf.as_slice()).unwrap();
    assert_eq!(back, run.trace);
}

#[test]
fn ppc_max_y_error_is_the_initial_error() {
    let run = run_scenario(&RunConfig::default()).unwrap();
    assert!(
        (run.summary_y.max_abs - 1.2).abs() < 1e-9,
        "{}",
        run.summary_y.max_abs
    );
}

#[test]
fn oracle_nominal_tracking() {
    let mut cfg = with(ControllerKind::Ppc, ObserverKind::Oracle);
    cfg.scenario.disturbance = DisturbanceSpec::None;
    cfg.sim.t_final = 10.0;
    let run = run_scenario(&cfg).unwrap();
    for (t, e) in run.series.t.iter().zip(&run.series.e) {
        if *t >= 5.0 {
            assert!(e[0].abs() < 1e-4 && e[1].abs() < 1e-4, "t = {t}, e = {e:?}");
        }
    }
}

#[test]
fn transformed_lyapunov_function_decreases_in_nominal_loop() {
    let mut cfg = with(ControllerKind::Ppc, ObserverKind::Oracle);
    cfg.scenario.disturbance = DisturbanceSpec::None;
    cfg.sim.t_final = 10.0;
    cfg.output.decimation = 1;
    let run = run_scenario(&cfg).unwrap();
    let v2: Vec<f64> = run
        .trace
        .iter()
        .map(|r| 0.5 * (r.eta1 * r.eta1 + r.eta2 * r.eta2 + r.eta3 * r.eta3))
        .collect();
    for (k, w) in v2.windows(2).enumerate() {
        assert!(
            w[1] <= w[0] + 1e-9,
            "V2 rose at t = {}: {} -> {}",
            run.trace[k + 1].t,
            w[0],
            w[1]
        );
    }
}

#[test]
fn smc_rejects_constant_disturbance() {
    let mut cfg = with(ControllerKind::Smc, ObserverKind::None);
    cfg.scenario.disturbance = DisturbanceSpec::Constant {
        value: [0.3, 0.0, 0.0],
    };
    cfg.sim.t_final = 20.0;
    let run = run_scenario(&cfg).unwrap();
    let start = run.series.t.partition_point(|t| *t < 10.0);
    let worst = run.series.e[start..]
        .iter()
        .map(|e| e[0].abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");
}

#[test]
fn pid_integral_removes_constant_offset() {
    let mut cfg = with(ControllerKind::Pid, ObserverKind::None);
    cfg.scenario.disturbance = DisturbanceSpec::Constant {
        value: [0.3, 0.0, 0.0],
    };
    cfg.scenario.reference = Reference::Line {
        start: [0.0, 0.0],
        velocity: [0.5, 0.0],
    };
    cfg.sim.initial_pose = atcr_core::RobotPose::new(0.0, 0.0, 0.0);
    cfg.sim.t_final = 40.0;
    let run = run_scenario(&cfg).unwrap();
    let last = run.series.e.last().unwrap();
    assert!(last[0].abs() < 0.005, "{last:?}");
}

#[test]
fn compare_single_variant_is_one_row() {
    let mut cfg = RunConfig::default();
    cfg.sim.t_final = 1.0;
    let cmp = compare(
        &[Variant {
            name: "only".into(),
            config: cfg,
            score_observer: false,
        }],
        &ObserverScoring::default(),
    )
    .unwrap();
    assert_eq!(cmp.controllers.len(), 1);
    assert_eq!(cmp.controllers[0].label, "only");
    assert!(cmp.observers.is_empty());
    assert_eq!(cmp.runs.len(), 1);
}

#[test]
fn table_disturbance_matches_constant() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("d.csv"),
        "t,d1,d2,d3\n0,0.2,-0.1,0.05\n100,0.2,-0.1,0.05\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "[sim]\nt_final = 3.0\n\n[scenario.disturbance]\nkind = \"table\"\npath = \"d.csv\"\n",
    )
    .unwrap();
    let table = run_scenario(&load_config(&dir.path().join("run.toml")).unwrap()).unwrap();

    let mut cfg = RunConfig::default();
    cfg.sim.t_final = 3.0;
    cfg.scenario.disturbance = DisturbanceSpec::Constant {
        value: [0.2, -0.1, 0.05],
    };
    let constant = run_scenario(&cfg).unwrap();
    assert_eq!(table.trace, constant.trace);
}

#[test]
fn every_pairing_runs_the_reference_scenario() {
    for controller in [
        ControllerKind::Ppc,
        ControllerKind::Smc,
        ControllerKind::Pid,
    ] {
        for observer in [
            ObserverKind::Asmdob,
            ObserverKind::Eso,
            ObserverKind::Oracle,
            ObserverKind::None,
        ] {
            let mut cfg = with(controller, observer);
            cfg.sim.t_final = 10.0;
            let run = run_scenario(&cfg).unwrap();
            assert!(run.summary_x.rms.is_finite() && run.summary_y.rms.is_finite());
        }
    }
}
