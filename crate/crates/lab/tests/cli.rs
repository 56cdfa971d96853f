use std::process::Command;

use signorini_lab::io::read_report;
use signorini_lab::pipeline::{run, Overrides};
use signorini_lab::plot::{render, PlotKind};
use signorini_lab::{exit, scenarios, ScenarioConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_signorini"))
}

#[test]
fn list_scenarios_prints_every_shipped_name() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert_eq!(out.status.code(), Some(exit::PASS));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in scenarios::names() {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn run_writes_outputs_and_plots_read_them_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "radial-exact", "--resolution", "16", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::PASS), "{}", String::from_utf8_lossy(&out.stderr));
    for ext in ["json", "node", "ele", "edge", "K.coo", "M.coo", "gap.csv"] {
        assert!(dir.path().join(format!("radial-exact.{ext}")).is_file(), "missing .{ext}");
    }
    let report = read_report(&dir.path().join("radial-exact.json")).unwrap();
    assert_eq!(report.resolution, 16);
    let csv = render(&report, PlotKind::BoundaryTrace).unwrap();
    assert!(csv.starts_with("segment,arc_length,gap,multiplier\n"));
    assert_eq!(csv.lines().count(), report.trace.len() + 1);

    let plot = bin()
        .args(["plot", "--kind", "coverage-vs-alpha"])
        .arg(dir.path().join("radial-exact.json"))
        .output()
        .unwrap();
    assert_eq!(plot.status.code(), Some(exit::ERROR));
    assert!(String::from_utf8_lossy(&plot.stderr).contains("coverage-vs-alpha"));
}

#[test]
fn overrides_reach_the_solver() {
    let out = bin()
        .args(["run", "theorem1-disk", "--resolution", "16", "--alpha-schedule", "1,0.01,0.0001", "--method", "pgs", "--tol", "1e-9"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("theorem1-disk: resolution 16"), "{text}");
    let cfg = scenarios::get("theorem1-disk").unwrap();
    let ov = Overrides {
        resolution: Some(16),
        alpha_schedule: Some(vec![1.0, 1e-2, 1e-4]),
        kkt_tol: Some(1e-9),
        method: Some(signorini_core::solver::Method::Pgs),
    };
    let rep = run(&cfg, &ov).unwrap();
    assert_eq!(rep.solves.iter().map(|s| s.alpha).collect::<Vec<_>>(), vec![1.0, 1e-2, 1e-4]);
    assert!(rep.solves.iter().all(|s| s.kkt_tol == 1e-9 && s.residuals.max() <= 1e-9));
}

#[test]
fn unknown_scenario_and_bad_config_exit_with_error() {
    let out = bin().args(["run", "no-such-scenario"]).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::ERROR));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"name": "bad", "domain": {"kind": "disk", "radius": 1}, "fields": {"f": "1 +"}, "boundary": {"boundary": "signorini"}}"#).unwrap();
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::ERROR));
}

#[test]
fn failed_assertion_exits_with_two() {
    let mut cfg: ScenarioConfig = scenarios::get("radial-exact").unwrap();
    cfg.name = "radial-too-strict".into();
    cfg.resolutions = vec![16, 32];
    cfg.expect.flux_rel_tol = Some(1e-12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::FAILED));
    assert!(String::from_utf8_lossy(&out.stdout).contains("failed: relative error of the contact flux"));
}

#[test]
fn verify_barriers_reports_each_certificate() {
    let out = bin().args(["verify-barriers", "ring-example"]).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::PASS));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ring barrier"));
}

#[test]
fn reports_are_reproducible() {
    let cfg = scenarios::get("theorem3-intrinsic").unwrap();
    let ov = Overrides { resolution: Some(32), ..Overrides::default() };
    let a = run(&cfg, &ov).unwrap().without_timings();
    let b = run(&cfg, &ov).unwrap().without_timings();
    assert_eq!(a, b);
}

#[test]
fn batch_keeps_input_order() {
    let cfgs: Vec<ScenarioConfig> =
        ["radial-exact", "ring-example"].iter().map(|n| scenarios::get(n).unwrap()).collect();
    let ov = Overrides { resolution: Some(16), ..Overrides::default() };
    let names: Vec<String> =
        signorini_lab::run_batch(&cfgs, &ov).into_iter().map(|r| r.unwrap().report.scenario).collect();
    assert_eq!(names, ["radial-exact", "ring-example"]);
}
