use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const REFERENCE: &str = include_str!("../scenarios/reference.toml");

fn asvplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asvplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn plan(scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["plan", "--scenario", s(scenario), "--out", s(out)];
    args.extend_from_slice(extra);
    asvplan(&args)
}

#[test]
fn plan_simulate_report_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "reference.toml", REFERENCE);
    let run = tmp.path().join("min_input");

    let out = plan(&scenario, &run, &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "trajectory.csv",
        "waypoints.csv",
        "corridors.csv",
        "metrics.json",
        "plot.svg",
    ] {
        assert!(run.join(f).is_file(), "missing {f}");
    }

    let traj = run.join("trajectory.csv");
    let out = asvplan(&[
        "simulate",
        "--trajectory",
        s(&traj),
        "--scenario",
        s(&scenario),
        "--out",
        s(&run),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in ["sim_trajectory.csv", "sim_metrics.json", "sim_plot.svg"] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let sim: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("sim_metrics.json")).unwrap())
            .unwrap();
    assert_eq!(sim["objective"], "min-input");
    assert!(sim["terminal_error"].as_f64().unwrap() < 0.5);
    assert!(sim["min_obstacle_distance"].as_f64().unwrap() > 0.0);

    let accel = tmp.path().join("min_accel");
    let out = plan(&scenario, &accel, &["--objective", "min-accel"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = asvplan(&["report", "--runs", s(&run), s(&accel)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = table
        .lines()
        .filter(|l| l.starts_with("min_input") || l.starts_with("min_accel"))
        .collect();
    assert_eq!(rows.len(), 2, "{table}");
}

#[test]
fn plot_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "reference.toml", REFERENCE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(plan(&scenario, &a, &["--seed", "3"]).status.code(), Some(0));
    assert_eq!(plan(&scenario, &b, &["--seed", "3"]).status.code(), Some(0));
    for f in [
        "plot.svg",
        "trajectory.csv",
        "waypoints.csv",
        "corridors.csv",
    ] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn start_inside_an_obstacle_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = REFERENCE.replacen(
        "[start]\nx = 2.0\ny = 15.0",
        "[start]\nx = 14.0\ny = 12.0",
        1,
    );
    assert_ne!(text, REFERENCE);
    let scenario = write_scenario(tmp.path(), "bad.toml", &text);
    let out = plan(&scenario, &tmp.path().join("run"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("start"), "{err}");
    assert!(!tmp.path().join("run").exists());
}

#[test]
fn walled_off_goal_exits_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let wall = "margin = 0.1\n\n[[map.obstacles]]\nkind = \"rect\"\ncx = 10.0\ncy = 10.0\nlength = 1.0\nwidth = 20.0\n";
    let text = REFERENCE.replacen("margin = 0.1\n", wall, 1).replacen(
        "max_iterations = 5000",
        "max_iterations = 800",
        1,
    );
    let scenario = write_scenario(tmp.path(), "walled.toml", &text);
    let out = plan(&scenario, &tmp.path().join("run"), &[]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn malformed_inputs_exit_with_code_one() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "reference.toml", REFERENCE);

    let bad_toml = write_scenario(
        tmp.path(),
        "typo.toml",
        &REFERENCE.replacen("[vessel]\nm = 29.0", "[vessel]\nmass = 29.0", 1),
    );
    let out = plan(&bad_toml, &tmp.path().join("run"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = "t,x,y,psi,u,v,r,du,dv,dr,tau_u,tau_r,F1,F2,segment\n\
               0,2,15,0,0,0,0,0,0,0,0,0,0,0,0\n\
               1,2.1,15,0,0.1,0,0,0,0,0,1,0,0.5,0.5,0\n\
               0.5,2.2,15,0,0.1,0,0,0,0,0,1,0,0.5,0.5,0\n";
    let traj = tmp.path().join("tampered.csv");
    std::fs::write(&traj, csv).unwrap();
    let out = asvplan(&[
        "simulate",
        "--trajectory",
        s(&traj),
        "--scenario",
        s(&scenario),
        "--out",
        s(&tmp.path().join("sim")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not increase"));

    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(
        asvplan(&["report", "--runs", s(&empty)]).status.code(),
        Some(1)
    );
    assert_eq!(
        asvplan(&["report", "--runs", s(&tmp.path().join("nope"))])
            .status
            .code(),
        Some(1)
    );

    assert_eq!(
        asvplan(&["plan", "--scenario", s(&scenario)]).status.code(),
        Some(1)
    );
    assert_eq!(
        asvplan(&[
            "plan",
            "--scenario",
            s(&scenario),
            "--out",
            "x",
            "--objective",
            "fastest"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(asvplan(&["--help"]).status.code(), Some(0));
}
