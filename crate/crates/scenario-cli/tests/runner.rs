use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use ws_scenario::{parse_config, run_scenario, sweep, Context, Engine, ScenarioError};

fn ctx() -> &'static Mutex<Context> {
    static CTX: OnceLock<Mutex<Context>> = OnceLock::new();
    CTX.get_or_init(|| Mutex::new(Context::new()))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("runner").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

const SHORT: &str = r#"
name = "short"
seed = 7

[lattice]
v0 = 2.5
f = 0.5

[modulation]
kind = "phase"
a = 0.2
omega = 0.5

[packet]
width = 4.0
k0 = 0.0

[run]
engines = ["full", "tight-binding", "secular", "envelope"]
length = 6.0
snapshots = [0.0, 3.0]
"#;

#[test]
fn runs_are_deterministic_and_echo_their_config() {
    let cfg = parse_config(SHORT).unwrap();
    let (a, b) = (tmp("det_a"), tmp("det_b"));
    let mut c = ctx().lock().unwrap();
    let oa = run_scenario(&cfg, &a, &mut c).unwrap();
    run_scenario(&cfg, &b, &mut c).unwrap();
    let sa = std::fs::read(a.join("summary.json")).unwrap();
    let sb = std::fs::read(b.join("summary.json")).unwrap();
    assert_eq!(sa, sb);
    assert_eq!(std::fs::read(a.join("summary.txt")).unwrap(), std::fs::read(b.join("summary.txt")).unwrap());
    let echo = std::fs::read_to_string(a.join("config.toml")).unwrap();
    assert_eq!(parse_config(&echo).unwrap(), cfg);
    assert!(oa.passed(), "{:?}", oa.checks);
    assert_eq!(oa.runs.len(), 4);
}

#[test]
fn writes_every_artifact() {
    let cfg = parse_config(SHORT).unwrap();
    let out = tmp("artifacts");
    let o = run_scenario(&cfg, &out, &mut ctx().lock().unwrap()).unwrap();
    for f in [
        "config.toml",
        "basis/ladder.csv",
        "basis/couplings.txt",
        "basis/diagnostics.txt",
        "full.csv",
        "tight-binding.csv",
        "secular.csv",
        "envelope.csv",
        "secular_model.txt",
        "comparison.json",
        "comparison.txt",
        "summary.json",
        "summary.txt",
        "snapshots/full_t00000.000.csv",
        "snapshots/full_t00003.000.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    assert!(!out.join("diagnostic.txt").exists());
    let csv = std::fs::read_to_string(out.join("full.csv")).unwrap();
    assert!(csv.starts_with('#'));
    let full = o.run(Engine::Full).unwrap();
    assert_eq!(full.trajectory.t.len(), 13);
    let fid = o.summary.get_f64("compare.full~tight-binding.min_fidelity").unwrap();
    assert!(fid > 0.99, "{fid}");
    assert!(o.summary.get_f64("engine.full.max_band_wall_mass").unwrap() < 1e-6);
}

#[test]
fn engine_failure_leaves_a_diagnostic() {
    let text = SHORT.replace("width = 4.0", "width = 4.0\ncenter = 29.0");
    let cfg = parse_config(&text).unwrap();
    let out = tmp("failure");
    let err = run_scenario(&cfg, &out, &mut ctx().lock().unwrap()).err().expect("packet outside the bulk");
    assert!(matches!(err, ScenarioError::Propagator(_)), "{err:?}");
    assert_eq!(err.exit_code(), 3);
    let diag = std::fs::read_to_string(out.join("diagnostic.txt")).unwrap();
    assert!(diag.contains("short"));
    assert!(out.join("config.toml").is_file());
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let text = SHORT.replace("[\"full\", \"tight-binding\", \"secular\", \"envelope\"]", "[\"tight-binding\", \"secular\"]");
    let text = text.replace("snapshots = [0.0, 3.0]", "");
    let out = tmp("sweep");
    let values = vec!["0.0".to_string(), "3.14159".to_string()];
    let res = sweep(&text, "packet.k0", &values, &out, &mut ctx().lock().unwrap()).unwrap();
    assert_eq!(res.len(), 2);
    for (v, r) in &res {
        let o = r.as_ref().unwrap();
        assert!(o.out_dir.ends_with(format!("packet.k0={v}")));
        assert!(o.out_dir.join("summary.json").is_file());
    }
    let table = std::fs::read_to_string(out.join("sweep.tsv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn basis_only_scenario_writes_states() {
    let text = "name = \"b\"\n[lattice]\nv0 = 2.5\nf = 0.5\n[run]\nengines = []\nlength = 1.0\n[analysis]\nkind = \"basis\"\n";
    let out = tmp("basis");
    let o = run_scenario(&parse_config(text).unwrap(), &out, &mut ctx().lock().unwrap()).unwrap();
    assert!(out.join("basis/states.csv").is_file());
    assert!(out.join("basis/potential.csv").is_file());
    assert!(o.passed(), "{:?}", o.checks);
    assert!(o.runs.is_empty());
}
