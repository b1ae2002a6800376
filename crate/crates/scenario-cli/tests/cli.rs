use std::path::PathBuf;
use std::process::{Command, Output};

fn wslattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wslattice")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn presets_lists_every_preset() {
    let out = wslattice(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["bloch-undriven", "fig1-basis", "fig2-quadrature", "fig3-inphase", "fig4-harmonic", "fig56-detuned"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tmp("bad");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "name = \"x\"\n[lattice]\nv0 = 2.5\nf = 0.5\nwobble = 1\n").unwrap();
    let out = wslattice(&["run", "--config", path.to_str().unwrap(), "--out", dir.join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5: unknown key `lattice.wobble`"), "{err}");
    assert!(err.contains("run.engines") && err.contains("run.length"), "{err}");

    let out = wslattice(&["run", "--preset", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = wslattice(&["run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_4_only_in_check_mode() {
    let dir = tmp("check");
    let path = dir.join("deep.toml");
    // a deeper lattice has a smaller X_1, so the coupling check fails
    std::fs::write(&path, "name = \"deep\"\n[lattice]\nv0 = 4.0\nf = 0.5\n[run]\nengines = []\nlength = 1.0\n[analysis]\nkind = \"basis\"\n")
        .unwrap();
    let cfg = path.to_str().unwrap();
    let out_dir = dir.join("o");
    let out = wslattice(&["run", "--config", cfg, "--out", out_dir.to_str().unwrap(), "--check"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL coupling_x1"));
    let out = wslattice(&["run", "--config", cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out_dir.join("summary.json").is_file());
}

#[test]
fn engine_failure_exits_with_3() {
    let dir = tmp("engine");
    let path = dir.join("edge.toml");
    std::fs::write(
        &path,
        "name = \"edge\"\n[lattice]\nv0 = 2.5\nf = 0.5\n[packet]\ncenter = 30.0\nwidth = 3.0\n[run]\nengines = [\"full\"]\nlength = 1.0\n",
    )
    .unwrap();
    let out_dir = dir.join("o");
    let out = wslattice(&["run", "--config", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out_dir.join("diagnostic.txt").is_file());
}

#[test]
fn basis_subcommand_exports_the_ladder_and_seed_is_echoed() {
    let dir = tmp("basis");
    let out = wslattice(&["basis", "--preset", "fig3", "--out", dir.to_str().unwrap(), "--seed", "42"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("basis/states.csv").is_file());
    let echo = std::fs::read_to_string(dir.join("config.toml")).unwrap();
    assert!(echo.contains("seed = 42"), "{echo}");
}
