use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spheroidal"))
        .args(args)
        .current_dir(dir)
        .env_remove("SPHEROIDAL_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn spectrum_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--out-dir", dir.path().to_str().unwrap(), "spectrum", "--gamma", "3", "--mmax", "3", "--lmax", "6"];
    let o = run(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    run(&args, dir.path());
    let second = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(first, second);
    assert!(first.starts_with("gamma,m,l,g,"));
    // (2*3+1) columns of 4 to 7 states
    assert_eq!(first.lines().count(), 1 + 7 + 2 * (6 + 5 + 4));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("env_out");
    let o = Command::new(env!("CARGO_BIN_EXE_spheroidal"))
        .args(["spectrum", "--gamma", "0", "--mmax", "1", "--lmax", "2", "--svg"])
        .current_dir(dir.path())
        .env("SPHEROIDAL_OUT_DIR", &target)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(target.join("spectrum.csv").exists());
    let svg = std::fs::read_to_string(target.join("spectrum.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn monodromy_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["monodromy", "--gamma", "16"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("monodromy.json")).unwrap()).unwrap();
    assert_eq!(v["index"], 2);
    assert_eq!(v["matrix"], serde_json::json!([[1, 0], [2, 1]]));
    assert_eq!(v["l_star"], 20);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(&["--help"], p)), 0);
    assert_eq!(code(&run(&["--version"], p)), 0);
    assert_eq!(code(&run(&["--bogus"], p)), 4);
    assert_eq!(code(&run(&["spectrum", "--gamma", "-1"], p)), 4);
    assert_eq!(code(&run(&["spectrum", "--gamma", "2", "--mmax", "5", "--lmax", "3"], p)), 4);
    // too few negative states for a loop
    assert_eq!(code(&run(&["monodromy", "--gamma", "2"], p)), 2);
    // below the classical boundary
    assert_eq!(code(&run(&["classical", "action", "--gamma", "2", "--m", "1", "--g", "-10"], p)), 4);
}

#[test]
fn classical_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(&["classical", "action", "--gamma", "16", "--m", "0", "--g", "0"], p);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["action"].as_f64().unwrap() - 32.0 / std::f64::consts::PI).abs() < 1e-8);

    let o = run(&["classical", "bifurcation", "--gamma", "2", "--mmax", "2", "--samples", "5"], p);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(p.join("bifurcation.csv")).unwrap();
    assert!(csv.starts_with("kind,m,g\n"));
    assert!(csv.contains("focus-focus"));

    let o = run(
        &["classical", "orbit", "--energy", "0.5", "--a", "1", "--p", "0,0.6,0.8", "--l", "-1", "0", "0", "--t", "1", "--dt", "0.01", "--record-every", "1"],
        p,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(p.join("orbit.csv")).unwrap();
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn vector_arguments_need_three_components() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["classical", "orbit", "--p", "0,1", "--l", "1,0,0", "--t", "0.1"], dir.path());
    assert_eq!(code(&o), 4);
}
