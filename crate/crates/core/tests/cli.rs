use std::path::Path;
use std::process::Command;

fn hofercert(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_hofercert"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn certify_cp2_p_is_global() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = hofercert(&["certify", "cp2", "P", "--probes", "300"], dir.path());
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("globally length minimizing"));
    assert!(dir.path().join("report.txt").exists());
    assert_eq!(report(dir.path())["pass"], true);
}

#[test]
fn doubled_p_is_refused_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = hofercert(&["certify", "--manifold", "cp2", "--hamiltonian", "2P"], dir.path());
    assert_eq!(code, 1);
    assert!(text.starts_with("REFUSED"));
}

#[test]
fn corrupted_suite_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = hofercert(&["verify", "--suite", "corrupted", "--probes", "200"], dir.path());
    assert_eq!(code, 1);
    assert!(text.contains("FAIL"));
}

#[test]
fn verify_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "flows", "--seed", "7", "--probes", "200"];
    assert_eq!(hofercert(&args, a.path()).0, 0);
    assert_eq!(hofercert(&args, b.path()).0, 0);
    let ja = std::fs::read(a.path().join("report.json")).unwrap();
    let jb = std::fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn polytope_writes_figures() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = hofercert(&["polytope", "--manifold", "cp2", "--overlay", "i_minus", "--s", "0.6", "--samples", "300"], dir.path());
    assert_eq!(code, 0);
    for f in ["polytope.svg", "polytope.csv", "i_minus.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("polytope.csv")).unwrap();
    let x: f64 = csv.lines().nth(2).unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(x, std::f64::consts::FRAC_PI_2);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "manifold = blowup\nlambda = 0.3\noverlay = rect_minus\nr = 0.2\n").unwrap();
    let out = dir.path().join("out");
    let (code, _) = hofercert(&["--config", cfg.to_str().unwrap(), "polytope", "--lambda", "0.5"], &out);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r["settings"]["lambda"], 0.5);
    assert_eq!(r["settings"]["r"], 0.2);
    assert!(out.join("rect_minus.svg").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hofercert(&["certify", "torus", "P"], dir.path()).0, 2);
    assert_eq!(hofercert(&["verify", "--suite", "nonsense"], dir.path()).0, 2);
}
