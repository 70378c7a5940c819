use std::process::Command;

use glfem::bench::ConvergenceTable;

fn glfem(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_glfem")).args(args).output().expect("run glfem")
}

#[test]
fn uniform_run_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let out = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let args = |o: &str| vec!["--problem", "lshape", "--levels", "3", "--start-level", "0", "--dump-meshes", "--out", o].into_iter().map(String::from).collect::<Vec<_>>();
    let (a, b) = (out("a"), out("b"));
    for o in [&a, &b] {
        let r = Command::new(env!("CARGO_BIN_EXE_glfem")).args(args(o)).output().unwrap();
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let csv_a = std::fs::read(format!("{a}/convergence.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(format!("{b}/convergence.csv")).unwrap());
    let table = ConvergenceTable::parse_csv(std::str::from_utf8(&csv_a).unwrap()).unwrap();
    assert_eq!(table.ndofs(), vec![16, 42, 130]);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(format!("{a}/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["sigma"], 10.0);
    assert_eq!(meta["lambda"], 1.0);
    assert!(meta["warm_start"].is_string());
    for f in ["plot_convergence.py", "solution.csv", "mesh_level00.txt", "mesh_level02.txt"] {
        assert!(dir.path().join("a").join(f).exists(), "{f}");
    }
}

#[test]
fn adaptive_run_uses_adaptive_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let r = glfem(&["--problem", "slit", "--method", "dg", "--refine", "adaptive", "--levels", "3", "--out", o]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("level,ndof,err_energy,estimator,order_e,order_est,c_eff,newton_iters\n"));
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    assert!(!glfem(&["--problem", "lshape", "--theta", "1.5", "--refine", "adaptive", "--out", o]).status.success());
    assert!(!glfem(&["--problem", "lshape", "--levels", "3", "--newton-max-iter", "1", "--out", o]).status.success());
    let r = glfem(&["--problem", "disc"]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("unknown problem"));
}
