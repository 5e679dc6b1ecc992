use std::path::Path;
use std::process::{Command, Output};

use ergokde::csv_io::read_numeric;
use ergokde::estimator::psi_d;

const OU2: &str = r#"
[model]
type = "ou"
dim = 2

[simulation]
horizon = 50.0
dt = 0.01
seed = 3

[estimator]
c_h = 0.25
points_per_axis = 5
"#;

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergokde"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_then_estimate_from_stored_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, OU2).unwrap();
    let path = dir.path().join("path.csv");
    let o = run(&["simulate"], &cfg, &path);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_numeric(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(header, ["t", "x1", "x2"]);
    assert_eq!(rows.len(), 5001);
    assert!(dir.path().join("path.csv.resolved.toml").exists());

    let est = dir.path().join("est.csv");
    let o = run(&["estimate", "--input", path.to_str().unwrap()], &cfg, &est);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_numeric(std::fs::File::open(&est).unwrap()).unwrap();
    assert_eq!(header, ["x1", "x2", "rho_hat"]);
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[2].is_finite()));
}

#[test]
fn seed_flag_controls_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, OU2).unwrap();
    let read = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert!(run(&["simulate", "--seed", seed], &cfg, &out).status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(read("a.csv", "9"), read("b.csv", "9"));
    assert_ne!(read("a.csv", "9"), read("c.csv", "10"));
}

#[test]
fn adapt_below_threshold_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, OU2).unwrap();
    let o = run(&["adapt"], &cfg, &dir.path().join("trace.csv"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error: kind=empty_grid msg="), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, format!("{OU2}\n[kernel]\norder = 0\n")).unwrap();
    let o = run(&["simulate"], &cfg, &dir.path().join("p.csv"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: kind=config msg=key=kernel.order"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_one() {
    let o = Command::new(env!("CARGO_BIN_EXE_ergokde")).arg("simulate").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: kind=usage"));
}

#[test]
fn formulas_tabulate_psi() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, format!("{OU2}\n[formulas]\nx_list = [0.01, 0.5, 2.0]\n")).unwrap();
    let out = dir.path().join("psi.csv");
    let o = run(&["formulas", "--fn", "psi"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_numeric(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(header, ["x", "psi"]);
    for r in rows {
        assert_eq!(r[1].to_bits(), psi_d(r[0], 2).unwrap().to_bits());
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, format!("{OU2}\n[experiment]\nreps = 3\nt_list = [20.0, 40.0, 80.0]\n")).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("risk{threads}.csv"));
        let o = Command::new(env!("CARGO_BIN_EXE_ergokde"))
            .env("ERGOKDE_THREADS", threads)
            .args(["rates", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(&out).unwrap());
        let rate = std::fs::read_to_string(dir.path().join(format!("risk{threads}.csv.rate.csv"))).unwrap();
        assert!(rate.starts_with("logT,log_med_err\n"));
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert!(text.starts_with("T,seed,h,sup_err,pt_sq_err\n"));
    assert_eq!(text.lines().count(), 10);

    let o = Command::new(env!("CARGO_BIN_EXE_ergokde"))
        .env("ERGOKDE_THREADS", "zero")
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
