use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_univalent"));
    c.env_remove("UNIVALENT_OUT_DIR");
    c
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("univalent-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn legendre_suite_exits_zero() {
    let o = bin().args(["verify", "--suite", "legendre", "--n", "10"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["suite"], "legendre");
    assert!(r["cases"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn milin_identity_report() {
    let o = bin().args(["verify", "--suite", "milin", "--function", "identity", "--n", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let case = r["cases"].as_array().unwrap().iter().find(|c| c["id"] == "milin/identity:M1<=0").unwrap();
    assert_eq!(case["lhs"], -1.0);
}

#[test]
fn failing_checks_exit_one_and_still_write() {
    // A function outside S: |a_2| = 3 breaks the coefficient bound.
    let dir = scratch("fail");
    let o = bin()
        .args(["verify", "--suite", "bounds", "--function", "coeffs:[0,1,3]", "--out", "r.csv", "--format", "csv"])
        .env("UNIVALENT_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let body = std::fs::read_to_string(dir.join("r.csv")).unwrap();
    assert!(body.starts_with("suite,id,lhs,rhs,pass\n"));
    assert!(body.contains(",false"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_exit_codes() {
    for args in [&["verify", "--suite", "nope"][..], &["verify", "--tol=-1"], &["verify", "--order", "3"], &["frobnicate"]] {
        assert_eq!(bin().args(args).output().unwrap().status.code(), Some(2), "{args:?}");
    }
    // Driving values must lie on the unit circle.
    let o = bin().args(["loewner", "trace", "--kappa", "const:0.5", "--T", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    let cfg = dir.join("c.toml");
    std::fs::write(&cfg, "suite = \"robertson\"\nn = 5\nformat = \"csv\"\n").unwrap();
    let o = bin().arg("verify").arg("--config").arg(&cfg).args(["--n", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 4, "{s}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn trace_csv() {
    let o = bin()
        .args(["loewner", "trace", "--kappa", "const:-1", "--T", "1", "--step", "1e-2", "--grid", "polar:2x3", "--stride", "50"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("t,z_re,z_im,f_re,f_im,etf_re,etf_im"));
    // Times 0, 0.5 and 1, six points each.
    assert_eq!(lines.count(), 18);
}

#[test]
fn lambda_oracles_and_tables() {
    let o = bin().args(["weinstein", "lambda", "--t", "0.5", "--k", "3", "--N", "20", "--oracle", "all", "--out", "json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["max_gap"].as_f64().unwrap() < 1e-8);
    assert!(r["min_value"].as_f64().unwrap() >= -1e-12);

    let o = bin().args(["table", "legendre", "--n", "5"]).output().unwrap();
    assert!(stdout(&o).lines().any(|l| l.starts_with("2,-1/2,0,3/2,")));
    let o = bin().args(["table", "coefficients", "--n", "5"]).output().unwrap();
    let ns: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(ns, ["0", "1", "2", "3", "4", "5"]);
    let a = bin().args(["table", "lambda", "--t", "0", "--k", "0", "--format", "json"]).output().unwrap();
    let b = bin().args(["table", "lambda", "--t", "0", "--k", "0", "--format", "json"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn decompose_identity_passes_and_koebe_reports_gap() {
    let o = bin().args(["weinstein", "decompose", "--function", "identity", "--n", "3", "--T", "6", "--quad", "256"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin().args(["weinstein", "decompose", "--function", "koebe", "--n", "6", "--T", "8"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["lhs"].as_f64().unwrap().abs() < 1e-12);
    assert!(r["min_g"].as_f64().unwrap() >= -1e-8);
}
