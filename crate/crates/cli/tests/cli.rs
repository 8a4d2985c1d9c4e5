use std::path::Path;
use std::process::{Command, Output};

fn rcip(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rcip"));
    cmd.args(args).env_remove("RCIP_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bgkw_table_matches_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.cfg", "# Couette flow\nproblem = bgkw\nk = 2.0, 1.0\n");
    let out = dir.path().join("b.csv");
    let o = rcip(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(t[0], ["k", "u_half", "q", "p_xy", "gmres_iters", "cpu_seconds"]);
    assert_eq!(t.len(), 3);
    // input order is kept
    assert_eq!(t[1][0].parse::<f64>().unwrap(), 2.0);
    let q: f64 = t[1][2].parse().unwrap();
    assert!((q - 4.281659776113918e-02).abs() < 1e-12 * q);
    let u: f64 = t[2][1].parse().unwrap();
    assert!((u - 2.518613399894736e-01).abs() < 1e-12 * u);
    assert_eq!(t[1][3], "");
    assert!(t[1][4].parse::<u32>().unwrap() <= 10);
}

#[test]
fn output_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "problem = laplace-circle\nalpha = 0.5\nlambda = 0.5,0\nn_sub = 10:30:10\n");
    let a = rcip(&["run", &cfg, "--threads", "3"], &[]);
    let b = rcip(&["run", &cfg], &[("RCIP_THREADS", "1")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let t = rows(&String::from_utf8(a.stdout).unwrap());
    assert_eq!(t[0], ["n_sub", "re_q_coa", "im_q_coa", "re_q_fin", "im_q_fin", "rel_err"]);
    assert_eq!(t.iter().skip(1).map(|r| r[0].as_str()).collect::<Vec<_>>(), ["10", "20", "30"]);
    // 16 significant digits
    let mantissa = t[1][1].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 16);
}

#[test]
fn circle_sweep_tail_is_fully_accurate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "problem = laplace-circle\nalpha = 0.5\nlambda = 0.5\nn_sub = 90, 100\n");
    let o = rcip(&["run", &cfg], &[]);
    let t = rows(&String::from_utf8(o.stdout).unwrap());
    for r in &t[1..] {
        assert!(r[5].parse::<f64>().unwrap() <= 1e-14, "{r:?}");
    }
}

#[test]
fn config_errors_exit_with_one_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    for body in ["problem = laplace-circle\nalpha = 0.5\nlambda = 0.5\nn_sub =\n", "problem = bgkw\nk = 1\ncolour = red\n", "problem = bgkw\n"] {
        let cfg = write_config(dir.path(), "bad.cfg", body);
        let o = rcip(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(1), "{body}");
        assert!(!out.exists());
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
    let o = rcip(&["run", dir.path().join("missing.cfg").to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_rows_are_blank_and_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.csv");
    let body = format!("problem = laplace-circle\nalpha = 0.5\nlambda = 0.5\nn_sub = 5, 1000, 6\nout = {}\n", out.display());
    let cfg = write_config(dir.path(), "p.cfg", &body);
    let o = rcip(&["run", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    let t = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(t.len(), 4);
    assert_eq!(t[2], ["1000", "", "", "", "", ""]);
    assert!(!t[3][1].is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_sub = 1000"));
}
