use std::fs;
use std::process::Command;

fn bench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn run_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = bench(&[
            "run",
            "--kernel",
            "k2",
            "--solution",
            "u2",
            "--m",
            "24",
            "--noise",
            "0.1",
            "--seed",
            "5",
            "--max-iters",
            "20",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.starts_with(
        "method,iteration,error,residual,wall_time_s,seed,kernel,solution,m,noise_fraction\n"
    ));
    // four methods, iterations 0..=20 each
    assert_eq!(text.lines().count(), 1 + 4 * 21);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["run", "--kernel", "k9", "--out", out],
        vec!["run", "--noise", "1.5", "--out", out],
        vec!["run", "--methods", "tikhonov", "--out", out],
        vec!["run", "--m", "1", "--out", out],
        vec!["run"],
        vec!["frobnicate"],
    ] {
        assert_eq!(bench(&args).status.code(), Some(1), "{args:?}");
    }
    let o = bench(&["run", "--m", "8", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_two_and_keeps_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = bench(&[
        "run",
        "--m",
        "8",
        "--methods",
        "dp_continuous,cg",
        "--dt",
        "3",
        "--max-iters",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.starts_with("cg,4,")));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(bench(&["--help"]).status.code(), Some(0));
}

#[test]
fn filters_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = bench(&[
        "filters",
        "--N",
        "4",
        "--T",
        "2",
        "--lambda-max",
        "10",
        "--points",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "lambda,f_continuous,g_discrete,residual_factor_cont,residual_factor_disc"
    );
    assert_eq!(lines.len(), 1 + 8);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 2.0, 10.0, 1.0, 1.0]);
}

#[test]
fn rates_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = bench(&[
        "rates",
        "--mu",
        "0.5",
        "--deltas",
        "1e-2,1e-3",
        "--m",
        "16",
        "--trials",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("method,delta,parameter,error"));
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.contains(",32,"));
    assert_eq!(
        bench(&["rates", "--deltas", "x", "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}
