use std::fs;
use std::process::{Command, Output};

fn ellip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellip"))
        .args(args)
        .output()
        .expect("failed to run ellip")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bench_writes_csv_to_stdout() {
    let o = ellip(&["bench", "--instance", "dense", "--n", "40,100", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,n,cond,cpu_s,iters,fval,term,seed");
    // Six default methods on two instances.
    assert_eq!(lines.len(), 13);
    assert!(lines[1..].iter().all(|l| l.ends_with(",GradientTolerance,2")));
    assert!(!text.contains("grad-wolfe"));
}

#[test]
fn bench_markdown_and_traces_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.md");
    let traces = dir.path().join("traces");
    let o = ellip(&[
        "bench",
        "--instance",
        "dense",
        "--n",
        "30",
        "--seed",
        "5",
        "--methods",
        "me,cg,grad-wolfe",
        "--eps",
        "1e-6",
        "--format",
        "markdown",
        "--out",
        out.to_str().unwrap(),
        "--trace-dir",
        traces.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let md = fs::read_to_string(&out).unwrap();
    assert!(md.lines().next().unwrap().starts_with("| Method | n | cond |"));
    assert_eq!(md.lines().count(), 5);
    for m in ["me", "cg", "grad-wolfe"] {
        assert!(traces.join(format!("{m}_30_5.csv")).exists(), "{m}");
    }
}

#[test]
fn non_converged_cells_give_exit_code_one() {
    let o = ellip(&["bench", "--instance", "diag", "--n", "200", "--methods", "grad", "--max-iters", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",5,"));
    assert!(stdout(&o).contains("MaxIterations"));
}

#[test]
fn absolute_tolerance_mode() {
    let o = ellip(&[
        "bench", "--instance", "dense", "--n", "40", "--methods", "me", "--eps", "1", "--eps-mode", "abs",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("me,40,"));
}

#[test]
fn bad_arguments_are_rejected() {
    assert_eq!(ellip(&["bench", "--methods", "newton"]).status.code(), Some(2));
    assert_eq!(ellip(&["bench", "--instance", "sparse"]).status.code(), Some(2));
    assert_eq!(ellip(&["bench", "--eps", "-1"]).status.code(), Some(2));
    assert_eq!(ellip(&["bench", "--reps", "0"]).status.code(), Some(2));
    assert!(!ellip(&["bench", "--eps-mode", "sometimes"]).status.success());
}

#[test]
fn gen_then_bench_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    let meta = dir.path().join("meta.jsonl");
    let o = ellip(&[
        "gen",
        "--instance",
        "diag",
        "--n",
        "25",
        "--seed",
        "8",
        "--b-scale",
        "10",
        "--out",
        path.to_str().unwrap(),
        "--meta",
        meta.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("diag 25"));
    let m: serde_json::Value = serde_json::from_str(fs::read_to_string(&meta).unwrap().trim()).unwrap();
    assert_eq!(m["seed"], 8);
    assert_eq!(m["b_scale"], 10.0);

    let spec = format!("file:{}", path.display());
    let o = ellip(&["bench", "--instance", &spec, "--methods", "me,cg", "--max-iters", "1000000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("me,25,50000,"));
    assert!(out.contains("cg,25,50000,"));
}

#[test]
fn solve_prints_a_summary_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let o = ellip(&[
        "solve",
        "--instance",
        "dense",
        "--n",
        "50",
        "--method",
        "me",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("method     me"));
    assert!(out.contains("term       GradientTolerance"));
    let t = fs::read_to_string(&trace).unwrap();
    assert!(t.lines().nth(1).unwrap().starts_with("1,EllipseCenter,"));
}

#[test]
fn missing_file_is_an_error() {
    let o = ellip(&["bench", "--instance", "file:/nonexistent/problem.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
