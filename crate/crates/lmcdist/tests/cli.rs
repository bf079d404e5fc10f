//! End-to-end flows through the command-line surface.

use lmcdist::cli;
use std::path::Path;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("lmcdist".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gadget_then_decide() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("two_state.lmc");

    let (code, out, _) = run(&["gadget", "two-state", "-o", path_str(&file)]);
    assert_eq!(code, 0);
    assert!(out.contains("wrote "));
    assert!(out.contains("closed_form=1"));

    let (code, out, _) = run(&["dist1", path_str(&file)]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "distance=1");

    let (code, out, _) = run(&["equiv", path_str(&file)]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "not-equivalent");
}

#[test]
fn sqrt_sum_gadget_reports_its_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sqrtsum.lmc");
    let (code, out, _) = run(&[
        "gadget",
        "sqrt-sum",
        "--s",
        "2",
        "--t",
        "1",
        "-o",
        path_str(&file),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("threshold=1/6"), "{out}");
    // h = 6, x_1 = 1/9: the closed form is sqrt(2)/6.
    assert!(out.contains("closed_form=1/6*sqrt(2)"), "{out}");

    // The written file parses and analyzes.
    let (code, out, _) = run(&["dist1", path_str(&file)]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "distance<1");
}

#[test]
fn approx_history_threshold_and_strictness() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("irrational.lmc");
    run(&["gadget", "irrational", "--x", "1/4", "-o", path_str(&file)]);

    let csv = dir.path().join("history.csv");
    let (code, out, _) = run(&[
        "approx",
        path_str(&file),
        "--eps",
        "1/100",
        "--history",
        "--threshold",
        "1/4",
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("lower=") && lines[0].ends_with("status=Converged"));
    assert!(lines[1].starts_with("approx: lower ~= 0.35"));
    assert_eq!(lines[2], "threshold=above");
    assert!(lines[3].starts_with("depth=0 "));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("depth,lower,upper\n"));
    assert!(csv_text.lines().count() > 2);

    // An unreachable width under a tiny depth cap is refused under --strict.
    let (code, out, _) = run(&[
        "approx",
        path_str(&file),
        "--eps",
        "1/1000000",
        "--max-depth",
        "2",
        "--strict",
    ]);
    assert_eq!(code, 1);
    assert!(out.lines().next().unwrap().ends_with("status=DepthCapped"));

    // Without --strict the same run reports normally.
    let (code, _, _) = run(&[
        "approx",
        path_str(&file),
        "--eps",
        "1/1000000",
        "--max-depth",
        "2",
    ]);
    assert_eq!(code, 0);

    // A threshold inside the bracket is undecided, and strict refuses it.
    let (code, out, _) = run(&[
        "approx",
        path_str(&file),
        "--eps",
        "1/100",
        "--threshold",
        "5/14",
        "--strict",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("threshold=undecided"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("example1.lmc");
    run(&["gadget", "example1", "-o", path_str(&file)]);

    let approx_args = ["approx", path_str(&file), "--eps", "1/50", "--history"];
    let (c1, o1, _) = run(&approx_args);
    let (c2, o2, _) = run(&approx_args);
    assert_eq!((c1, &o1), (c2, &o2));
    let mut approx_jobs = approx_args.to_vec();
    approx_jobs.extend(["--jobs", "2"]);
    let (c3, o3, _) = run(&approx_jobs);
    assert_eq!((c1, &o1), (c3, &o3));

    let sample_args = [
        "sample",
        path_str(&file),
        "--len",
        "64",
        "--samples",
        "4000",
        "--seed",
        "7",
    ];
    let (c1, o1, _) = run(&sample_args);
    let (c2, o2, _) = run(&sample_args);
    assert_eq!((c1, &o1), (c2, &o2));
    assert!(o1.starts_with("estimate="));
    assert!(o1.contains(" std_error="));

    // Parallel workers must not change the result.
    let mut jobs_args = sample_args.to_vec();
    jobs_args.extend(["--jobs", "3"]);
    let (c3, o3, _) = run(&jobs_args);
    assert_eq!((c1, o1), (c3, o3));
}

#[test]
fn bernoulli_csv_dump() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let (code, out, _) = run(&[
        "bernoulli",
        "--theta",
        "3",
        "--x",
        "0",
        "--grid",
        "257",
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let value: f64 = out
        .trim()
        .strip_prefix("d_theta=")
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 5.0 / 6.0).abs() < 1e-6);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,f,d\n"));
    assert_eq!(text.lines().count(), 258);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.lmc");
    std::fs::write(
        &file,
        "states: a b\n# no alphabet\ninit1: a=1\ninit2: b=1\n",
    )
    .unwrap();
    let (code, _, err) = run(&["equiv", path_str(&file)]);
    assert_eq!(code, 2);
    assert!(err.contains("alphabet"));

    let (code, _, err) = run(&["approx", path_str(&file), "--eps", "0"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}
