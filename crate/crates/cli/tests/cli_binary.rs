//! End-to-end tests that drive the compiled `geodescent` binary.
//!
//! These exercise the process boundary: argument parsing, exit codes, the
//! stdout/stderr split, and byte-level determinism of every artifact.

use std::path::Path;
use std::process::{Command, Output};

fn geodescent(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geodescent"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Runs the full pipeline in `dir` with distinctly named artifacts and
/// returns the bytes of (instance, trace, report, svg).
fn full_pipeline(dir: &Path) -> (Vec<u8>, Vec<u8>, Vec<u8>, Vec<u8>) {
    let gen = geodescent(
        &["generate", "--manifold", "spd", "--seed", "7", "--out", "inst.txt"],
        dir,
    );
    assert_eq!(code(&gen), 0, "generate failed: {}", stderr(&gen));

    let run = geodescent(
        &["run", "--instance", "inst.txt", "--rule", "exogenous", "--out", "trace.csv"],
        dir,
    );
    assert_eq!(code(&run), 0, "run failed: {}", stderr(&run));

    let cert = geodescent(
        &[
            "certify",
            "--trace",
            "trace.csv",
            "--theorem",
            "exogenous-complexity",
            "--kappa",
            "-0.5",
            "--out",
            "report.csv",
        ],
        dir,
    );
    assert_eq!(code(&cert), 0, "certify failed: {}", stderr(&cert));

    let plot = geodescent(&["plot", "--report", "report.csv", "--out", "report.svg"], dir);
    assert_eq!(code(&plot), 0, "plot failed: {}", stderr(&plot));

    (
        std::fs::read(dir.join("inst.txt")).unwrap(),
        std::fs::read(dir.join("trace.csv")).unwrap(),
        std::fs::read(dir.join("report.csv")).unwrap(),
        std::fs::read(dir.join("report.svg")).unwrap(),
    )
}

#[test]
fn the_pipeline_succeeds_and_reports_progress_on_stdout() {
    let dir = tempfile::tempdir().unwrap();

    let gen = geodescent(
        &["generate", "--manifold", "sphere", "--out", "inst.txt"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0);
    assert!(stdout(&gen).contains("wrote instance"), "stdout: {}", stdout(&gen));
    assert!(stdout(&gen).contains("manifold=sphere"));

    let run = geodescent(
        &[
            "run",
            "--instance",
            "inst.txt",
            "--rule",
            "polyak",
            "--out",
            "trace.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    assert!(stdout(&run).contains("run finished"));
    assert!(stdout(&run).contains("trace written to trace.csv"));

    let cert = geodescent(
        &[
            "certify",
            "--trace",
            "trace.csv",
            "--theorem",
            "polyak-complexity",
            "--kappa",
            "0",
            "--out",
            "report.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&cert), 0, "stderr: {}", stderr(&cert));
    assert!(stdout(&cert).contains("certified polyak-complexity"));
    assert!(stderr(&cert).is_empty());

    let plot = geodescent(
        &["plot", "--report", "report.csv", "--out", "report.svg"],
        dir.path(),
    );
    assert_eq!(code(&plot), 0);
    assert!(stdout(&plot).contains("wrote plot"));

    let svg = std::fs::read_to_string(dir.path().join("report.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn repeated_pipelines_produce_byte_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = full_pipeline(a.path());
    let second = full_pipeline(b.path());
    assert_eq!(first.0, second.0, "instance files differ between runs");
    assert_eq!(first.1, second.1, "trace files differ between runs");
    assert_eq!(first.2, second.2, "report files differ between runs");
    assert_eq!(first.3, second.3, "svg files differ between runs");
}

#[test]
fn usage_problems_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();

    // Unknown subcommand and missing arguments are caught by the parser.
    let bad_sub = geodescent(&["frobnicate"], dir.path());
    assert_eq!(code(&bad_sub), 2);

    let no_args = geodescent(&[], dir.path());
    assert_eq!(code(&no_args), 2);

    let bad_manifold = geodescent(
        &["generate", "--manifold", "torus", "--out", "x.txt"],
        dir.path(),
    );
    assert_eq!(code(&bad_manifold), 2);
    assert!(stderr(&bad_manifold).contains("expected `sphere` or `spd`"));

    // Semantic conflicts are caught after parsing but still exit 2.
    geodescent(
        &["generate", "--manifold", "spd", "--out", "inst.txt"],
        dir.path(),
    );
    let both_sources = geodescent(
        &[
            "run",
            "--instance",
            "inst.txt",
            "--manifold",
            "spd",
            "--out",
            "t.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&both_sources), 2);
    assert!(stderr(&both_sources).starts_with("error:"), "stderr: {}", stderr(&both_sources));

    let lambda_on_spd = geodescent(
        &["run", "--manifold", "spd", "--lambda", "0.5", "--out", "t.csv"],
        dir.path(),
    );
    assert_eq!(code(&lambda_on_spd), 2);

    let missing_trace = geodescent(
        &[
            "certify",
            "--trace",
            "nonexistent.csv",
            "--theorem",
            "quasi-fejer",
            "--kappa",
            "-0.5",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&missing_trace), 2);
    assert!(stderr(&missing_trace).contains("nonexistent.csv"));
}

#[test]
fn a_corrupted_trace_fails_certification_with_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    geodescent(
        &["generate", "--manifold", "spd", "--out", "inst.txt"],
        dir.path(),
    );
    let run = geodescent(
        &["run", "--instance", "inst.txt", "--out", "trace.csv"],
        dir.path(),
    );
    assert_eq!(code(&run), 0);

    // Inflate the recorded gap on the very first row; the one-step inequality
    // uses the gap directly, so the violation must be reported at N = 0.
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines: Vec<String> = trace.lines().map(str::to_owned).collect();
    let fields: Vec<&str> = lines[1].split(',').collect();
    let gap: f64 = fields[2].parse().unwrap();
    let mut new_fields = fields.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    new_fields[2] = format!("{:.16e}", gap * 10.0);
    lines[1] = new_fields.join(",");
    std::fs::write(dir.path().join("bad.csv"), lines.join("\n") + "\n").unwrap();

    let cert = geodescent(
        &[
            "certify",
            "--trace",
            "bad.csv",
            "--theorem",
            "step-inequality",
            "--kappa",
            "-0.5",
            "--out",
            "bad_report.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&cert), 1);
    let err = stderr(&cert);
    assert!(err.contains("certification failed for step-inequality"), "stderr: {err}");
    assert!(err.contains("first violated N = 0"), "stderr: {err}");
    // The report is still written so the failure can be inspected and plotted.
    assert!(dir.path().join("bad_report.csv").exists());
}

#[test]
fn config_files_supply_defaults_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.cfg"),
        "manifold=sphere\nseed=11\nlambda=0.6\n",
    )
    .unwrap();

    // Run straight from the config file.
    let from_cfg = geodescent(
        &["run", "--config", "exp.cfg", "--out", "a.csv"],
        dir.path(),
    );
    assert_eq!(code(&from_cfg), 0, "stderr: {}", stderr(&from_cfg));

    // Overriding the seed on the command line must change the trace ...
    let overridden = geodescent(
        &["run", "--config", "exp.cfg", "--seed", "12", "--out", "b.csv"],
        dir.path(),
    );
    assert_eq!(code(&overridden), 0);
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_ne!(a, b, "different seeds must give different traces");

    // ... while repeating the flagged value reproduces it exactly.
    let repeat = geodescent(
        &["run", "--config", "exp.cfg", "--seed", "11", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(code(&repeat), 0);
    let c = std::fs::read(dir.path().join("c.csv")).unwrap();
    assert_eq!(a, c, "flag equal to the config value must not change the run");

    // Unknown keys are rejected with a path:line diagnostic.
    std::fs::write(dir.path().join("bad.cfg"), "manifold=sphere\nwibble=3\n").unwrap();
    let bad = geodescent(&["run", "--config", "bad.cfg", "--out", "d.csv"], dir.path());
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("bad.cfg:2"), "stderr: {}", stderr(&bad));
}

#[test]
fn certify_rejects_bad_constants_before_checking_rows() {
    let dir = tempfile::tempdir().unwrap();
    geodescent(
        &["generate", "--manifold", "sphere", "--out", "inst.txt"],
        dir.path(),
    );
    let run = geodescent(
        &[
            "run",
            "--instance",
            "inst.txt",
            "--rule",
            "polyak",
            "--out",
            "trace.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&run), 0);

    // --kappa is mandatory: the trace alone does not determine the curvature.
    let no_kappa = geodescent(
        &[
            "certify",
            "--trace",
            "trace.csv",
            "--theorem",
            "polyak-complexity",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&no_kappa), 2);

    // A gain factor of 4 pushes the Polyak step out of the admissible range,
    // so the complexity constant is nonpositive and no row can be checked.
    let bad_gain = geodescent(
        &[
            "certify",
            "--trace",
            "trace.csv",
            "--theorem",
            "polyak-complexity",
            "--kappa",
            "0",
            "--alpha-factor",
            "4.0",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&bad_gain), 2, "stderr: {}", stderr(&bad_gain));
    assert!(!dir.path().join("r.csv").exists(), "no report on constant errors");
}
