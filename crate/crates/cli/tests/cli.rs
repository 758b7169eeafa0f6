//! End-to-end command tests against the compiled binary: exit-code
//! contract, artifact layout, and output invariants.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use greenloop_core::io;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greenloop"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_bundled(dir: &Path) -> PathBuf {
    let path = dir.join("case.json");
    std::fs::write(&path, io::samples::bundled_case_json()).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_bundled_case_is_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = run(&["validate", case.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_dumps_the_matrix_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = run(
        &["validate", case.to_str().unwrap(), "--dump-lp", "matrix.txt"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let dump = std::fs::read_to_string(dir.path().join("matrix.txt")).unwrap();
    assert!(dump.starts_with("vars:"));
    assert!(dump.contains("C12[f=0]:"));
    assert!(dump.contains(">= 2600"));
}

#[test]
fn relaxed_solve_marks_the_front_and_allows_fractional_indicators() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = run(
        &[
            "solve", "eps", case.to_str().unwrap(), "--grid", "4", "--relaxed",
            "--out", "relaxed.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let front = io::load_front(dir.path().join("relaxed.json")).unwrap();
    assert!(front.metadata.relaxed);
    let fractional = front.entries.iter().any(|e| {
        e.solution
            .xa
            .iter()
            .chain(&e.solution.xb)
            .chain(&e.solution.xd)
            .any(|&x| x > 1e-6 && x < 1.0 - 1e-6)
    });
    assert!(fractional, "relaxed solve should exploit fractional openings");
}

#[test]
fn validate_names_the_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(io::samples::bundled_case_json()).unwrap();
    doc["pa"][0] = serde_json::json!(-5.0);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = run(&["validate", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pa"));
}

#[test]
fn validate_reports_infeasible_demand() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(io::samples::bundled_case_json()).unwrap();
    doc["q"] = serde_json::json!([90000.0, 90000.0]);
    let path = dir.path().join("heavy.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = run(&["validate", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 3);
}

#[test]
fn solve_eps_writes_front_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = run(
        &[
            "solve",
            "eps",
            case.to_str().unwrap(),
            "--grid",
            "20",
            "--out",
            "front.json",
            "--csv",
            "front.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let front = io::load_front(dir.path().join("front.json")).unwrap();
    assert!(front.len() >= 10, "only {} points", front.len());
    assert!(front.metadata.exact);
    let csv = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
    assert!(csv.starts_with("f1,f2,method,epsilon_or_gen,proven\n"));
    assert_eq!(csv.lines().count(), front.len() + 1);
    let manifest = dir.path().join("front.json.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
    assert_eq!(manifest["instance_hash"], serde_json::json!(front.metadata.instance_hash));
    // Stdout mirrors the published objective print format.
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("f1 = £ "));
    assert!(stdout.contains("(kg)"));
}

#[test]
fn solve_eps_on_infeasible_instance_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(io::samples::bundled_case_json()).unwrap();
    doc["q"] = serde_json::json!([90000.0, 90000.0]);
    let path = dir.path().join("heavy.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = run(
        &[
            "solve",
            "eps",
            path.to_str().unwrap(),
            "--grid",
            "4",
            "--out",
            "front.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3);
    assert!(!dir.path().join("front.json").exists());
}

#[test]
fn solve_ga_same_seed_gives_identical_front_files() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    for name in ["a.json", "b.json"] {
        let out = run(
            &[
                "solve",
                "ga",
                case.to_str().unwrap(),
                "--pop",
                "16",
                "--gens",
                "10",
                "--seed",
                "5",
                "--out",
                name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ga_trace_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = run(
        &[
            "solve",
            "ga",
            case.to_str().unwrap(),
            "--pop",
            "10",
            "--gens",
            "3",
            "--seed",
            "1",
            "--out",
            "f.json",
            "--trace",
            "trace.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("generation,best_f1,best_f2,feasible"));
    assert_eq!(lines.count(), 4); // generations 0..=3
}

#[test]
fn compare_front_with_itself_is_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    run(
        &[
            "solve", "eps", case.to_str().unwrap(), "--grid", "4", "--out", "f.json",
        ],
        dir.path(),
    );
    let out = run(
        &["compare", "f.json", "f.json", "--out", "report.txt"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("hypervolume ratio (B/A): 1"));
    assert!(dir.path().join("report.csv").exists());
}

#[test]
fn compare_rejects_mismatched_instances() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let tradeoff = dir.path().join("tradeoff.json");
    std::fs::write(&tradeoff, io::samples::bundled_tradeoff_json()).unwrap();
    run(
        &["solve", "eps", case.to_str().unwrap(), "--grid", "3", "--out", "a.json"],
        dir.path(),
    );
    run(
        &["solve", "eps", tradeoff.to_str().unwrap(), "--grid", "3", "--out", "b.json"],
        dir.path(),
    );
    let out = run(
        &["compare", "a.json", "b.json", "--out", "report.txt"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_then_validate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "gen", "--seed", "7", "--dims", "2,2,2,2,1,1,1,1", "--out", "gen.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["validate", "gen.json"], dir.path());
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_bundled_case_passes() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = run(
        &["verify", case.to_str().unwrap(), "--grid", "5"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));
}

#[test]
fn plot_marks_every_front_point() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    run(
        &["solve", "eps", case.to_str().unwrap(), "--grid", "2", "--out", "f.json"],
        dir.path(),
    );
    let front = io::load_front(dir.path().join("f.json")).unwrap();
    assert_eq!(front.len(), 2);
    let out = run(&["plot", "f.json", "--out", "plot.svg"], dir.path());
    assert_eq!(code(&out), 0);
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    let markers = svg.matches("class=\"marker series-0\"").count();
    assert_eq!(markers, 2);
    let csv = std::fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    assert!(csv.starts_with("front,f1,f2,method,epsilon_or_gen,proven"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn out_dir_env_resolves_relative_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    let out = bin()
        .args(["solve", "eps", case.to_str().unwrap(), "--grid", "2", "--out", "env.json"])
        .current_dir(dir.path())
        .env("GREENLOOP_OUT_DIR", outdir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(outdir.path().join("env.json").exists());
    assert!(!dir.path().join("env.json").exists());
}

#[test]
fn solve_eps_is_deterministic_without_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    for name in ["e1.json", "e2.json"] {
        let out = run(
            &["solve", "eps", case.to_str().unwrap(), "--grid", "5", "--out", name],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("e1.json")).unwrap();
    let b = std::fs::read(dir.path().join("e2.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_refuses_oversized_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["gen", "--seed", "1", "--dims", "6,6,1,5,1,1,1,1", "--out", "big.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "big.json"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("enumerates at most"));
}

#[test]
fn threads_flag_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let case = write_bundled(dir.path());
    for (name, threads) in [("t1.json", "1"), ("t4.json", "4")] {
        let out = run(
            &[
                "solve", "ga", case.to_str().unwrap(), "--pop", "12", "--gens", "6",
                "--seed", "3", "--threads", threads, "--out", name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("t1.json")).unwrap();
    let b = std::fs::read(dir.path().join("t4.json")).unwrap();
    assert_eq!(a, b);
}
