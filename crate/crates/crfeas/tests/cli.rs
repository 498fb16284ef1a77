use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crfeas::formats::{csv_reader, FilterFile};

fn crfeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crfeas")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn without_timing(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            if l.starts_with('#') {
                l.to_string()
            } else {
                l.rsplit_once(',').unwrap().0.to_string()
            }
        })
        .collect()
}

fn write_filters(path: &Path, h: &[f64], g: &[f64]) {
    let json = serde_json::json!({
        "M": h.len(),
        "D": 0,
        "variant": "real",
        "h": h.iter().map(|x| [*x, 0.0]).collect::<Vec<_>>(),
        "g": g.iter().map(|x| [*x, 0.0]).collect::<Vec<_>>(),
    });
    fs::write(path, json.to_string()).unwrap();
}

fn data_rows(path: &Path) -> usize {
    csv_reader(path).unwrap().records().count()
}

#[test]
fn solve_writes_filters_on_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("filters.json");
    let out = crfeas(&[
        "solve",
        "--algorithm",
        "cr-map",
        "--seed",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().next().unwrap().starts_with('{'));
    let file = FilterFile::read(&path).unwrap();
    assert_eq!((file.m, file.d, file.variant.as_str()), (6, 2, "symmetric"));
    assert_eq!(file.filters().unwrap().len(), 6);
    assert!(file.residuals.unwrap().c1 < 1e-5);
}

#[test]
fn solve_reports_cutoff_with_exit_two() {
    let out = crfeas(&["solve", "--max-iters", "5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("cutoff reached"));
}

#[test]
fn usage_errors_exit_one() {
    let out = crfeas(&["solve", "--D", "3"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("D"));
    assert_eq!(code(&crfeas(&["solve", "--problem", "triangular"])), 1);
    assert_eq!(code(&crfeas(&["bench", "--algorithm", "x"])), 1);
    assert_eq!(code(&crfeas(&["frobnicate"])), 1);
    assert_eq!(code(&crfeas(&["--help"])), 0);
}

#[test]
fn bench_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let mut trials = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = crfeas(&[
            "bench",
            "--trials",
            "3",
            "--seed",
            "7",
            "--eps",
            "1e-6",
            "--workers",
            "2",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(data_rows(&out_dir.join("trials.csv")), 3 * 4);
        assert_eq!(data_rows(&out_dir.join("stats.csv")), 4);
        let stats = fs::read_to_string(out_dir.join("stats.csv")).unwrap();
        assert!(stats.starts_with("# {"));
        assert!(stats
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("problem_parameters,epsilon,algorithm,cases_solved"));
        trials.push(without_timing(&out_dir.join("trials.csv")));
    }
    assert_eq!(trials[0], trials[1]);
    assert_eq!(trials[0][1], "trial,algorithm,epsilon,converged,iterations");
}

#[test]
fn bench_rejects_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let out = crfeas(&[
        "bench",
        "--trials",
        "1",
        "--eps",
        "1e-6",
        "--out-dir",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cascade_writes_expected_grid() {
    let dir = tempfile::tempdir().unwrap();
    let haar = dir.path().join("haar.json");
    write_filters(&haar, &[0.5, 0.5], &[0.5, -0.5]);
    let out_path = dir.path().join("haar.csv");
    let out = crfeas(&[
        "cascade",
        "--filters",
        haar.to_str().unwrap(),
        "--levels",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(data_rows(&out_path), 17);

    let s = std::f64::consts::SQRT_2;
    let h: Vec<f64> = [
        0.3326705529500826,
        0.8068915093110925,
        0.4598775021184915,
        -0.1350110200102545,
        -0.0854412738820267,
        0.0352262918857095,
    ]
    .iter()
    .map(|c| c / s)
    .collect();
    let g: Vec<f64> = (0..6).map(|k| if k % 2 == 0 { -h[5 - k] } else { h[5 - k] }).collect();
    let db3 = dir.path().join("db3.json");
    write_filters(&db3, &h, &g);
    let out_path = dir.path().join("db3.csv");
    let out = crfeas(&[
        "cascade",
        "--filters",
        db3.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(data_rows(&out_path), 5 * 1024 + 1);
}

#[test]
fn cascade_reports_divergence_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let wild = dir.path().join("wild.json");
    write_filters(&wild, &[2.0, 2.0], &[1.0, -1.0]);
    let out_path = dir.path().join("wild.csv");
    let out = crfeas(&[
        "cascade",
        "--filters",
        wild.to_str().unwrap(),
        "--levels",
        "30",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&crfeas(&[
            "cascade",
            "--filters",
            missing.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn verify_passes_every_fixture() {
    let out = crfeas(&["verify"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}
