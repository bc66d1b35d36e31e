//! End-to-end runs of the compiled binary: reference values, CSV sweep
//! determinism and shape, oracle exit codes, and the repetition demo.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cluster-secrecy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

fn tmp_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Parses "p/q" into a fraction; q is always positive in our output.
fn fraction(s: &str) -> (i128, i128) {
    let (p, q) = s.split_once('/').expect("p/q field");
    (p.parse().expect("numerator"), q.parse().expect("denominator"))
}

fn fraction_le(a: (i128, i128), b: (i128, i128)) -> bool {
    a.0 * b.1 <= b.0 * a.1
}

#[test]
fn bound_prints_reference_values() {
    let cases: [(&[&str], &str, &str); 4] = [
        (
            &[
                "bound", "--model", "node-restricted", "--n", "6", "--L", "3", "--k", "5",
                "--gamma", "5", "--alpha", "5", "--Lc", "1",
            ],
            "7",
            "7.000000",
        ),
        (
            &[
                "bound", "--model", "capacity", "--n", "6", "--L", "3", "--k", "5", "--gamma",
                "5", "--alpha", "5",
            ],
            "15",
            "15.000000",
        ),
        (
            &[
                "bound", "--model", "cluster-restricted-asymmetric", "--n", "100", "--L", "10",
                "--k", "80", "--beta-intra", "1/9", "--beta-cross", "0", "--alpha", "inf",
                "--l", "10", "--Lc", "1",
            ],
            "35",
            "35.000000",
        ),
        (
            &[
                "bound", "--model", "cluster-restricted", "--n", "100", "--L", "10", "--k",
                "80", "--gamma", "1", "--alpha", "inf", "--l", "10",
            ],
            "3815/99",
            "38.535354",
        ),
    ];
    for (args, exact, decimal) in cases {
        let out = run(args);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
        let text = stdout(&out);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(exact), "{args:?}");
        assert_eq!(lines.next(), Some(decimal), "{args:?}");
    }
}

#[test]
fn bound_rejects_a_bad_cluster_count() {
    let out = run(&[
        "bound", "--model", "node-restricted", "--n", "6", "--L", "4", "--k", "5", "--gamma",
        "5", "--alpha", "5", "--Lc", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("divide"), "{}", stderr(&out));
}

#[test]
fn bound_requires_the_adversary_budget() {
    let out = run(&[
        "bound", "--model", "node-restricted", "--n", "6", "--L", "3", "--k", "5", "--gamma",
        "5", "--alpha", "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--Lc"), "{}", stderr(&out));
}

fn storage_sweep(out_file: &Path) -> Vec<u8> {
    let out_flag = out_file.to_str().expect("utf-8 path");
    let out = run(&[
        "sweep", "--model", "capacity", "--model", "node-restricted", "--n", "100", "--L",
        "10", "--k", "85", "--gamma", "1", "--alpha-min", "0", "--alpha-max", "1/2",
        "--alpha-step", "1/10", "--lc-min", "0", "--lc-max", "10", "--out", out_flag,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    std::fs::read(out_file).expect("sweep file exists")
}

#[test]
fn storage_sweep_is_deterministic_and_shaped_like_the_reference() {
    let first = storage_sweep(&tmp_path("storage-a.csv"));
    let second = storage_sweep(&tmp_path("storage-b.csv"));
    assert_eq!(first, second, "sweep output differs between runs");
    assert!(
        !tmp_path("storage-a.csv.tmp").exists(),
        "temp file left behind"
    );

    let text = String::from_utf8(first).expect("utf-8 csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("alpha,Lc,model,value_exact,value_decimal")
    );

    // rows[(lc, alpha)] = (capacity, node-restricted)
    let mut capacity = Vec::new();
    let mut bound = Vec::new();
    let mut keys = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "row {line:?}");
        let key = (fields[1].parse::<usize>().unwrap(), fraction(fields[0]));
        match fields[2] {
            "capacity" => {
                capacity.push(fraction(fields[3]));
                keys.push(key);
            }
            "node-restricted" => bound.push(fraction(fields[3])),
            other => panic!("unexpected model column {other:?}"),
        }
    }
    assert_eq!(capacity.len(), 66, "11 Lc values, 6 alpha values");
    assert_eq!(bound.len(), 66);

    // Ordered by (Lc, alpha), the bound never exceeds the capacity, and an
    // unobserved system stores exactly the capacity.
    for window in keys.windows(2) {
        let ((lc_a, alpha_a), (lc_b, alpha_b)) = (window[0], window[1]);
        assert!(
            lc_a < lc_b || (lc_a == lc_b && fraction_le(alpha_a, alpha_b)),
            "rows out of order: {window:?}"
        );
    }
    for ((&cap, &val), &(lc, _)) in capacity.iter().zip(&bound).zip(&keys) {
        assert!(fraction_le(val, cap), "bound above capacity at Lc={lc}");
        if lc == 0 {
            assert_eq!(val, cap, "Lc=0 must store the capacity");
        }
    }
}

#[test]
fn bandwidth_limited_sweep_compares_the_two_allocations() {
    let path = tmp_path("allocations.csv");
    let out = run(&[
        "sweep", "--model", "cluster-restricted", "--model",
        "cluster-restricted-asymmetric", "--n", "100", "--L", "10", "--k", "80", "--l", "10",
        "--gamma", "1", "--beta-intra", "1/9", "--beta-cross", "0", "--alpha-max", "inf",
        "--lc-min", "1", "--lc-max", "10", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let text = std::fs::read_to_string(&path).expect("sweep file exists");
    let mut symmetric = Vec::new();
    let mut intra_only = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], "inf");
        match fields[2] {
            "cluster-restricted" => symmetric.push(fraction(fields[3])),
            "cluster-restricted-asymmetric" => intra_only.push(fraction(fields[3])),
            other => panic!("unexpected model column {other:?}"),
        }
    }
    assert_eq!(symmetric.len(), 10);
    assert_eq!(intra_only.len(), 10);
    assert!(
        symmetric.windows(2).all(|w| w[0] == w[1]),
        "symmetric allocation must not depend on Lc"
    );
    assert_eq!(intra_only[0], (35, 1));
    for window in intra_only.windows(2) {
        assert!(
            fraction_le(window[1], window[0]),
            "intra-only bound grew with Lc"
        );
    }
    for (asym, sym) in intra_only.iter().zip(&symmetric) {
        assert!(
            fraction_le(*asym, *sym),
            "intra-only allocation beat the symmetric one"
        );
    }
}

#[test]
fn sweep_rejects_an_empty_alpha_range() {
    let path = tmp_path("never-written.csv");
    let out = run(&[
        "sweep", "--model", "capacity", "--n", "6", "--L", "3", "--k", "5", "--gamma", "5",
        "--alpha-min", "1", "--alpha-max", "0", "--alpha-step", "1/10", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty alpha range"), "{}", stderr(&out));
    assert!(!path.exists(), "rejected sweep left a file behind");
}

#[test]
fn oracle_certifies_the_worked_example() {
    let out = run(&[
        "oracle", "--model", "node-restricted", "--n", "6", "--L", "3", "--k", "5", "--gamma",
        "5", "--alpha", "5", "--Lc", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("BoundTight(7)"), "{text}");
    assert!(text.contains("enumerated"), "{text}");
}

#[test]
fn oracle_rejects_oversized_instances() {
    let out = run(&[
        "oracle", "--model", "node-restricted", "--n", "12", "--L", "3", "--k", "5",
        "--gamma", "5", "--alpha", "5", "--Lc", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("limit"), "{}", stderr(&out));
}

#[test]
fn oracle_validates_the_default_grid() {
    let out = run(&["oracle", "--grid", "small-default"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let last = text.lines().last().unwrap_or_default();
    assert!(
        last.starts_with("all ") && last.contains("checked bounds valid"),
        "{last}"
    );
}

#[test]
fn rskr_demonstrates_the_worked_example() {
    let out = run(&["rskr", "--n", "6", "--L", "3", "--Lc", "1", "--seed", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("secure symbol count: 7"), "{text}");
    assert!(text.contains("coset rows=8"), "{text}");
    assert!(text.contains("all checks passed"), "{text}");
}

#[test]
fn rskr_without_an_adversary_stores_everything_plainly() {
    let out = run(&["rskr", "--n", "6", "--L", "3", "--Lc", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("secure symbol count: 15"), "{text}");
    assert!(text.contains("coset rows=0"), "{text}");
}

#[test]
fn rskr_handles_the_four_cluster_layout() {
    let out = run(&["rskr", "--n", "8", "--L", "4", "--Lc", "1", "--seed", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("secure symbol count: 16"), "{text}");
    assert!(text.contains("all checks passed"), "{text}");
}

#[test]
fn rskr_transcripts_reproduce_for_a_seed() {
    let first = run(&["rskr", "--n", "6", "--L", "2", "--Lc", "1", "--seed", "41"]);
    let second = run(&["rskr", "--n", "6", "--L", "2", "--Lc", "1", "--seed", "41"]);
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&second));
}
