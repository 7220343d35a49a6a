use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ftcount::report::CountDocument;

fn ftcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftcount")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn header_locations(path: &Path) -> u64 {
    let text = fs::read_to_string(path).unwrap();
    let line = text.lines().find(|l| l.starts_with("# locations ")).expect("census header");
    line["# locations ".len()..].parse().unwrap()
}

#[test]
fn gadget_netlists_carry_their_census() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(ftcount(&["gadgets", "--exrec", "cnot", "--out", out]).status.success());
    assert!(ftcount(&["gadgets", "--exrec", "cnot", "--no-storage", "--out", out]).status.success());
    assert_eq!(header_locations(&dir.path().join("cnot.netlist")), 575);
    assert_eq!(header_locations(&dir.path().join("cnot.no-storage.netlist")), 487);

    assert!(ftcount(&["gadgets", "--out", out]).status.success());
    for (name, n) in [("encoder-zero", 18), ("encoder-plus", 18), ("ec", 142), ("cat", 36), ("a-state", 521)] {
        assert_eq!(header_locations(&dir.path().join(format!("{name}.netlist"))), n, "{name}");
    }
}

#[test]
fn gadget_netlists_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(ftcount(&["gadgets", "--out", a.path().to_str().unwrap()]).status.success());
    assert!(ftcount(&["gadgets", "--out", b.path().to_str().unwrap()]).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap());
    }
}

#[test]
fn count_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("a.json");
    let csv = dir.path().join("a.csv");
    let o = ftcount(&[
        "count", "--exrec", "a-state", "--json", json.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--pairs",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: CountDocument = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc.schema_version, ftcount::report::SCHEMA_VERSION);
    assert_eq!(doc.config.command, "count");
    assert_eq!(doc.census.total(), 521);
    assert_eq!(doc.b, 23_434_580);
    assert!((doc.a - 2330.0).abs() <= 0.05 * 2330.0);
    assert_eq!(doc.pairs.as_ref().unwrap().len() as u64, doc.malignant_pairs);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.starts_with("type,rest-gate,rest-measure"));
}

#[test]
fn worker_count_does_not_change_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut matrices = Vec::new();
    for w in [&["--sequential"][..], &["--workers", "1"], &["--workers", "3"]] {
        let p = dir.path().join(format!("r{}.json", matrices.len()));
        let mut args = vec!["count", "--exrec", "a-state", "--json", p.to_str().unwrap()];
        args.extend_from_slice(w);
        assert!(ftcount(&args).status.success());
        let doc: CountDocument = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
        matrices.push(doc.matrix);
    }
    assert!(matrices.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn threshold_against_published_counts() {
    let o = ftcount(&["threshold", "--exrec", "cnot"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("PASS eps0.cnot "), "{s}");
    assert!(!s.contains("FAIL"), "{s}");

    let s = stdout(&ftcount(&["threshold", "--exrec", "cnot", "--no-storage"]));
    assert!(s.contains("PASS eps0.cnot.no-storage "), "{s}");
    let s = stdout(&ftcount(&["threshold", "--exrec", "cnot", "--noise", "depolarizing"]));
    assert!(s.contains("PASS eps0.cnot.depol "), "{s}");

    // An arbitrary count is compared too and marked as differing.
    let s = stdout(&ftcount(&["threshold", "--exrec", "cnot", "--a", "40000"]));
    assert!(s.contains("FAIL a-prime.cnot"), "{s}");
}

#[test]
fn threshold_reads_a_count_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    assert!(ftcount(&["count", "--exrec", "a-state", "--json", json.to_str().unwrap()]).status.success());
    let o = ftcount(&["threshold", "--report", json.to_str().unwrap()]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("configuration a-state"));
    assert!(s.contains("PASS b.a-state"));
}

#[test]
fn montecarlo_is_reproducible_for_a_seed() {
    let run = |seed: &str, workers: &str| {
        stdout(&ftcount(&["montecarlo", "--shots", "200000", "--seed", seed, "--workers", workers]))
    };
    let a = run("5", "1");
    assert_eq!(a, run("5", "2"));
    assert_ne!(a, run("6", "1"));
    assert!(a.contains("PASS rate within 3 sigma"), "{a}");
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(ftcount(&["count"]).status.code(), Some(2));
    assert_eq!(ftcount(&["count", "--exrec", "toffoli"]).status.code(), Some(2));
    assert_eq!(ftcount(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ftcount(&["montecarlo", "--eps", "1.5"]).status.code(), Some(2));
    assert_eq!(ftcount(&["montecarlo", "--eps-types", "0.1,0.1"]).status.code(), Some(2));
    assert_eq!(ftcount(&["threshold", "--report", "/nonexistent/r.json"]).status.code(), Some(2));
    assert_eq!(ftcount(&["threshold", "--exrec", "a-state", "--noise", "depolarizing"]).status.code(), Some(2));
}

#[test]
fn quick_verify_passes() {
    let o = ftcount(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!s.contains("FAIL"));
}
