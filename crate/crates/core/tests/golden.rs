//! Frozen outputs on a fixed-seed corpus. Each table is checked against the
//! enumeration oracle before it is compared with the stored file. Set
//! `QUANTCUT_BLESS=1` to rewrite the stored files.

mod common;

use std::path::{Path, PathBuf};

use common::schedules::{corpus_params, enumerate};
use quantcut::cli::run;
use quantcut::instance::{generate_synthetic, to_document};

const SEEDS: [u64; 4] = [1, 2, 3, 4];

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_against_file(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("QUANTCUT_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} changed");
}

fn invoke(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["quantcut"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    String::from_utf8(out).unwrap()
}

#[test]
fn bench_tables_on_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let mut optima = Vec::new();
    for seed in SEEDS {
        let inst = generate_synthetic(&corpus_params(seed), seed).instance;
        optima.push(enumerate(&inst).optimum.unwrap());
        std::fs::write(dir.path().join(format!("corpus-{seed}.json")), to_document(&inst)).unwrap();
    }
    let pattern = dir.path().join("corpus-*.json");
    let pattern = pattern.to_str().unwrap();
    let methods = "full,full+C,full+S,cgen,cgen+S,cgen+O";

    let csv = invoke(&["bench", "--instance", pattern, "--method", methods, "--format", "csv"]);
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), SEEDS.len() * 6);
    for row in &rows {
        let seed: u64 = row[0].trim_start_matches("corpus-").parse().unwrap();
        let optimum = optima[SEEDS.iter().position(|&s| s == seed).unwrap()];
        let objective: f64 = row[3].parse().unwrap();
        assert_eq!(row[2], "optimal");
        assert!((objective - optimum).abs() <= 1e-6 * optimum.abs().max(1.0), "{row:?} vs {optimum}");
    }
    check_against_file("bench_corpus.csv", &csv);

    let markdown = invoke(&["bench", "--instance", pattern, "--method", methods, "--format", "markdown"]);
    assert!(markdown.lines().skip(2).all(|l| l.contains("**0.00%**")));
    check_against_file("bench_corpus.md", &markdown);
}

#[test]
fn evaluate_csv_on_a_planted_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let planted = dir.path().join("planted.txt");
    let (inst, planted) = (inst.to_str().unwrap(), planted.to_str().unwrap());
    invoke(&["generate", "--seed", "7", "--horizon", "5", "--interventions", "5", "--out", inst, "--planted", planted]);
    let csv = invoke(&["evaluate", "--instance", inst, "--solution", planted, "--format", "csv"]);
    assert_eq!(csv.lines().count(), 6);
    check_against_file("evaluate_seed7.csv", &csv);
}
