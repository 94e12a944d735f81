use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dioph"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn body(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn run_csv(args: &[&str], dir: &Path, tag: &str) -> (i32, String) {
    let out = dir.join(format!("{tag}.csv"));
    let st = bin().args(args).arg("--csv").arg(&out).status().unwrap();
    (st.code().unwrap(), std::fs::read_to_string(&out).unwrap_or_default())
}

#[test]
fn count_rows_per_t() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("parabola.set");
    let (code, csv) = run_csv(
        &["count", "--spec", spec.to_str().unwrap(), "--T", "10..20", "--lambda", "3", "--e", "1"],
        dir.path(),
        "c",
    );
    assert_eq!(code, 0);
    let b = body(&csv);
    let mut lines = b.lines();
    assert_eq!(lines.next(), Some("T,lambda,e,N,undecided"));
    assert_eq!(lines.count(), 11);
    assert!(csv.starts_with("# dioph "));
    assert!(csv.contains("# lambda = 3\n"));
}

#[test]
fn bodies_are_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("parabola.set");
    let s = spec.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["count", "--spec", s, "--T", "8..64:x2", "--lambda", "2"],
        vec!["rootsum", "--coeffs", "1,1,1", "--N", "primes:50..120"],
        vec!["loja", "--f", "x^2 + y^2 - 1", "--box", "[-2,2] x [-2,2]", "--zero-points", "1,0", "--samples", "500"],
        vec!["examples", "--name", "1.5", "--T", "50,100", "--lambda", "2"],
    ];
    for (i, c) in cases.iter().enumerate() {
        let mut one = c.clone();
        one.extend(["--workers", "1"]);
        let mut four = c.clone();
        four.extend(["--workers", "4"]);
        let (c1, a) = run_csv(&one, dir.path(), &format!("a{i}"));
        let (c2, b) = run_csv(&four, dir.path(), &format!("b{i}"));
        let (c3, again) = run_csv(&four, dir.path(), &format!("c{i}"));
        assert_eq!((c1, c2, c3), (0, 0, 0), "{c:?}");
        assert_eq!(body(&a), body(&b), "{c:?}");
        assert_eq!(body(&b), body(&again), "{c:?}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, format!("subcommand = count\nspec = {}\nT = 10\nlambda = 2\n", data("parabola.set").display())).unwrap();
    let (code, csv) = run_csv(&["--config", cfg.to_str().unwrap(), "--lambda", "3"], dir.path(), "cfg");
    assert_eq!(code, 0);
    assert!(csv.contains("# lambda = 3\n"));
    assert!(body(&csv).ends_with("10,3,1,5,0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run_csv(&["rootsum", "--coeffs", "1,x", "--N", "5"], dir.path(), "bad");
    assert_eq!(code, 1);
    let (code, _) = run_csv(&["rootsum", "--coeffs", "1,0", "--N", "5"], dir.path(), "zero");
    assert_eq!(code, 1);
    let (code, csv) = run_csv(&["rootsum", "--coeffs", "1,1,1", "--N", "5,7,200", "--budget", "60"], dir.path(), "budget");
    assert_eq!(code, 2);
    assert!(csv.contains("# status = partial"));
    assert_eq!(body(&csv).lines().count(), 3);
    let out = bin().args(["count", "--T", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn rootsum_matches_library() {
    use dioph_core::rootsum::{min_sum, MinSumOptions, RootSumInstance};
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_csv(&["rootsum", "--coeffs", "1,1,1", "--N", "primes:50..200"], dir.path(), "r");
    assert_eq!(code, 0);
    let b = body(&csv);
    let rows: Vec<&str> = b.lines().skip(1).collect();
    assert_eq!(rows.len(), dioph_core::rootsum::primes_in(50, 200).len());
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let p: u64 = f[0].parse().unwrap();
        let r = min_sum(&RootSumInstance::ones(2, p), &MinSumOptions::default()).unwrap();
        assert_eq!(f[2].parse::<f64>().unwrap(), r.value_lo());
        assert_eq!(f[3].parse::<f64>().unwrap(), r.value_hi());
    }
}

#[test]
fn fit_reads_count_csv_and_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("parabola.set");
    let json = dir.path().join("c.json");
    let (code, _) = run_csv(
        &["count", "--spec", spec.to_str().unwrap(), "--T", "8..128:x2", "--lambda", "2", "--json", json.to_str().unwrap()],
        dir.path(),
        "grow",
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["status"], "complete");
    assert_eq!(v["results"]["records"].as_array().unwrap().len(), 5);
    let input = dir.path().join("grow.csv");
    let (code, csv) = run_csv(&["fit", "--input", input.to_str().unwrap()], dir.path(), "fit");
    assert_eq!(code, 0);
    let b = body(&csv);
    let slope: f64 = b.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(slope > 1.5 && slope < 2.5, "{slope}");
}

#[test]
fn example_report_and_timing_column() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_csv(&["examples", "--name", "1.9", "--m-max", "2"], dir.path(), "ex");
    assert_eq!(code, 0, "{csv}");
    let (code, csv) = run_csv(&["rootsum", "--coeffs", "1,1", "--N", "2..6", "--timing"], dir.path(), "t");
    assert_eq!(code, 0);
    assert!(body(&csv).starts_with("N,n,value_lo,value_hi,argmin,zeros_found,seconds"));
    let (code, _) = run_csv(&["examples", "--name", "9.9"], dir.path(), "none");
    assert_eq!(code, 1);
}
