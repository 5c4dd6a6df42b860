//! End-to-end runs of the `elsis` binary.

use elsis::io::{read_dataset, CsvLayout};
use elsis::screening::{screen, Family, Method, SelectionRule};
use elsis::ElConfig;
use std::path::Path;
use std::process::{Command, Output};

fn elsis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elsis")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_then_screen_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ex1.csv");
    let csv = csv.to_str().unwrap();
    let o = elsis(&["simulate", "--example", "1", "--n", "60", "--p", "40", "--seed", "3", "--out", csv]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = elsis(&["screen", "--input", csv, "--top-d", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let got: Vec<usize> = v["report"]["selected"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect();

    let data = read_dataset(Path::new(csv), &CsvLayout::new("y")).unwrap();
    let elsis::io::LoadedData::CrossSection(d) = data else { panic!("expected cross-sectional data") };
    let rep = screen(&d.standardize().unwrap(), Method::El, SelectionRule::TopD(5), Family::Gaussian, &ElConfig::default())
        .unwrap();
    assert_eq!(got, rep.selected);
    let names: Vec<&str> = v["selected_names"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    let want: Vec<&str> = rep.selected.iter().map(|&j| d.feature_names[j].as_str()).collect();
    assert_eq!(names, want);
}

#[test]
fn simulate_is_reproducible_and_streams_differ() {
    let a = elsis(&["simulate", "--example", "3", "--n", "20", "--p", "10"]);
    let b = elsis(&["simulate", "--example", "3", "--n", "20", "--p", "10"]);
    let c = elsis(&["simulate", "--example", "3", "--n", "20", "--p", "10", "--replication", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn el_eval_values() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "u.csv", "u\n1\n2\n3\n");
    let o = elsis(&["el-eval", "--input", &f, "--mu", "2"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = elsis(&["el-eval", "--input", &f, "--mu", "1.5"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 1.2602839239449684).abs() < 1e-10);
    let o = elsis(&["el-eval", "--input", &f, "--mu", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "inf");
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "g.csv", "y,a,b\n1,2,3\n2,1,0\n0,5,1\n3,3,3\n");
    let ragged = write(dir.path(), "r.csv", "y,a\n1,2\n3\n");
    let text = write(dir.path(), "t.csv", "y,a\n1,2\n3,x\n");
    let constant = write(dir.path(), "c.csv", "y,a,b\n1,2,3\n2,2,0\n0,2,1\n");
    let flat = write(dir.path(), "f.csv", "u\n4\n4\n4\n");

    assert_eq!(elsis(&["--help"]).status.code(), Some(0));
    assert_eq!(elsis(&["screen", "--input", &good, "--method", "nope"]).status.code(), Some(1));
    assert_eq!(elsis(&["screen", "--input", &good, "--top-d", "0"]).status.code(), Some(1));
    assert_eq!(elsis(&["screen", "--input", &good, "--response", "zz"]).status.code(), Some(2));
    assert_eq!(elsis(&["screen", "--input", &ragged]).status.code(), Some(2));
    assert_eq!(elsis(&["screen", "--input", &text]).status.code(), Some(2));
    assert_eq!(elsis(&["screen", "--input", &constant]).status.code(), Some(2));
    assert_eq!(elsis(&["screen", "--input", "/nonexistent/file.csv"]).status.code(), Some(2));
    assert_eq!(elsis(&["el-eval", "--input", &flat, "--mu", "1"]).status.code(), Some(3));
    let o = elsis(&["screen", "--input", &text]);
    assert!(String::from_utf8_lossy(&o.stderr).contains('3'), "error should name the line");
}

#[test]
fn benchmark_json_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["benchmark", "--example", "1", "--n", "50", "--p", "60", "--reps", "6", "--method", "el,ls,rrc", "--format", "json"];
    let a = elsis(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = elsis(&args);
    let mut serial = vec!["--threads", "1"];
    serial.extend_from_slice(&args);
    let c = elsis(&serial);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let doc = elsis::bench::parse_tables(&stdout(&a)).unwrap();
    assert_eq!(doc.len(), 3);
    assert!(doc.iter().all(|t| t.r == 6 && t.failures == 0));
}
