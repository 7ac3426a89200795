use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lagrange_gap::model::print_problem;

fn lgap(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgap")).arg("--out").arg(out).args(args).output().expect("spawn lgap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn reproduce_all_builtins() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ex1", "ex2", "ex3"] {
        let o = lgap(dir.path(), &["reproduce", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let report = fs::read_to_string(dir.path().join(format!("reproduce-{name}/report.txt"))).unwrap();
        assert!(!report.contains("MISMATCH"));
        assert_eq!(report, stdout(&o));
    }
    let r1 = fs::read_to_string(dir.path().join("reproduce-ex1/report.txt")).unwrap();
    assert!(r1.contains("v^L   = -inf") && r1.contains("v^L < v*"));
    let r2 = fs::read_to_string(dir.path().join("reproduce-ex2/report.txt")).unwrap();
    assert!(r2.contains("v^L   = -1") && r2.contains("v^L < v̄*"));
    let r3 = fs::read_to_string(dir.path().join("reproduce-ex3/report.txt")).unwrap();
    assert!(r3.contains("Theorem 1"));
}

#[test]
fn max_dual_ex1_is_all_neg_inf() {
    let dir = tempfile::tempdir().unwrap();
    let o = lgap(dir.path(), &["max-dual", "--problem", "ex1.prob"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("max-dual-ex1/dual.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,value,certified"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 13);
    for r in rows {
        let cols: Vec<&str> = r.split(',').collect();
        assert_eq!(&cols[1..], &["-inf", "true"], "{r}");
    }
}

#[test]
fn csv_outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for args in [&["max-dual", "-p", "ex2"][..], &["hull", "-p", "ex1", "--box", "0,20,0,30"][..], &["report", "-p", "ex3"][..]] {
        let (x, y) = (lgap(a.path(), args), lgap(b.path(), args));
        assert_eq!(x.status.code(), Some(0));
        assert_eq!(x.stdout, y.stdout, "{args:?}");
    }
    let read = |d: &Path, f: &str| fs::read(d.join(f)).unwrap();
    for f in ["max-dual-ex2/dual.csv", "hull-ex1/hull.csv", "hull-ex1/hull.svg", "report-ex3/dual.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn hull_svg_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = lgap(dir.path(), &["hull", "--problem", "ex1", "--box", "0,20,0,30", "--timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv, "x,y,x_approx,y_approx,kind\n0,0,0.000000000,0.000000000,box-corner\n20,0,20.000000000,0.000000000,box-corner\n20,820/29,20.000000000,28.275862069,box-edge\n");
    let svg = fs::read_to_string(dir.path().join("hull-ex1/hull.svg")).unwrap();
    for class in ["class=\"region\"", "class=\"lattice\"", "class=\"boundary\"", "class=\"hull\""] {
        assert!(svg.contains(class), "{class}");
    }
    assert!(svg.contains("<!-- generated at unix time"));
    assert!(svg.contains("#3b6fd8") && svg.contains("#d83b3b"));
}

#[test]
fn env_var_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lgap")).env("LGAP_OUT_DIR", dir.path()).args(["solve", "-p", "ex2", "--which", "closed"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = fs::read_to_string(dir.path().join("solve-ex2/solve.txt")).unwrap();
    assert!(s.contains("closed-conv: 0"));
}

#[test]
fn problem_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mine.prob");
    let mut p = lagrange_gap::builtin("ex2").unwrap();
    p.name = "mine".into();
    fs::write(&file, print_problem(&p)).unwrap();
    let o = lgap(dir.path(), &["eval-dual", "--problem", file.to_str().unwrap(), "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("0,-1,true"));
    assert!(dir.path().join("eval-dual-mine/eval.csv").exists());

    fs::write(&file, "dim 2\nsurd 2\nmin 1\n").unwrap();
    assert_eq!(lgap(dir.path(), &["report", "-p", file.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn exit_codes_per_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let toy = d.join("toy.prob");
    fs::write(&toy, "name toy\ndim 2\nsurd 2\nmin 1 1\nrow 1 1 >= 1\nlattice poly\nlrow 1 1 <= 4\nnonneg 1 2\n").unwrap();
    let toy = toy.to_str().unwrap();
    let ok: &[&[&str]] = &[
        &["eval-dual", "-p", "ex1", "--lambda", "1"],
        &["max-dual", "-p", "ex3", "--steps", "5"],
        &["hull", "-p", "ex1", "--box", "0,5,0,5", "--enlarge", "1"],
        &["solve", "-p", "ex1"],
        &["report", "-p", "ex2"],
        &["classify", "-p", toy],
        &["certify", "-p", "ex3", "--xstar", "1,1,1"],
        &["slater", "-p", "ex2"],
        &["oracle", "-p", "ex1", "--weights", "-1,0"],
        &["reproduce", "ex3"],
    ];
    for args in ok {
        let o = lgap(d, args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let compute: &[&[&str]] = &[
        &["eval-dual", "-p", "ex1", "--lambda", "-1"],
        &["hull", "-p", "ex2", "--box", "0,5,0,5"],
        &["hull", "-p", "ex1", "--box", "0,5,0,5", "--enlarge", "1/2"],
        &["classify", "-p", "ex3"],
        &["classify", "-p", "ex1"],
        &["certify", "-p", "ex3", "--xstar", "0,0,0"],
    ];
    for args in compute {
        assert_eq!(lgap(d, args).status.code(), Some(1), "{args:?}");
    }
    let usage: &[&[&str]] = &[
        &["frobnicate"],
        &[],
        &["eval-dual", "-p", "ex2", "--lambda", "1,2"],
        &["eval-dual", "-p", "ex2", "--lambda", "x"],
        &["max-dual", "-p", "ex2", "--grid", "3:1"],
        &["hull", "-p", "ex1", "--box", "0,1,2"],
        &["solve", "-p", "ex1", "--which", "neither"],
        &["oracle", "-p", "nope", "--weights", "1,0"],
        &["reproduce", "ex4"],
        &["report", "-p", "ex1", "--search-radius", "0"],
    ];
    for args in usage {
        assert_eq!(lgap(d, args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn thread_flag_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = lgap(dir.path(), &["--threads", "1", "--no-files", "report", "-p", "ex1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("report-ex1").exists());
}
