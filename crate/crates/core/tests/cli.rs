mod common;

use std::path::Path;
use std::process::{Command, Output};

use ebm_core::harness::{read_csv, CSV_HEADER};

fn ebm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebm"))
        .args(args)
        .output()
        .unwrap()
}

fn small_graph(dir: &Path) -> String {
    let path = dir.join("small.txt");
    let out = ebm(&[
        "generate",
        "--kind",
        "random",
        "--n",
        "60",
        "--param",
        "4",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let graph = small_graph(dir.path());
    let csv = dir.path().join("out.csv");
    let out = ebm(&[
        "run",
        "--graph",
        &graph,
        "--budgets",
        "20,40",
        "--samples",
        "200",
        "--reps",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 12);
    let algos: Vec<_> = rows[..6].iter().map(|r| r.algorithm.as_str()).collect();
    assert_eq!(
        algos,
        ["igaag", "igaip", "hbh", "maxdeg", "degdis", "sindis"]
    );
    for r in &rows {
        assert_eq!(r.dataset, "small");
        assert_eq!(
            (r.prob_setting.as_str(), r.cost_setting.as_str()),
            ("U", "R")
        );
        assert!(r.spent <= r.budget);
        assert!(r.benefit_mean >= 0.0 && r.benefit_std >= 0.0);
    }
}

#[test]
fn stdout_when_no_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let graph = small_graph(dir.path());
    let out = ebm(&[
        "run",
        "--graph",
        &graph,
        "--budgets",
        "5",
        "--algos",
        "hbh,maxdeg",
        "--samples",
        "50",
        "--prob",
        "trivalency",
        "--econ",
        "degprop",
        "--no-timing",
    ]);
    assert!(out.status.success());
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r.prob_setting == "T" && r.cost_setting == "D" && r.seconds == 0.0));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let graph = small_graph(dir.path());
    for bad in [
        vec!["--algos", "pmia"],
        vec!["--prob", "uniform:1.5"],
        vec!["--econ", "free"],
        vec!["--budgets", "-5"],
        vec!["--target-frac", "0"],
        vec!["--samples", "0"],
        vec!["--hop", "0"],
    ] {
        let mut args = vec!["run", "--graph", graph.as_str()];
        args.extend(bad.iter());
        let out = ebm(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{bad:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn runtime_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = ebm(&["run", "--graph", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let broken = dir.path().join("broken.txt");
    std::fs::write(&broken, "0 1\n1 x\n").unwrap();
    let out = ebm(&["run", "--graph", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn eager_greedy_gated_on_large_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.txt");
    let p = path.to_str().unwrap();
    assert!(
        ebm(&["generate", "--kind", "random", "--n", "6000", "--param", "6", "--out", p])
            .status
            .success()
    );
    let out = ebm(&["run", "--graph", p, "--algos", "igaag", "--budgets", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ebm(&[
        "run",
        "--graph",
        p,
        "--algos",
        "hbh",
        "--budgets",
        "10",
        "--samples",
        "10",
        "--reps",
        "1",
    ]);
    assert!(out.status.success());
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let out = ebm(&[
            "generate",
            "--kind",
            "preferential",
            "--n",
            "300",
            "--param",
            "2",
            "--seed",
            "11",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
