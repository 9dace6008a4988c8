use std::path::Path;
use std::process::Command;

use poverty_trap::cli::output::fmt_num;
use poverty_trap::cli::{cmd_expected_time, cmd_validate, Axis, Overrides, RunConfig};
use proptest::prelude::*;

mod common;
use common::config_path;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_poverty-trap"))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().ok()).collect())
        .collect();
    (header, rows)
}

fn column(rows: &[Vec<Option<f64>>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j].expect("numeric cell")).collect()
}

#[test]
fn trap_prob_reproduces_the_uninsured_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["trap-prob", "-c"])
        .arg(config_path("fig1b"))
        .args(["--x-grid", "1,2,3", "--plots", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("trapping_probabilities.csv"));
    assert_eq!(header, ["x", "alpha=0.8", "alpha=1", "alpha=1.5", "alpha=2"]);
    let alpha1 = column(&rows, 2);
    assert_eq!(alpha1[0], 1.0);
    assert!((alpha1[1] - 2.0 * (-1f64).exp()).abs() < 1e-11);
    assert!(dir.path().join("trapping_probabilities.svg").exists());
    assert_eq!(std::fs::read_to_string(dir.path().join("errors.log")).unwrap(), "");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[model]\nr = -1\nlambda = 1\nalpha = 1\nx_star = 1\n[[schemes]]\nkind = \"uninsured\"\n").unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["trap-prob", "-c", bad.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
    // x below the critical capital fails the cell, not the run
    let out = dir.path().join("o");
    let c = bin()
        .args(["trap-prob", "-c"])
        .arg(config_path("fig1b"))
        .args(["--x-grid", "0.5,2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(c.code(), Some(1));
    let log = std::fs::read_to_string(out.join("errors.log")).unwrap();
    assert_eq!(log.lines().count(), 4);
    assert!(log.lines().all(|l| l.starts_with("trap-prob,0.5,alpha=") && l.split(',').count() == 5));
}

#[test]
fn help_documents_the_config_keys() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["[model]", "mapping", "matching", "subsidy_rate_mode", "[[schemes]]", "x_star_ins", "escape_level", "b_max"] {
        assert!(text.contains(key), "--help lacks {key}");
    }
}

#[test]
fn laplace_columns_decrease_in_delta() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["laplace", "-c"])
        .arg(config_path("fig1a"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("laplace.csv"));
    assert_eq!(header, ["x", "delta=0", "delta=0.125", "delta=0.03125", "delta=0.0078125"]);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|c| c.unwrap()).collect();
        // key, then delta = 0, 1/8, 1/32, 1/128
        assert!(v[2] <= v[3] && v[3] <= v[4] && v[4] <= v[1], "{v:?}");
    }
}

#[test]
fn expected_time_orderings() {
    let dir = tempfile::tempdir().unwrap();
    let ov = Overrides { out: Some(dir.path().join("fig2")), ..Default::default() };
    let cfg = RunConfig::load(&config_path("fig2"), &ov).unwrap();
    cmd_expected_time(&cfg).unwrap();
    let (header, rows) = read_csv(&dir.path().join("fig2/expected_time.csv"));
    assert_eq!(header, ["x", "r=0.02", "r=0.05", "r=0.08"]);
    for j in 1..=3 {
        let c = column(&rows, j);
        assert!(c.windows(2).all(|w| w[1] > w[0]), "column {j} not increasing in x");
    }
    for r in &rows[1..] {
        assert!(r[3] > r[2] && r[2] > r[1], "r ordering at x={:?}", r[0]);
    }

    let ov = Overrides {
        out: Some(dir.path().join("fig7")),
        x_grid: Some("1:5:81".into()),
        ..Default::default()
    };
    let cfg = RunConfig::load(&config_path("fig7"), &ov).unwrap();
    assert_eq!(cfg.time_axis, Axis::Barrier);
    cmd_expected_time(&cfg).unwrap();
    let (header, rows) = read_csv(&dir.path().join("fig7/expected_time.csv"));
    assert_eq!(header, ["B", "r=0.08", "r=0.082", "r=0.084"]);
    for j in 1..=3 {
        let c = column(&rows, j);
        assert!(c.windows(2).all(|w| w[1] > w[0]), "column {j} not increasing in B");
    }
}

#[test]
fn optimize_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, target) in [("fig3b", "theta"), ("fig6b", "barrier")] {
        let out = dir.path().join(cfg);
        let status = bin()
            .args(["optimize", "--target", target, "-c"])
            .arg(config_path(cfg))
            .args(["--x-grid", "1.2,6", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        let text = std::fs::read_to_string(out.join("optimize.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,value,verdict");
        match target {
            "theta" => assert_eq!(lines[2], "6,0.5,NoSubsidyNeeded"),
            _ => {
                assert!(lines[1].ends_with(",Root"));
                let v: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
                assert!(v > 0.0, "B* - x = {v} near the line");
                assert_eq!(lines[2], "6,-5,NoBarrierNeeded");
            }
        }
    }
}

#[test]
fn validate_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let ov = Overrides {
            out: Some(dir.path().join(name)),
            paths: Some(2_000),
            seed: Some(7),
            ..Default::default()
        };
        let mut cfg = RunConfig::load(&config_path("fig6a"), &ov).unwrap();
        cfg.validate_x = Some(vec![1.5, 3.0]);
        cmd_validate(&cfg).unwrap();
        std::fs::read(dir.path().join(name).join("validation_report.csv")).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("scheme,x,quantity,closed_form,mc_mean,std_err,z,pass\n"));
    assert!(text.contains("B=2,2,psi,"), "barrier cell at x = B");
}

proptest! {
    #[test]
    fn csv_numbers_round_trip(v in prop_oneof![-1e6f64..1e6, 1e-9f64..1e-3, any::<f64>().prop_filter("finite", |v| v.is_finite())]) {
        let s = fmt_num(v);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(fmt_num(back), s.clone());
        if v != 0.0 {
            prop_assert!(((back - v) / v).abs() <= 5e-12, "{} -> {}", v, s);
        }
    }
}
