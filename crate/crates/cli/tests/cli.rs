use std::fs;
use std::process::{Command, Output};

const HEADER: &str = "scheme,M,T,N_bits,snr_db,snr_s_db,lambda_m,lambda_mp,frames,seeds,aoi_analytic,aoi_sim,ci95,rel_err,p_mm_analytic,p_mm_emp,p_mmp_analytic,p_mmp_emp";

fn aoi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aoi"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = aoi(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(line: &'a str, name: &str) -> &'a str {
    let idx = HEADER.split(',').position(|h| h == name).unwrap();
    line.split(',').nth(idx).unwrap()
}

#[test]
fn analytic_error_free_point() {
    let text = stdout(&[
        "analytic", "--scheme", "tdma-nrt", "--slot", "3", "--bits", "0", "--snr-db", "0",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec![HEADER, lines[1]]);
    assert_eq!(field(lines[1], "aoi_analytic"), "25");
    assert_eq!(field(lines[1], "M"), "8");
    assert_eq!(field(lines[1], "aoi_sim"), "nan");
}

#[test]
fn defaults_echo_into_rows() {
    let text = stdout(&["analytic", "--snr-db", "7", "--lambda", "0.3"]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(field(row, "snr_s_db"), "7");
        assert_eq!(field(row, "lambda_mp"), "0.3");
    }
}

#[test]
fn compare_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = aoi(&[
            "compare", "--frames", "5000", "--seeds", "3,5", "--slot", "1", "--out", p,
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        fs::read(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 5);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(field(row, "seeds"), "3;5");
    assert_eq!(field(row, "frames"), "5000");
    assert!(field(row, "rel_err").parse::<f64>().unwrap() < 0.1);
}

#[test]
fn simulate_single_seed() {
    let text = stdout(&[
        "simulate", "--scheme", "noma-rt", "--frames", "3000", "--seed", "9", "--slot", "1",
    ]);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(field(row, "aoi_analytic"), "nan");
    assert!(field(row, "aoi_sim").parse::<f64>().unwrap() > 0.0);
    assert!(field(row, "p_mmp_emp").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn sweep_over_snr() {
    let text = stdout(&[
        "sweep", "--axis", "snr-db", "--from", "0", "--to", "40", "--step", "5", "--mode",
        "analytic",
    ]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 36);
    for chunk in rows.chunks(4) {
        let aoi = |i: usize| field(chunk[i], "aoi_analytic").parse::<f64>().unwrap();
        assert!(aoi(2) <= aoi(0) && aoi(3) <= aoi(1));
    }
}

#[test]
fn sweep_embeds_failed_points() {
    let out = stdout(&[
        "sweep", "--axis", "slot", "--values", "-1,1", "--frames", "1000", "--scheme", "tdma-rt",
        "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"].as_str().unwrap().contains("slot_duration"));
    assert_eq!(rows[0]["aoi_analytic"], "nan");
    assert!(rows[1]["error"].is_null());
    assert_eq!(rows[1]["seeds"], serde_json::json!([1]));
}

#[test]
fn zero_rate_reports_no_deliveries() {
    let out = stdout(&[
        "compare", "--lambda", "0", "--frames", "500", "--scheme", "tdma-nrt", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["aoi_analytic"], "inf");
    assert_eq!(v[0]["error"], "no deliveries");
}

#[test]
fn hard_errors_exit_nonzero() {
    for args in [
        vec!["analytic", "--users", "7"],
        vec!["compare", "--frames", "0"],
        vec!["analytic", "--scheme", "bogus"],
        vec!["analytic", "--format", "xml"],
        vec!["analytic", "--out", "/nonexistent-dir/x.csv"],
        vec![
            "sweep", "--axis", "lambda", "--values", "1,0.5", "--mode", "analytic",
        ],
        vec![
            "sweep", "--axis", "lambda", "--values", "0.1,1", "--users", "3", "--mode", "analytic",
        ],
        vec!["sweep", "--axis", "voltage", "--values", "1"],
        vec!["sweep", "--axis", "lambda"],
        vec!["simulate", "--seed", "1", "--seeds", "2,3"],
    ] {
        let out = aoi(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}
