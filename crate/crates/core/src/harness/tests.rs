use std::path::Path;

use proptest::prelude::*;

use super::*;

fn fig6(bits: f64) -> PointConfig {
    PointConfig {
        users: 8,
        slot: 3.0,
        bits,
        snr_db: 10.0,
        snr_s_db: None,
        lambda: 0.1,
        lambda_partner: None,
    }
}

fn settings(frames: u64) -> SimSettings {
    SimSettings {
        frames,
        seeds: vec![1, 2],
        warmup_frames: None,
    }
}

fn analytic_sweep(axis: SweepAxis, values: Vec<f64>, base: PointConfig) -> Vec<ComparisonRow> {
    run_sweep(&SweepSpec {
        axis,
        values,
        base,
        schemes: SchemeKind::ALL.to_vec(),
        mode: RowMode::Analytic,
        sim: None,
    })
    .unwrap()
}

#[test]
fn number_format() {
    let cases = [
        (0.0, "0"),
        (1.0, "1"),
        (24.998, "24.998"),
        (1.0 / 3.0, "0.333333333"),
        (123456789.0, "123456789"),
        (1234567890.0, "1.23456789e+09"),
        (0.0001, "0.0001"),
        (0.00001234, "1.234e-05"),
        (-2.5, "-2.5"),
        (f64::INFINITY, "inf"),
        (f64::NAN, "nan"),
        (99.9999999999, "100"),
    ];
    for (x, want) in cases {
        assert_eq!(format_number(x), want, "{x}");
    }
}

#[test]
fn tdma_nrt_point_agrees() {
    let row = run_point(
        &fig6(1.0),
        SchemeKind::TdmaNrt,
        RowMode::Both,
        Some(&settings(100_000)),
    )
    .unwrap();
    assert!(row.rel_err <= 0.02, "{row:?}");
    assert!(row.ci95 >= 0.0);
    assert_eq!(row.point, fig6(1.0));
    assert!(row.p_mmp_analytic.is_nan());
}

#[test]
fn zero_rate_point() {
    let p = PointConfig {
        lambda: 0.0,
        ..fig6(1.0)
    };
    for scheme in SchemeKind::ALL {
        let row = run_point(&p, scheme, RowMode::Both, Some(&settings(1_000))).unwrap();
        assert_eq!(row.aoi_analytic, f64::INFINITY);
        assert!(row.aoi_sim.is_nan());
        assert_eq!(row.error.as_deref(), Some("no deliveries"));
    }
}

#[test]
fn point_errors() {
    assert!(run_point(
        &fig6(1.0),
        SchemeKind::TdmaRt,
        RowMode::Both,
        Some(&settings(0))
    )
    .is_err());
    assert!(run_point(&fig6(1.0), SchemeKind::TdmaRt, RowMode::Simulation, None).is_err());
    let odd = PointConfig {
        users: 7,
        ..fig6(1.0)
    };
    assert!(run_point(&odd, SchemeKind::TdmaRt, RowMode::Analytic, None).is_err());
}

#[test]
fn csv_shape() {
    let row = run_point(
        &fig6(1.0),
        SchemeKind::NomaRt,
        RowMode::Both,
        Some(&settings(2_000)),
    )
    .unwrap();
    let mut buf = Vec::new();
    emit(&[row], OutputFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), CSV_HEADER.split(',').count());
    assert_eq!(fields[0], "noma-rt");
    assert_eq!(fields[9], "1;2");
}

#[test]
fn json_keys_match_csv() {
    let p = PointConfig {
        lambda: 0.0,
        ..fig6(1.0)
    };
    let rows = vec![
        run_point(&fig6(1.0), SchemeKind::TdmaNrt, RowMode::Analytic, None).unwrap(),
        run_point(&p, SchemeKind::TdmaNrt, RowMode::Analytic, None).unwrap(),
    ];
    let mut buf = Vec::new();
    emit(&rows, OutputFormat::Json, &mut buf).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for obj in arr {
        let obj = obj.as_object().unwrap();
        for key in CSV_HEADER.split(',') {
            assert!(obj.contains_key(key), "{key}");
        }
        assert!(obj["error"].is_null());
    }
    assert_eq!(arr[1]["aoi_analytic"], "inf");
    assert_eq!(arr[0]["aoi_sim"], "nan");
}

#[test]
fn empty_rows_rejected() {
    let mut buf = Vec::new();
    assert_eq!(
        emit(&[], OutputFormat::Csv, &mut buf),
        Err(Error::EmptyRows)
    );
    assert_eq!(
        emit_to_path(&[], OutputFormat::Json, None),
        Err(Error::EmptyRows)
    );
}

#[test]
fn unwritable_destination() {
    let row = run_point(&fig6(1.0), SchemeKind::TdmaNrt, RowMode::Analytic, None).unwrap();
    let err = emit_to_path(
        &[row],
        OutputFormat::Csv,
        Some(Path::new("/nonexistent-dir/out.csv")),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}

#[test]
fn sweep_order_and_failed_points() {
    let spec = SweepSpec {
        axis: SweepAxis::SlotDuration,
        values: vec![-1.0, 1.0, 2.0],
        base: fig6(1.0),
        schemes: vec![SchemeKind::NomaRt, SchemeKind::TdmaNrt],
        mode: RowMode::Both,
        sim: Some(settings(500)),
    };
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 6);
    let order: Vec<(f64, SchemeKind)> = rows.iter().map(|r| (r.point.slot, r.scheme)).collect();
    assert_eq!(
        order,
        vec![
            (-1.0, SchemeKind::NomaRt),
            (-1.0, SchemeKind::TdmaNrt),
            (1.0, SchemeKind::NomaRt),
            (1.0, SchemeKind::TdmaNrt),
            (2.0, SchemeKind::NomaRt),
            (2.0, SchemeKind::TdmaNrt),
        ]
    );
    assert!(rows[0].error.is_some() && rows[0].aoi_analytic.is_nan());
    assert!(rows[2..].iter().all(|r| r.error.is_none()));
    let csv = |rows: &[ComparisonRow]| {
        let mut buf = Vec::new();
        emit(rows, OutputFormat::Csv, &mut buf).unwrap();
        buf
    };
    assert_eq!(csv(&run_sweep(&spec).unwrap()), csv(&rows));
}

#[test]
fn sweep_validation() {
    let mut spec = SweepSpec {
        axis: SweepAxis::SnrDb,
        values: vec![0.0, 10.0],
        base: fig6(1.0),
        schemes: SchemeKind::ALL.to_vec(),
        mode: RowMode::Both,
        sim: None,
    };
    assert!(spec.validate().is_err());
    spec.mode = RowMode::Analytic;
    assert!(spec.validate().is_ok());
    spec.values = vec![10.0, 0.0];
    assert!(matches!(spec.validate(), Err(Error::InvalidSweep(_))));
    spec.values = vec![];
    assert!(spec.validate().is_err());
    spec.values = vec![1.0];
    spec.schemes.clear();
    assert!(spec.validate().is_err());
}

#[test]
fn range_values() {
    assert_eq!(axis_range(0.0, 40.0, 5.0).unwrap().len(), 9);
    assert_eq!(axis_range(0.1, 0.3, 0.1).unwrap().len(), 3);
    assert!(axis_range(1.0, 0.0, 1.0).is_err());
    assert!(axis_range(0.0, 1.0, 0.0).is_err());
    assert!("bogus".parse::<SweepAxis>().is_err());
    assert_eq!(
        "slot-duration".parse::<SweepAxis>().unwrap(),
        SweepAxis::SlotDuration
    );
}

#[test]
fn noma_beats_tdma_over_snr() {
    let rows = analytic_sweep(
        SweepAxis::SnrDb,
        axis_range(0.0, 40.0, 5.0).unwrap(),
        fig6(1.0),
    );
    assert_eq!(rows.len(), 36);
    for chunk in rows.chunks(4) {
        let aoi = |s: SchemeKind| chunk.iter().find(|r| r.scheme == s).unwrap().aoi_analytic;
        assert!(aoi(SchemeKind::NomaNrt) <= aoi(SchemeKind::TdmaNrt));
        assert!(aoi(SchemeKind::NomaRt) <= aoi(SchemeKind::TdmaRt));
    }
}

#[test]
fn slot_duration_has_interior_minimum() {
    let base = PointConfig {
        bits: 2.0,
        snr_db: 10.0,
        ..fig6(2.0)
    };
    let values = vec![0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    let rows = analytic_sweep(SweepAxis::SlotDuration, values.clone(), base);
    for scheme in SchemeKind::ALL {
        let curve: Vec<f64> = rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| r.aoi_analytic)
            .collect();
        let argmin = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(
            argmin > 0 && argmin < values.len() - 1,
            "{scheme}: {curve:?}"
        );
    }
}

#[test]
fn aoi_flattens_in_arrival_rate() {
    let base = PointConfig {
        slot: 1.0,
        ..fig6(1.0)
    };
    let values = vec![0.01, 0.03, 0.1, 0.3, 1.0, 2.0, 3.0];
    let rows = analytic_sweep(SweepAxis::Lambda, values, base);
    for scheme in SchemeKind::ALL {
        let curve: Vec<f64> = rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| r.aoi_analytic)
            .collect();
        assert!(curve.windows(2).all(|w| w[1] < w[0]), "{scheme}: {curve:?}");
        let first_drop = curve[0] - curve[1];
        let last_drop = curve[curve.len() - 2] - curve[curve.len() - 1];
        assert!(last_drop < 0.05 * first_drop);
    }
}

proptest! {
    #[test]
    fn formatted_numbers_round_trip(x in prop::num::f64::NORMAL) {
        let s = format_number(x);
        let back: f64 = s.parse().unwrap();
        let want: f64 = format!("{x:.8e}").parse().unwrap();
        prop_assert_eq!(back, want);
    }
}
