use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::harness::ComparisonRow;

pub const CSV_HEADER: &str = "scheme,M,T,N_bits,snr_db,snr_s_db,lambda_m,lambda_mp,frames,seeds,aoi_analytic,aoi_sim,ci95,rel_err,p_mm_analytic,p_mm_emp,p_mmp_analytic,p_mmp_emp";

const SIGNIFICANT: i32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::param(
                "format",
                format!("expected csv or json, got `{other}`"),
            )),
        }
    }
}

/// `printf("%.9g")`, with `inf`, `-inf` and `nan` for non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..SIGNIFICANT).contains(&exp) {
        let fixed = format!("{:.*}", (SIGNIFICANT - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_line(r: &ComparisonRow) -> String {
    let p = &r.point;
    let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
    let mut fields = vec![
        r.scheme.as_str().to_string(),
        p.users.to_string(),
        format_number(p.slot),
        format_number(p.bits),
        format_number(p.snr_db),
        format_number(p.snr_s_db()),
        format_number(p.lambda),
        format_number(p.lambda_partner()),
        r.frames.to_string(),
        seeds.join(";"),
    ];
    fields.extend(
        [
            r.aoi_analytic,
            r.aoi_sim,
            r.ci95,
            r.rel_err,
            r.p_mm_analytic,
            r.p_mm_emp,
            r.p_mmp_analytic,
            r.p_mmp_emp,
        ]
        .map(format_number),
    );
    fields.join(",")
}

fn json_number(x: f64) -> Value {
    let s = format_number(x);
    match s.parse::<f64>().ok().and_then(Number::from_f64) {
        Some(n) if x.is_finite() => Value::Number(n),
        _ => Value::String(s),
    }
}

fn json_row(r: &ComparisonRow) -> Value {
    let p = &r.point;
    let mut m = Map::new();
    m.insert("scheme".into(), r.scheme.as_str().into());
    m.insert("M".into(), p.users.into());
    m.insert("T".into(), json_number(p.slot));
    m.insert("N_bits".into(), json_number(p.bits));
    m.insert("snr_db".into(), json_number(p.snr_db));
    m.insert("snr_s_db".into(), json_number(p.snr_s_db()));
    m.insert("lambda_m".into(), json_number(p.lambda));
    m.insert("lambda_mp".into(), json_number(p.lambda_partner()));
    m.insert("frames".into(), r.frames.into());
    m.insert("seeds".into(), r.seeds.clone().into());
    for (k, v) in [
        ("aoi_analytic", r.aoi_analytic),
        ("aoi_sim", r.aoi_sim),
        ("ci95", r.ci95),
        ("rel_err", r.rel_err),
        ("p_mm_analytic", r.p_mm_analytic),
        ("p_mm_emp", r.p_mm_emp),
        ("p_mmp_analytic", r.p_mmp_analytic),
        ("p_mmp_emp", r.p_mmp_emp),
    ] {
        m.insert(k.into(), json_number(v));
    }
    m.insert(
        "error".into(),
        r.error.clone().map_or(Value::Null, Value::String),
    );
    Value::Object(m)
}

/// Writes `rows` as CSV (header plus one line per row) or as a JSON array.
pub fn emit<W: Write>(rows: &[ComparisonRow], format: OutputFormat, out: &mut W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(out, "{}", csv_line(r))?;
            }
        }
        OutputFormat::Json => {
            let doc = Value::Array(rows.iter().map(json_row).collect());
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// [`emit`] to a file, or to standard output when `path` is `None`.
pub fn emit_to_path(
    rows: &[ComparisonRow],
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            emit(rows, format, &mut BufWriter::new(file))
        }
        None => emit(rows, format, &mut std::io::stdout().lock()),
    }
}
