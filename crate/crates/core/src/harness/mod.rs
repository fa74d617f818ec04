//! Analytic-versus-simulation comparison rows, sweeps and CSV/JSON output.
//!
//! Powers enter here in dB and are converted to linear SNR exactly once.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::average_aoi;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, SchemeKind, SystemConfig};
use crate::sim::replicate;

mod format;

pub use format::{emit, emit_to_path, format_number, OutputFormat, CSV_HEADER};

/// One operating point, with powers in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    pub users: u32,
    pub slot: f64,
    pub bits: f64,
    pub snr_db: f64,
    /// Secondary SNR; follows `snr_db` when unset.
    pub snr_s_db: Option<f64>,
    pub lambda: f64,
    /// Partner arrival rate; follows `lambda` when unset.
    pub lambda_partner: Option<f64>,
}

impl PointConfig {
    pub fn snr_s_db(&self) -> f64 {
        self.snr_s_db.unwrap_or(self.snr_db)
    }

    pub fn lambda_partner(&self) -> f64 {
        self.lambda_partner.unwrap_or(self.lambda)
    }

    pub fn system(&self) -> Result<SystemConfig> {
        let cfg = SystemConfig {
            num_users: self.users,
            slot_duration: self.slot,
            packet_bits: self.bits,
            primary_power: db_to_linear(self.snr_db),
            secondary_power: db_to_linear(self.snr_s_db()),
            arrival_rate: self.lambda,
            partner_arrival_rate: self.lambda_partner(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Copy with the swept parameter set to `value`.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Self {
        let mut p = *self;
        match axis {
            SweepAxis::SnrDb => p.snr_db = value,
            SweepAxis::Lambda => p.lambda = value,
            SweepAxis::SlotDuration => p.slot = value,
        }
        p
    }
}

/// Which engines fill a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMode {
    Analytic,
    Simulation,
    Both,
}

impl RowMode {
    fn analytic(self) -> bool {
        self != RowMode::Simulation
    }

    fn simulation(self) -> bool {
        self != RowMode::Analytic
    }
}

/// Simulation settings shared by every point of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimSettings {
    pub frames: u64,
    pub seeds: Vec<u64>,
    pub warmup_frames: Option<u64>,
}

impl SimSettings {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::param("frames", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::param("seeds", "at least one seed is required"));
        }
        Ok(())
    }
}

/// Missing numbers are NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scheme: SchemeKind,
    pub point: PointConfig,
    pub frames: u64,
    pub seeds: Vec<u64>,
    pub aoi_analytic: f64,
    pub aoi_sim: f64,
    pub ci95: f64,
    pub rel_err: f64,
    pub p_mm_analytic: f64,
    pub p_mm_emp: f64,
    pub p_mmp_analytic: f64,
    pub p_mmp_emp: f64,
    pub error: Option<String>,
}

impl ComparisonRow {
    fn empty(scheme: SchemeKind, point: PointConfig, sim: Option<&SimSettings>) -> Self {
        ComparisonRow {
            scheme,
            point,
            frames: sim.map_or(0, |s| s.frames),
            seeds: sim.map_or_else(Vec::new, |s| s.seeds.clone()),
            aoi_analytic: f64::NAN,
            aoi_sim: f64::NAN,
            ci95: f64::NAN,
            rel_err: f64::NAN,
            p_mm_analytic: f64::NAN,
            p_mm_emp: f64::NAN,
            p_mmp_analytic: f64::NAN,
            p_mmp_emp: f64::NAN,
            error: None,
        }
    }

    /// Row for a point that failed; numbers stay NaN.
    pub fn failed(
        scheme: SchemeKind,
        point: PointConfig,
        sim: Option<&SimSettings>,
        err: &Error,
    ) -> Self {
        ComparisonRow {
            error: Some(err.to_string()),
            ..Self::empty(scheme, point, sim)
        }
    }
}

/// Evaluates one scheme at one point.
pub fn run_point(
    point: &PointConfig,
    scheme: SchemeKind,
    mode: RowMode,
    sim: Option<&SimSettings>,
) -> Result<ComparisonRow> {
    let cfg = point.system()?;
    let sim = if mode.simulation() {
        let s = sim.ok_or_else(|| Error::param("frames", "simulation settings are required"))?;
        s.validate()?;
        Some(s)
    } else {
        None
    };
    let mut row = ComparisonRow::empty(scheme, *point, sim);

    if mode.analytic() {
        let b = average_aoi(&cfg, scheme)?;
        row.aoi_analytic = b.avg_aoi;
        row.p_mm_analytic = b.link.p_primary;
        if scheme.is_noma() {
            // the retransmission solve is skipped when the AoI is infinite
            row.p_mmp_analytic = match b.link.p_secondary_m {
                Some(p) => p,
                None if scheme == SchemeKind::NomaNrt => {
                    crate::analytic::noma_nrt_secondary_success(&cfg)?
                }
                None => f64::NAN,
            };
        }
    }

    if let Some(s) = sim {
        let rep = replicate(&cfg, scheme, s.frames, &s.seeds, s.warmup_frames)?;
        let (primary, secondary) = rep.pooled_counts();
        let freq = |c: crate::sim::SuccessCount| {
            if c.attempts > 0 {
                c.frequency()
            } else {
                f64::NAN
            }
        };
        row.p_mm_emp = freq(primary);
        if scheme.is_noma() {
            row.p_mmp_emp = freq(secondary);
        }
        if rep.total_deliveries() == 0 {
            row.error = Some("no deliveries".to_string());
        } else {
            row.aoi_sim = rep.pooled.mean;
            row.ci95 = rep.pooled.half_width(0.95);
            if row.aoi_analytic.is_finite() {
                row.rel_err = (row.aoi_sim - row.aoi_analytic).abs() / row.aoi_analytic;
            }
        }
    }
    Ok(row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    Lambda,
    SlotDuration,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Lambda => "lambda",
            SweepAxis::SlotDuration => "slot_duration",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "snr_db" | "snr" => Ok(SweepAxis::SnrDb),
            "lambda" => Ok(SweepAxis::Lambda),
            "slot_duration" | "slot" => Ok(SweepAxis::SlotDuration),
            other => Err(Error::InvalidSweep(format!("unknown axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub base: PointConfig,
    pub schemes: Vec<SchemeKind>,
    pub mode: RowMode,
    pub sim: Option<SimSettings>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidSweep("no axis values".into()));
        }
        if let Some(bad) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "axis value {bad} is not finite"
            )));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSweep(
                "axis values must be strictly increasing".into(),
            ));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidSweep("no schemes selected".into()));
        }
        if self.mode.simulation() {
            self.sim
                .as_ref()
                .ok_or_else(|| Error::InvalidSweep("simulation settings missing".into()))?
                .validate()?;
        }
        Ok(())
    }
}

/// `from, from + step, …` up to `to` (inclusive, with a small tolerance).
pub fn axis_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::InvalidSweep(format!(
            "bad range {from}..{to} step {step}"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as u64;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

/// Rows in axis order, schemes in the given order within each value.
///
/// A failing point becomes a row carrying the error instead of aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ComparisonRow>> {
    spec.validate()?;
    let jobs: Vec<(PointConfig, SchemeKind)> = spec
        .values
        .iter()
        .flat_map(|&v| {
            spec.schemes
                .iter()
                .map(move |&s| (spec.base.with_axis(spec.axis, v), s))
        })
        .collect();
    let sim = spec.sim.as_ref();
    Ok(jobs
        .par_iter()
        .map(|(point, scheme)| {
            run_point(point, *scheme, spec.mode, sim)
                .unwrap_or_else(|e| ComparisonRow::failed(*scheme, *point, sim, &e))
        })
        .collect())
}

#[cfg(test)]
mod tests;
