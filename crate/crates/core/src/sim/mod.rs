//! Monte Carlo simulator for one NOMA pair.
//!
//! Arrivals are generated on the continuous timeline from exponential
//! inter-arrival times, channel gains are drawn per slot, and the age of
//! information is integrated exactly between deliveries. Every random stream
//! is derived from the run seed, so a `(config, scheme, frames, seed, warmup)`
//! tuple fully determines the output.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{SchemeKind, SystemConfig};

pub mod aoi;
mod engine;

pub use aoi::AgeIntegrator;
pub use engine::{default_warmup, simulate, simulate_traced, Delivery, SimTrace};

/// Number of batches the measured horizon is split into for batch means.
pub const BATCHES: u64 = 20;

/// Recorded in every [`SimResult`].
pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng (rand_chacha 0.9) seeded via seed_from_u64(seed); stream 2*user+0 arrivals, 2*user+1 channel";

/// Minimum attempts before a success frequency is reported.
pub const MIN_ATTEMPTS: u64 = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SuccessCount {
    pub attempts: u64,
    pub successes: u64,
}

impl SuccessCount {
    pub fn frequency(&self) -> f64 {
        self.successes as f64 / self.attempts as f64
    }

    pub fn merge(self, other: SuccessCount) -> SuccessCount {
        SuccessCount {
            attempts: self.attempts + other.attempts,
            successes: self.successes + other.successes,
        }
    }

    pub fn estimate(&self) -> Estimate {
        let p = self.frequency();
        Estimate {
            value: p,
            std_err: (p * (1.0 - p) / self.attempts as f64).sqrt(),
            attempts: self.attempts,
        }
    }
}

/// Per-user statistics over the measured horizon.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct UserStats {
    pub avg_aoi: f64,
    pub batch_means: Vec<f64>,
    pub arrivals: u64,
    pub deliveries: u64,
    /// Transmissions in the user's own slot.
    pub primary: SuccessCount,
    /// Transmissions in the partner's slot (NOMA only).
    pub secondary: SuccessCount,
    pub interdeliveries: u64,
    pub sum_interdelivery: f64,
    pub sum_sq_interdelivery: f64,
    pub sum_system_time: f64,
    /// `Σ D_j·S_(j−1)`.
    pub sum_cross: f64,
}

impl UserStats {
    pub fn mean_interdelivery(&self) -> f64 {
        self.sum_interdelivery / self.interdeliveries as f64
    }

    pub fn mean_sq_interdelivery(&self) -> f64 {
        self.sum_sq_interdelivery / self.interdeliveries as f64
    }

    pub fn mean_system_time(&self) -> f64 {
        self.sum_system_time / self.deliveries as f64
    }

    pub fn mean_cross(&self) -> f64 {
        self.sum_cross / self.interdeliveries as f64
    }

    /// `(Ê{D·S} + Ê{D²}/2)/Ê{D}`.
    pub fn renewal_aoi(&self) -> f64 {
        (self.mean_cross() + self.mean_sq_interdelivery() / 2.0) / self.mean_interdelivery()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub scheme: SchemeKind,
    pub config: SystemConfig,
    pub frames: u64,
    pub warmup_frames: u64,
    pub seed: u64,
    pub rng: &'static str,
    /// Length of the measured horizon.
    pub horizon: f64,
    /// `[m, m']`.
    pub users: [UserStats; 2],
}

impl SimResult {
    /// Time-average AoI of user `m`.
    pub fn avg_aoi(&self) -> f64 {
        self.users[0].avg_aoi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub attempts: u64,
}

impl Estimate {
    /// Distance to `target` in standard errors. A zero standard error counts
    /// as agreement only on an exact match.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err
        }
    }
}

/// Empirical success frequencies of user `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalLinkStats {
    /// `P_mm`.
    pub p_primary: Estimate,
    /// `P_mm'`; `None` for TDMA.
    pub p_secondary: Option<Estimate>,
}

pub fn empirical_success_probs(result: &SimResult) -> Result<EmpiricalLinkStats> {
    let user = &result.users[0];
    let check = |what, c: SuccessCount| {
        if c.attempts < MIN_ATTEMPTS {
            Err(Error::UnderSampled {
                what,
                attempts: c.attempts,
                required: MIN_ATTEMPTS,
            })
        } else {
            Ok(c.estimate())
        }
    };
    let p_primary = check("primary slot", user.primary)?;
    let p_secondary = if result.scheme.is_noma() {
        Some(check("secondary slot", user.secondary)?)
    } else {
        None
    };
    Ok(EmpiricalLinkStats {
        p_primary,
        p_secondary,
    })
}

/// Mean across replications with a normal-approximation interval built from
/// the batch means of every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PooledEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub batches: usize,
}

impl PooledEstimate {
    /// Half-width of the two-sided interval at `level` (e.g. 0.95).
    pub fn half_width(&self, level: f64) -> f64 {
        let z = Normal::new(0.0, 1.0)
            .unwrap()
            .inverse_cdf(0.5 + level / 2.0);
        z * self.std_err
    }

    pub fn contains(&self, x: f64, level: f64) -> bool {
        (x - self.mean).abs() <= self.half_width(level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub runs: Vec<SimResult>,
    pub pooled: PooledEstimate,
}

impl Replication {
    /// Success counts of user `m` summed over all runs.
    pub fn pooled_counts(&self) -> (SuccessCount, SuccessCount) {
        self.runs.iter().fold(Default::default(), |(p, s), r| {
            (p.merge(r.users[0].primary), s.merge(r.users[0].secondary))
        })
    }

    pub fn total_deliveries(&self) -> u64 {
        self.runs.iter().map(|r| r.users[0].deliveries).sum()
    }
}

/// Runs one simulation per seed (in parallel) and pools user `m`'s AoI.
pub fn replicate(
    cfg: &SystemConfig,
    scheme: SchemeKind,
    frames: u64,
    seeds: &[u64],
    warmup_frames: Option<u64>,
) -> Result<Replication> {
    if seeds.is_empty() {
        return Err(Error::param("seeds", "at least one seed is required"));
    }
    let warmup = warmup_frames.unwrap_or_else(|| default_warmup(frames));
    let runs = seeds
        .par_iter()
        .map(|&seed| simulate(cfg, scheme, frames, seed, warmup))
        .collect::<Result<Vec<_>>>()?;
    let pooled = pool(&runs);
    Ok(Replication { runs, pooled })
}

fn pool(runs: &[SimResult]) -> PooledEstimate {
    let mean = runs.iter().map(SimResult::avg_aoi).sum::<f64>() / runs.len() as f64;
    let batches: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.users[0].batch_means.iter().copied())
        .collect();
    let n = batches.len();
    let std_err = if n > 1 {
        let m = batches.iter().sum::<f64>() / n as f64;
        let var = batches.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    PooledEstimate {
        mean,
        std_err,
        batches: n,
    }
}
