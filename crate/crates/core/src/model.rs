//! System parameters and the memoryless per-slot link primitives shared by the
//! analytic and simulation engines.
//!
//! Channels are Rayleigh block-fading with unit-mean exponential power gains
//! and unit noise power, so `P` and `Ps` are SNRs.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiple-access and retransmission combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "tdma-nrt")]
    TdmaNrt,
    #[serde(rename = "tdma-rt")]
    TdmaRt,
    #[serde(rename = "noma-nrt")]
    NomaNrt,
    #[serde(rename = "noma-rt")]
    NomaRt,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::TdmaNrt,
        SchemeKind::TdmaRt,
        SchemeKind::NomaNrt,
        SchemeKind::NomaRt,
    ];

    pub fn is_noma(self) -> bool {
        matches!(self, SchemeKind::NomaNrt | SchemeKind::NomaRt)
    }

    pub fn retransmits(self) -> bool {
        matches!(self, SchemeKind::TdmaRt | SchemeKind::NomaRt)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::TdmaNrt => "tdma-nrt",
            SchemeKind::TdmaRt => "tdma-rt",
            SchemeKind::NomaNrt => "noma-nrt",
            SchemeKind::NomaRt => "noma-rt",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "tdma-nrt" => Ok(SchemeKind::TdmaNrt),
            "tdma-rt" => Ok(SchemeKind::TdmaRt),
            "noma-nrt" => Ok(SchemeKind::NomaNrt),
            "noma-rt" => Ok(SchemeKind::NomaRt),
            other => Err(Error::param("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

/// Physical and protocol parameters of one NOMA pair `(m, m + M/2)`.
///
/// `arrival_rate` belongs to the tagged user `m`; `partner_arrival_rate` to
/// its partner `m'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_users: u32,
    pub slot_duration: f64,
    pub packet_bits: f64,
    pub primary_power: f64,
    pub secondary_power: f64,
    pub arrival_rate: f64,
    pub partner_arrival_rate: f64,
}

impl SystemConfig {
    /// Symmetric configuration: `Ps = P` and `λ_m' = λ_m`.
    pub fn symmetric(
        num_users: u32,
        slot_duration: f64,
        packet_bits: f64,
        power: f64,
        arrival_rate: f64,
    ) -> Self {
        SystemConfig {
            num_users,
            slot_duration,
            packet_bits,
            primary_power: power,
            secondary_power: power,
            arrival_rate,
            partner_arrival_rate: arrival_rate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_users < 2 || !self.num_users.is_multiple_of(2) {
            return Err(Error::param(
                "num_users",
                format!("must be an even integer >= 2, got {}", self.num_users),
            ));
        }
        positive("slot_duration", self.slot_duration)?;
        non_negative("packet_bits", self.packet_bits)?;
        positive("primary_power", self.primary_power)?;
        positive("secondary_power", self.secondary_power)?;
        non_negative("arrival_rate", self.arrival_rate)?;
        non_negative("partner_arrival_rate", self.partner_arrival_rate)?;
        Ok(())
    }

    /// `M·T`.
    pub fn frame_length(&self) -> f64 {
        f64::from(self.num_users) * self.slot_duration
    }

    pub fn epsilon(&self) -> Result<RateThreshold> {
        epsilon_threshold(self.packet_bits, self.slot_duration)
    }

    /// Same pair seen from the partner's side (arrival rates swapped).
    pub fn mirrored(&self) -> Self {
        SystemConfig {
            arrival_rate: self.partner_arrival_rate,
            partner_arrival_rate: self.arrival_rate,
            ..*self
        }
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and > 0, got {x}"),
        ))
    }
}

fn non_negative(name: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and >= 0, got {x}"),
        ))
    }
}

/// SNR decoding threshold for delivering `N` bits in a slot of duration `T`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RateThreshold(f64);

impl RateThreshold {
    pub fn new(epsilon: f64) -> Result<Self> {
        non_negative("epsilon", epsilon)?;
        Ok(RateThreshold(epsilon))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Per-slot success probabilities of the tagged pair.
///
/// The secondary-slot probabilities are `None` for TDMA schemes, where nobody
/// transmits outside their own slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    /// `P_mm`: user `m` in its own slot.
    pub p_primary: f64,
    /// `P_m'm'`: partner in its own slot.
    pub p_partner_primary: f64,
    /// `P_mm'`: user `m` as secondary in slot `m'`.
    pub p_secondary_m: Option<f64>,
    /// `P_m'm`: partner as secondary in slot `m`.
    pub p_secondary_partner: Option<f64>,
    /// `Θ`: secondary success when the primary is active.
    pub theta: f64,
    /// `e^(−ε/Ps)`: secondary success when the primary is silent.
    pub secondary_clear: f64,
}

impl LinkStats {
    /// Primary-slot probabilities only; secondary fields left empty.
    pub fn orthogonal(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let eps = cfg.epsilon()?;
        let p = primary_success_prob(cfg.primary_power, eps)?;
        Ok(LinkStats {
            p_primary: p,
            p_partner_primary: p,
            p_secondary_m: None,
            p_secondary_partner: None,
            theta: interfered_secondary_success(cfg.primary_power, cfg.secondary_power, eps)?,
            secondary_clear: primary_success_prob(cfg.secondary_power, eps)?,
        })
    }
}

/// Unit-mean exponential channel power gain `|h|²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChannelGain(f64);

impl ChannelGain {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        ChannelGain(Exp1.sample(rng))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `ε = 2^(N/T) − 1`.
pub fn epsilon_threshold(bits: f64, slot: f64) -> Result<RateThreshold> {
    positive("slot", slot)?;
    non_negative("bits", bits)?;
    // exp_m1 keeps tiny rates exact.
    RateThreshold::new((bits / slot * std::f64::consts::LN_2).exp_m1())
}

/// `e^(−ε/P)`: success probability of an interference-free transmission.
pub fn primary_success_prob(power: f64, eps: RateThreshold) -> Result<f64> {
    positive("power", power)?;
    Ok((-eps.value() / power).exp())
}

/// `Θ = e^(−ε/Ps) / (1 + P·ε/Ps)`: probability that a secondary signal is
/// decoded first under SIC while the primary is transmitting.
pub fn interfered_secondary_success(
    primary: f64,
    secondary: f64,
    eps: RateThreshold,
) -> Result<f64> {
    positive("primary_power", primary)?;
    positive("secondary_power", secondary)?;
    let e = eps.value();
    Ok((-e / secondary).exp() / (1.0 + primary * e / secondary))
}

/// Probability of at least one Poisson arrival in a window.
pub fn arrival_prob(lambda: f64, window: f64) -> Result<f64> {
    non_negative("lambda", lambda)?;
    non_negative("window", window)?;
    Ok(one_minus_exp_neg(lambda * window))
}

/// `1 − e^(−x)` without cancellation for small `x`.
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
