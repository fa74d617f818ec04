//! Closed-form average AoI for the four access schemes.
//!
//! Every calculator returns an [`AoiBreakdown`] holding the average AoI
//! together with the renewal moments it was assembled from and the
//! scheme-specific named constants. The Markov chains behind the
//! retransmission schemes are exposed in [`chains`] so the closed forms can be
//! re-derived numerically.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::model::{LinkStats, SchemeKind, SystemConfig};

pub mod chains;
mod lemma;
mod noma;
mod tdma;

pub use lemma::{
    coupled_secondary_map, noma_rt_secondary_success, LemmaCoefficients, SecondarySuccess,
};
pub use noma::{noma_nrt_aoi, noma_nrt_secondary_success, noma_rt_aoi};
pub use tdma::{tdma_nrt_aoi, tdma_rt_aoi};

/// Analytic AoI with the renewal quantities it was built from.
///
/// `avg_aoi = (E{D·S} + E{D²}/2) / E{D}` always holds. For TDMA-NRT, TDMA-RT
/// and NOMA-NRT the cross moment factorizes (`E{D·S} = E{S}·E{D}`); for
/// NOMA-RT it is a mixture over the two delivery slots and does not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoiBreakdown {
    pub scheme: SchemeKind,
    pub avg_aoi: f64,
    /// `E{S}`: generation-to-delivery delay.
    pub mean_system_time: f64,
    /// `E{D}`: time between consecutive deliveries.
    pub mean_interdelivery: f64,
    /// `E{D²}`.
    pub mean_sq_interdelivery: f64,
    /// `E{D_j·S_(j−1)}`.
    pub mean_cross: f64,
    pub link: LinkStats,
    pub intermediates: BTreeMap<String, f64>,
}

impl AoiBreakdown {
    /// No deliveries ever happen: every moment is infinite.
    pub fn infinite(scheme: SchemeKind, link: LinkStats) -> Self {
        AoiBreakdown {
            scheme,
            avg_aoi: f64::INFINITY,
            mean_system_time: f64::INFINITY,
            mean_interdelivery: f64::INFINITY,
            mean_sq_interdelivery: f64::INFINITY,
            mean_cross: f64::INFINITY,
            link,
            intermediates: BTreeMap::new(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.avg_aoi.is_infinite()
    }

    /// `(E{D·S} + E{D²}/2) / E{D}`.
    pub fn ratio_form(&self) -> f64 {
        (self.mean_cross + self.mean_sq_interdelivery / 2.0) / self.mean_interdelivery
    }

    /// `E{S} + E{D²}/(2E{D})`; equals `avg_aoi` whenever the cross moment factorizes.
    pub fn factorized_form(&self) -> f64 {
        self.mean_system_time + self.mean_sq_interdelivery / (2.0 * self.mean_interdelivery)
    }

    /// Named intermediate, e.g. `"gamma"` or `"K_L"`.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.intermediates.get(name).copied()
    }

    fn with(mut self, entries: &[(&str, f64)]) -> Self {
        for (k, v) in entries {
            self.intermediates.insert((*k).to_string(), *v);
        }
        self
    }
}

/// Dispatches to the calculator for `scheme`.
pub fn average_aoi(cfg: &SystemConfig, scheme: SchemeKind) -> Result<AoiBreakdown> {
    match scheme {
        SchemeKind::TdmaNrt => tdma_nrt_aoi(cfg),
        SchemeKind::TdmaRt => tdma_rt_aoi(cfg),
        SchemeKind::NomaNrt => noma_nrt_aoi(cfg),
        SchemeKind::NomaRt => noma_rt_aoi(cfg),
    }
}

/// Mean system time when the freshest arrival of the last `window` is sent in
/// a slot of length `T`: `1/λ + T − window / (e^(λ·window) − 1)`.
///
/// With `window = MT` this is `Γ`; with `MT/2` it is `Ω̄`.
pub(crate) fn truncated_wait_plus_slot(lambda: f64, window: f64, slot: f64) -> f64 {
    let u = lambda * window;
    // 1/λ − w/(e^u − 1) = (w/u)·(1 − u/(e^u − 1)); the bracket cancels for small u.
    let bracket = if u < 1e-3 {
        u / 2.0 - u * u / 12.0 + u.powi(4) / 720.0
    } else {
        1.0 - u / u.exp_m1()
    };
    window / u * bracket + slot
}
