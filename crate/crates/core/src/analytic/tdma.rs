use crate::analytic::{truncated_wait_plus_slot, AoiBreakdown};
use crate::error::Result;
use crate::model::{one_minus_exp_neg, LinkStats, SchemeKind, SystemConfig};

/// TDMA without retransmission.
///
/// Each frame delivers independently with probability `(1 − e^(−λMT))·P_mm`,
/// so `D` is geometric in units of `MT` and independent of `S`.
pub fn tdma_nrt_aoi(cfg: &SystemConfig) -> Result<AoiBreakdown> {
    let link = LinkStats::orthogonal(cfg)?;
    let lambda = cfg.arrival_rate;
    let mt = cfg.frame_length();
    let per_frame = one_minus_exp_neg(lambda * mt) * link.p_primary;
    if lambda == 0.0 || per_frame == 0.0 {
        return Ok(AoiBreakdown::infinite(SchemeKind::TdmaNrt, link));
    }
    let gamma = truncated_wait_plus_slot(lambda, mt, cfg.slot_duration);
    let mean_d = mt / per_frame;
    let mean_d2 = mt * mt * (2.0 - per_frame) / (per_frame * per_frame);
    let avg = gamma + mt * (2.0 - per_frame) / (2.0 * per_frame);
    Ok(AoiBreakdown {
        scheme: SchemeKind::TdmaNrt,
        avg_aoi: avg,
        mean_system_time: gamma,
        mean_interdelivery: mean_d,
        mean_sq_interdelivery: mean_d2,
        mean_cross: gamma * mean_d,
        link,
        intermediates: Default::default(),
    }
    .with(&[("Gamma", gamma)]))
}

/// TDMA with retransmission.
///
/// A failed update is retried in the next frame unless a fresher arrival
/// replaces it; `Λ = E{D²}` and `Ψ = E{D}` come from the three-state
/// absorbing chain in [`super::chains::tdma_rt_interdelivery_chain`].
pub fn tdma_rt_aoi(cfg: &SystemConfig) -> Result<AoiBreakdown> {
    let link = LinkStats::orthogonal(cfg)?;
    let lambda = cfg.arrival_rate;
    let mt = cfg.frame_length();
    let p = link.p_primary;
    if lambda == 0.0 || p == 0.0 {
        return Ok(AoiBreakdown::infinite(SchemeKind::TdmaRt, link));
    }
    let e = (-lambda * mt).exp();
    let om = one_minus_exp_neg(lambda * mt);

    let gamma = truncated_wait_plus_slot(lambda, mt, cfg.slot_duration);
    let retry = mt * (1.0 - p) * e / (1.0 - (1.0 - p) * e);
    let psi = mt * (om + p * e) / (om * p);
    let lambda_big =
        mt * mt * ((om + p) * (3.0 * e - 1.0) / (om * om * p) + (2.0 + p * p) / (p * p));

    let mean_s = gamma + retry;
    Ok(AoiBreakdown {
        scheme: SchemeKind::TdmaRt,
        avg_aoi: mean_s + lambda_big / (2.0 * psi),
        mean_system_time: mean_s,
        mean_interdelivery: psi,
        mean_sq_interdelivery: lambda_big,
        mean_cross: mean_s * psi,
        link,
        intermediates: Default::default(),
    }
    .with(&[
        ("Gamma", gamma),
        ("Lambda", lambda_big),
        ("Psi", psi),
        ("retry_wait", retry),
    ]))
}
