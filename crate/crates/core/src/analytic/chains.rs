//! Markov chains underlying the retransmission analyses.
//!
//! These are the numerical counterparts of the closed forms: feeding them to
//! [`crate::markov`] reproduces `Ψ`, `Λ`, `γ₁`, `γ₄`, `W`, `W′` and `H`.

use crate::error::Result;
use crate::markov::{absorption_stats, AbsorbingChain, AbsorptionStats, Matrix, StochasticMatrix};
use crate::model::{one_minus_exp_neg, SystemConfig};

/// Renewal moments `(E{D}, E{D²})` from absorption statistics, where each
/// chain step after the first lasts `step` time units: `D = (n − 1)·step`.
pub fn interdelivery_moments(stats: &AbsorptionStats, start: usize, step: f64) -> (f64, f64) {
    let n = stats.expected_steps[start];
    let n2 = stats.second_moment(start);
    ((n - 1.0) * step, step * step * (n2 - 2.0 * n + 1.0))
}

/// TDMA-RT inter-delivery chain. Transient states: just delivered, no update
/// at slot start, update at slot start. One step is one frame.
pub fn tdma_rt_interdelivery_chain(cfg: &SystemConfig, p_primary: f64) -> Result<AbsorbingChain> {
    let u = cfg.arrival_rate * cfg.frame_length();
    let (idle, busy) = ((-u).exp(), one_minus_exp_neg(u));
    let q = Matrix::from_rows(&[
        [0.0, idle, busy],
        [0.0, idle, busy],
        [0.0, 0.0, 1.0 - p_primary],
    ])?;
    AbsorbingChain::with_absorption_column(q, &[0.0, 0.0, p_primary])
}

/// `(E{D}, E{D²})` for TDMA-RT via the fundamental matrix.
pub fn tdma_rt_chain_moments(cfg: &SystemConfig, p_primary: f64) -> Result<(f64, f64)> {
    let stats = absorption_stats(&tdma_rt_interdelivery_chain(cfg, p_primary)?)?;
    Ok(interdelivery_moments(&stats, 0, cfg.frame_length()))
}

/// Where the previous delivery of user `m` completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeliverySlot {
    /// Own (primary) slot `m`.
    Own,
    /// Partner's slot `m'`, used as secondary.
    Partner,
}

/// NOMA-RT inter-delivery chain conditioned on where the last delivery ended.
///
/// Transient states, in order: just delivered; no update at the next slot of
/// the same kind; no update at the other slot; update at the same-kind slot;
/// update at the other slot. Steps are half-frames.
pub fn noma_rt_interdelivery_chain(
    cfg: &SystemConfig,
    p_primary: f64,
    p_secondary: f64,
    after: DeliverySlot,
) -> Result<AbsorbingChain> {
    let u = cfg.arrival_rate * cfg.frame_length() / 2.0;
    let (x, o) = ((-u).exp(), one_minus_exp_neg(u));
    // `same` is the success probability in the slot kind just used, `other` in the next one.
    let (same, other) = match after {
        DeliverySlot::Own => (p_primary, p_secondary),
        DeliverySlot::Partner => (p_secondary, p_primary),
    };
    let q = Matrix::from_rows(&[
        [0.0, 0.0, x, 0.0, o],
        [0.0, 0.0, x, 0.0, o],
        [0.0, x, 0.0, o, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0 - same],
        [0.0, 0.0, 0.0, 1.0 - other, 0.0],
    ])?;
    AbsorbingChain::with_absorption_column(q, &[0.0, 0.0, 0.0, same, other])
}

/// `(E{D|Q}, E{D²|Q})` for NOMA-RT via the fundamental matrix.
pub fn noma_rt_chain_moments(
    cfg: &SystemConfig,
    p_primary: f64,
    p_secondary: f64,
    after: DeliverySlot,
) -> Result<(f64, f64)> {
    let chain = noma_rt_interdelivery_chain(cfg, p_primary, p_secondary, after)?;
    let stats = absorption_stats(&chain)?;
    Ok(interdelivery_moments(&stats, 0, cfg.frame_length() / 2.0))
}

/// Six-state chain of receiver-side outcomes at the end of slots `m` and `m'`.
///
/// States 1–3: at slot `m` the update was delivered / nothing to send /
/// sending failed; states 4–6: the same at slot `m'`.
pub fn noma_rt_slot_chain(
    cfg: &SystemConfig,
    p_primary: f64,
    p_secondary: f64,
) -> Result<StochasticMatrix> {
    let u = cfg.arrival_rate * cfg.frame_length() / 2.0;
    let (x, o) = ((-u).exp(), one_minus_exp_neg(u));
    let (pm, ps) = (p_primary, p_secondary);
    StochasticMatrix::from_rows(&[
        [0.0, 0.0, 0.0, o * ps, x, o * (1.0 - ps)],
        [0.0, 0.0, 0.0, o * ps, x, o * (1.0 - ps)],
        [0.0, 0.0, 0.0, ps, 0.0, 1.0 - ps],
        [o * pm, x, o * (1.0 - pm), 0.0, 0.0, 0.0],
        [o * pm, x, o * (1.0 - pm), 0.0, 0.0, 0.0],
        [pm, 0.0, 1.0 - pm, 0.0, 0.0, 0.0],
    ])
}

/// Frame-to-frame chain of a user's transmit indicator in its own slot.
///
/// State 0: nothing to send in the own slot, state 1: sending. `x` is the
/// probability of no arrival in half a frame; `p_own` and `p_shared` are the
/// user's success probabilities in its own and in the partner's slot.
pub fn delta_chain(x: f64, o: f64, p_own: f64, p_shared: f64) -> Result<StochasticMatrix> {
    let (x2, o2) = (x * x, o * (1.0 + x));
    let a = -o * x;
    let b = (1.0 - p_own * x) * x;
    let p00 = o * x * p_shared + x2;
    let p01 = a * p_shared + o2;
    let p10 = b * p_shared + p_own * x2;
    let p11 = (1.0 - p_own) * (1.0 - x * p_shared) + p_own * (x * (x - 1.0) * p_shared + o2);
    StochasticMatrix::from_rows(&[[p00, p01], [p10, p11]])
}
