//! Steady-state secondary success probability under NOMA-RT.
//!
//! With retransmission, whether a user occupies its own slot depends on how
//! its earlier secondary attempts went, which in turn depends on whether its
//! partner occupied *its* slot. The two transmit-indicator chains are
//! therefore coupled through `P_mm'` and `P_m'm`; eliminating one of them
//! leaves a quadratic in `P_mm'`.

use serde::Serialize;

use crate::analytic::chains::delta_chain;
use crate::error::{Error, Result};
use crate::markov::{quadratic_real_roots, stationary_distribution};
use crate::model::{
    interfered_secondary_success, one_minus_exp_neg, primary_success_prob, SystemConfig,
};

/// Fixed-point residual a root must meet to be accepted.
pub const FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaCoefficients {
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

impl LemmaCoefficients {
    pub fn residual(&self, p: f64) -> f64 {
        self.a_hat * p * p + self.b_hat * p + self.c_hat
    }
}

/// Solution of the coupled system plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondarySuccess {
    /// `P_mm'`.
    pub p_secondary_m: f64,
    /// `P_m'm`.
    pub p_secondary_partner: f64,
    /// Stationary law `[θ̂₀, θ̂₁]` of the partner's own-slot transmit indicator.
    pub partner_delta: [f64; 2],
    /// Stationary law `[θ̃₀, θ̃₁]` of user `m`'s own-slot transmit indicator.
    pub own_delta: [f64; 2],
    pub coefficients: LemmaCoefficients,
    /// All real roots of the quadratic.
    pub roots: Vec<f64>,
    /// Second admissible fixed point, if one existed and was not selected.
    pub rejected_root: Option<f64>,
    /// `|F(P_mm') − P_mm'|` for the coupled map `F`.
    pub residual: f64,
}

struct Link {
    p_primary: f64,
    theta: f64,
    clear: f64,
    x_m: f64,
    o_m: f64,
    x_p: f64,
    o_p: f64,
}

impl Link {
    fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let eps = cfg.epsilon()?;
        let half = cfg.frame_length() / 2.0;
        Ok(Link {
            p_primary: primary_success_prob(cfg.primary_power, eps)?,
            theta: interfered_secondary_success(cfg.primary_power, cfg.secondary_power, eps)?,
            clear: primary_success_prob(cfg.secondary_power, eps)?,
            x_m: (-cfg.arrival_rate * half).exp(),
            o_m: one_minus_exp_neg(cfg.arrival_rate * half),
            x_p: (-cfg.partner_arrival_rate * half).exp(),
            o_p: one_minus_exp_neg(cfg.partner_arrival_rate * half),
        })
    }

    fn mix(&self, busy: f64) -> f64 {
        busy * self.theta + (1.0 - busy) * self.clear
    }

    /// Returns `(F(p), P_m'm, θ̃, θ̂)` for a trial `P_mm' = p`.
    fn step(&self, p_mmp: f64) -> Result<(f64, f64, [f64; 2], [f64; 2])> {
        let own =
            stationary_distribution(&delta_chain(self.x_m, self.o_m, self.p_primary, p_mmp)?)?;
        let p_pm = self.mix(own[1]);
        let partner =
            stationary_distribution(&delta_chain(self.x_p, self.o_p, self.p_primary, p_pm)?)?;
        Ok((
            self.mix(partner[1]),
            p_pm,
            [own[0], own[1]],
            [partner[0], partner[1]],
        ))
    }

    fn coefficients(&self) -> LemmaCoefficients {
        let (pmm, ppp) = (self.p_primary, self.p_primary);
        let (th, es) = (self.theta, self.clear);
        let (xm, xp) = (self.x_m, self.x_p);
        let (em, ep) = (xm * xm, xp * xp);
        // 1 − e^(−λMT) = (1 − x)(1 + x)
        let (om, op) = (self.o_m * (1.0 + xm), self.o_p * (1.0 + xp));

        let a1 = -self.o_p * xp;
        let b1 = (1.0 - ppp * xp) * xp;
        let a2 = -self.o_m * xm;
        let b2 = (1.0 - pmm * xm) * xm;
        let c1 = a1 + b1;
        let c2 = a2 + b2;
        let d1 = op + ep * ppp;
        let d2 = om + em * pmm;

        let a_hat = (a2 * th + b2 * es) * c1 + c2 * d1;
        let b_hat = (c1 * pmm * em - c2 * ppp * ep) * es
            + (c1 * om - c2 * op - (a2 * b1 + a1 * b2) * es) * th
            - a1 * a2 * th * th
            - b1 * b2 * es * es
            + d1 * d2;
        let c_hat =
            -d2 * (op * th + ppp * ep * es) - (a1 * th + b1 * es) * (om * th + pmm * em * es);
        LemmaCoefficients {
            a_hat,
            b_hat,
            c_hat,
            a1,
            b1,
            a2,
            b2,
            c1,
            c2,
            d1,
            d2,
        }
    }
}

/// One pass of the coupled system: `P_mm' → θ̃ → P_m'm → θ̂ → P_mm'`.
///
/// Returns the updated `P_mm'`; its fixed points are the admissible solutions.
pub fn coupled_secondary_map(cfg: &SystemConfig, p_mmp: f64) -> Result<f64> {
    Ok(Link::new(cfg)?.step(p_mmp)?.0)
}

/// Solves the coupled indicator chains for `P_mm'` (and `P_m'm`).
///
/// Both quadratic roots are filtered to `[Θ, e^(−ε/Ps)]` and validated as fixed
/// points of [`coupled_secondary_map`]. If two survive, the one reached by
/// damped iteration from `e^(−ε/Ps)` is selected, unless both are attracting,
/// which is reported as [`Error::AmbiguousRoot`].
pub fn noma_rt_secondary_success(cfg: &SystemConfig) -> Result<SecondarySuccess> {
    let link = Link::new(cfg)?;
    let coefficients = link.coefficients();
    let (lo, hi) = (link.theta, link.clear);

    let (roots, candidates) = if hi - lo <= f64::EPSILON * hi {
        // ε = 0 (or Θ indistinguishable from e^(−ε/Ps)): the mixture is constant.
        (vec![hi], vec![hi])
    } else {
        let roots =
            quadratic_real_roots(coefficients.a_hat, coefficients.b_hat, coefficients.c_hat)
                .map_err(|_| {
                    Error::ModelInconsistency("secondary-success quadratic is degenerate".into())
                })?;
        let slack = 1e-9 * hi;
        let candidates = roots
            .iter()
            .filter(|&&r| r >= lo - slack && r <= hi + slack)
            .map(|&r| r.clamp(lo, hi))
            .collect();
        (roots, candidates)
    };

    let mut fixed = Vec::new();
    for r in candidates {
        let (next, ..) = link.step(r)?;
        if (next - r).abs() <= FIXED_POINT_TOL {
            fixed.push(r);
        }
    }

    let (chosen, rejected) = match fixed.as_slice() {
        [] => {
            return Err(Error::ModelInconsistency(format!(
                "no root of the secondary-success quadratic in [{lo}, {hi}] is a fixed point (roots {roots:?})"
            )))
        }
        [r] => (*r, None),
        [r1, r2, ..] => {
            let stable = |r: f64| -> Result<bool> {
                let h = 1e-7 * hi;
                let up = link.step((r + h).min(hi))?.0;
                let down = link.step((r - h).max(lo))?.0;
                Ok(((up - down) / ((r + h).min(hi) - (r - h).max(lo))).abs() < 1.0)
            };
            if stable(*r1)? && stable(*r2)? {
                return Err(Error::AmbiguousRoot { roots: [*r1, *r2] });
            }
            let limit = damped_iteration(&link, hi)?;
            if (limit - r1).abs() <= (limit - r2).abs() {
                (*r1, Some(*r2))
            } else {
                (*r2, Some(*r1))
            }
        }
    };

    let (next, p_pm, own, partner) = link.step(chosen)?;
    Ok(SecondarySuccess {
        p_secondary_m: chosen,
        p_secondary_partner: p_pm,
        partner_delta: partner,
        own_delta: own,
        coefficients,
        roots,
        rejected_root: rejected,
        residual: (next - chosen).abs(),
    })
}

fn damped_iteration(link: &Link, start: f64) -> Result<f64> {
    let mut p = start;
    for _ in 0..10_000 {
        let next = 0.5 * p + 0.5 * link.step(p)?.0;
        if (next - p).abs() < 1e-14 {
            return Ok(next);
        }
        p = next;
    }
    Ok(p)
}
