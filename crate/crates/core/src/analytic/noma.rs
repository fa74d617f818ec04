use crate::analytic::{noma_rt_secondary_success, truncated_wait_plus_slot, AoiBreakdown};
use crate::error::Result;
use crate::model::{one_minus_exp_neg, LinkStats, SchemeKind, SystemConfig};

/// `P_mm'` without retransmission: the partner occupies its own slot with
/// probability `1 − e^(−λ_m'·MT/2)`, in which case `m` sees interference.
pub fn noma_nrt_secondary_success(cfg: &SystemConfig) -> Result<f64> {
    let link = LinkStats::orthogonal(cfg)?;
    let u = cfg.partner_arrival_rate * cfg.frame_length() / 2.0;
    let (lo, hi) = (link.theta, link.secondary_clear);
    Ok((lo + (-u).exp() * (hi - lo)).min(hi))
}

/// NOMA without retransmission.
///
/// User `m` gets a delivery opportunity every half frame, alternately as
/// primary (success `p₁`) and as secondary (success `p₂`).
pub fn noma_nrt_aoi(cfg: &SystemConfig) -> Result<AoiBreakdown> {
    let mut link = LinkStats::orthogonal(cfg)?;
    let p_mmp = noma_nrt_secondary_success(cfg)?;
    link.p_secondary_m = Some(p_mmp);
    link.p_secondary_partner = Some(noma_nrt_secondary_success(&cfg.mirrored())?);

    let lambda = cfg.arrival_rate;
    let mt = cfg.frame_length();
    let busy = one_minus_exp_neg(lambda * mt / 2.0);
    let p1 = busy * link.p_primary;
    let p2 = busy * p_mmp;
    if lambda == 0.0 || p1 + p2 == 0.0 {
        return Ok(AoiBreakdown::infinite(SchemeKind::NomaNrt, link));
    }
    let p0 = (1.0 - p1) * (1.0 - p2);
    let q = p1 + p2 - p1 * p2; // 1 − p₀

    let omega = truncated_wait_plus_slot(lambda, mt / 2.0, cfg.slot_duration);
    let a = p1 * p2 * (p0 * p0 + 6.0 * p0 + 1.0);
    let b = 2.0 * (1.0 + p0) * (p1 * p1 * (1.0 - p2) + p2 * p2 * (1.0 - p1));
    let g = p1 * p2 * (1.0 + p0 - p1 - p2) + p1 * p1 + p2 * p2;
    let c = g * q;

    // A, B and g are quadratic in the success probabilities and C = (1 − p₀)³,
    // so work with p/s, s = p₁ + p₂, to keep tiny probabilities from underflowing.
    let s = p1 + p2;
    let (r1, r2) = (p1 / s, p2 / s);
    let a_s = r1 * r2 * (p0 * p0 + 6.0 * p0 + 1.0);
    let b_s = 2.0 * (1.0 + p0) * (r1 * r1 * (1.0 - p2) + r2 * r2 * (1.0 - p1));
    let g_s = r1 * r2 * (1.0 + p0 - p1 - p2) + r1 * r1 + r2 * r2;
    let q_s = q / s;
    let ab_q3 = (a_s + b_s) / (s * q_s * q_s * q_s);

    let mean_d = mt * g_s / (s * q_s * q_s);
    let mean_d2 = mt * mt * ab_q3 / (2.0 * s);
    Ok(AoiBreakdown {
        scheme: SchemeKind::NomaNrt,
        avg_aoi: omega + mt * ab_q3 / 4.0,
        mean_system_time: omega,
        mean_interdelivery: mean_d,
        mean_sq_interdelivery: mean_d2,
        mean_cross: omega * mean_d,
        link,
        intermediates: Default::default(),
    }
    .with(&[
        ("Omega_bar", omega),
        ("p0", p0),
        ("p1", p1),
        ("p2", p2),
        ("A", a),
        ("B", b),
        ("C", c),
    ]))
}

/// NOMA with retransmission.
///
/// Averages over the slot in which the previous delivery completed: weight
/// `γ₁` for the own slot and `γ₄` for the partner's slot, both from the
/// six-state chain in [`super::chains::noma_rt_slot_chain`].
pub fn noma_rt_aoi(cfg: &SystemConfig) -> Result<AoiBreakdown> {
    let mut link = LinkStats::orthogonal(cfg)?;
    let lambda = cfg.arrival_rate;
    if lambda == 0.0 || link.p_primary == 0.0 {
        return Ok(AoiBreakdown::infinite(SchemeKind::NomaRt, link));
    }
    let sol = noma_rt_secondary_success(cfg)?;
    link.p_secondary_m = Some(sol.p_secondary_m);
    link.p_secondary_partner = Some(sol.p_secondary_partner);

    let mt = cfg.frame_length();
    let u = lambda * mt / 2.0;
    let x = (-u).exp();
    let ox = one_minus_exp_neg(u);
    let e = x * x;
    let oe = ox * (1.0 + x);
    let pmm = link.p_primary;
    let pmp = sol.p_secondary_m;
    let pm0 = (1.0 - pmm) * (1.0 - pmp);
    let om0 = pmm + pmp - pmm * pmp;

    let omega = truncated_wait_plus_slot(lambda, mt / 2.0, cfg.slot_duration);
    let gamma_den = 2.0 * (1.0 - e * pm0);
    let gamma1 = pmm * ox * (1.0 + x - x * pmp) / gamma_den;
    let gamma4 = pmp * ox * (1.0 + x - x * pmm) / gamma_den;

    let y = |b: f64| {
        mt * (x * (1.0 + pm0 * e) * (1.0 - b) + 2.0 * pm0 * e)
            / (2.0 * (1.0 - pm0 * e) * (1.0 + (1.0 - b) * x))
    };
    // x/(1 − x) = 1/(e^u − 1)
    let w = |a: f64, b: f64| {
        mt / 2.0 * ((2.0 * (1.0 + x) - b - x * a) / (om0 * (1.0 + x)) + 1.0 / u.exp_m1())
    };
    let consts = |pa: f64, pb: f64| {
        let k_l = pb * (pa * pa * pb + pa * pa - 5.0 * pa * pb + 4.0 * pb);
        let k_s = pb * (pa * pa * pb - pa * pa - 3.0 * pa * pb + 4.0 * pb);
        let k_r = 2.0 * pa * pa * pb * pb - 7.0 * pa * pa * pb
            + 4.0 * pa * pa
            + pa * pb * pb
            + 6.0 * pa * pb
            - 4.0 * pb * pb;
        let sq = pb + x * (pm0 + pa - pb - 1.0) + e * (pm0 - pa + 1.0) - 2.0;
        let k_t = 4.0 * pm0 * oe * oe + sq * sq + pa * pb * (1.0 - pb + e * e * (1.0 - pa));
        (k_l, k_r, k_s, k_t)
    };
    let d2 = |(k_l, k_r, k_s, k_t): (f64, f64, f64, f64)| {
        mt * mt / 4.0 * (x * e * k_l + e * k_r + x * k_s + k_t) / (oe * oe * om0 * om0)
    };

    let (y_m, y_p) = (y(pmp), y(pmm));
    let (w_m, w_p) = (w(pmm, pmp), w(pmp, pmm));
    let k = consts(pmm, pmp);
    let k_p = consts(pmp, pmm);
    let (d2_m, d2_p) = (d2(k), d2(k_p));

    let g = gamma1 + gamma4;
    let h = (gamma1 * d2_m + gamma4 * d2_p) / g;
    let weighted_w = gamma1 * w_m + gamma4 * w_p;
    let cross_sum = gamma1 * (omega + y_m) * w_m + gamma4 * (omega + y_p) * w_p;
    let avg = cross_sum / weighted_w + h * g / (2.0 * weighted_w);

    let c = sol.coefficients;
    Ok(AoiBreakdown {
        scheme: SchemeKind::NomaRt,
        avg_aoi: avg,
        mean_system_time: (gamma1 * (omega + y_m) + gamma4 * (omega + y_p)) / g,
        mean_interdelivery: weighted_w / g,
        mean_sq_interdelivery: h,
        mean_cross: cross_sum / g,
        link,
        intermediates: Default::default(),
    }
    .with(&[
        ("Omega_bar", omega),
        ("P_m0", pm0),
        ("gamma1", gamma1),
        ("gamma4", gamma4),
        ("Y", y_m),
        ("Y'", y_p),
        ("W", w_m),
        ("W'", w_p),
        ("H", h),
        ("D2", d2_m),
        ("D2'", d2_p),
        ("K_L", k.0),
        ("K_R", k.1),
        ("K_S", k.2),
        ("K_T", k.3),
        ("K_L'", k_p.0),
        ("K_R'", k_p.1),
        ("K_S'", k_p.2),
        ("K_T'", k_p.3),
        ("a_hat", c.a_hat),
        ("b_hat", c.b_hat),
        ("c_hat", c.c_hat),
        ("a1", c.a1),
        ("b1", c.b1),
        ("a2", c.a2),
        ("b2", c.b2),
        ("c1", c.c1),
        ("c2", c.c2),
        ("d1", c.d1),
        ("d2", c.d2),
    ]))
}
