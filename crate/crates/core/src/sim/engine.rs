use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChannelGain, SchemeKind, SystemConfig};
use crate::sim::aoi::AgeIntegrator;
use crate::sim::{SimResult, SuccessCount, UserStats, BATCHES, RNG_ALGORITHM};

/// Stream purposes; stream id is `2·user + purpose`.
const ARRIVALS: u64 = 0;
const CHANNEL: u64 = 1;

pub(crate) fn stream(seed: u64, user: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * user as u64 + purpose);
    rng
}

/// Warmup used when none is given: 1% of the run, at least 100 frames, never
/// more than half of it.
pub fn default_warmup(frames: u64) -> u64 {
    (frames / 100).max(100).min(frames / 2)
}

/// A delivery instant and the generation time of the delivered update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delivery {
    pub time: f64,
    pub generation: f64,
}

/// Delivery history of both users, for checking the integrator offline.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimTrace {
    pub deliveries: [Vec<Delivery>; 2],
    /// Start of the measured horizon.
    pub measure_from: f64,
    pub measure_to: f64,
}

struct User {
    arrivals: ChaCha8Rng,
    channel: ChaCha8Rng,
    rate: f64,
    next_arrival: f64,
    buffer: Option<f64>,
    age: AgeIntegrator,
    batch_area_start: f64,
    last_delivery: Option<(f64, f64)>,
    stats: UserStats,
}

impl User {
    fn new(seed: u64, index: usize, rate: f64) -> Self {
        let mut arrivals = stream(seed, index, ARRIVALS);
        let next_arrival = if rate > 0.0 {
            let e: f64 = Exp1.sample(&mut arrivals);
            e / rate
        } else {
            f64::INFINITY
        };
        User {
            arrivals,
            channel: stream(seed, index, CHANNEL),
            rate,
            next_arrival,
            buffer: None,
            age: AgeIntegrator::new(),
            batch_area_start: 0.0,
            last_delivery: None,
            stats: UserStats::default(),
        }
    }

    /// Moves every arrival at or before `t` into the buffer (newest wins).
    /// Returns whether anything arrived.
    fn arrivals_until(&mut self, t: f64, measuring: bool) -> bool {
        let mut any = false;
        while self.next_arrival <= t {
            self.buffer = Some(self.next_arrival);
            let e: f64 = Exp1.sample(&mut self.arrivals);
            self.next_arrival += e / self.rate;
            any = true;
            if measuring {
                self.stats.arrivals += 1;
            }
        }
        any
    }

    fn deliver(
        &mut self,
        t: f64,
        generation: f64,
        measuring: bool,
        trace: Option<&mut Vec<Delivery>>,
    ) {
        self.age.deliver(t, generation);
        let system_time = t - generation;
        if measuring {
            let s = &mut self.stats;
            s.deliveries += 1;
            s.sum_system_time += system_time;
            if let Some((prev_t, prev_s)) = self.last_delivery {
                let d = t - prev_t;
                s.interdeliveries += 1;
                s.sum_interdelivery += d;
                s.sum_sq_interdelivery += d * d;
                s.sum_cross += d * prev_s;
            }
        }
        self.last_delivery = Some((t, system_time));
        if let Some(trace) = trace {
            trace.push(Delivery {
                time: t,
                generation,
            });
        }
    }

    fn close_batch(&mut self, t: f64, started: f64) {
        self.age.advance_to(t);
        let area = self.age.area() - self.batch_area_start;
        self.stats.batch_means.push(area / (t - started));
        self.batch_area_start = self.age.area();
    }
}

/// Slot-level simulation of one pair: user 0 (`m`) owns the slot starting at
/// `i·MT`, user 1 (`m'`) the slot starting at `i·MT + MT/2`.
///
/// The remaining slots of the frame belong to other pairs and are idle time
/// here. The time average covers frames `warmup_frames..frames`.
pub fn simulate(
    cfg: &SystemConfig,
    scheme: SchemeKind,
    frames: u64,
    seed: u64,
    warmup_frames: u64,
) -> Result<SimResult> {
    run(cfg, scheme, frames, seed, warmup_frames, None)
}

/// [`simulate`] plus the full delivery history.
pub fn simulate_traced(
    cfg: &SystemConfig,
    scheme: SchemeKind,
    frames: u64,
    seed: u64,
    warmup_frames: u64,
) -> Result<(SimResult, SimTrace)> {
    let mut trace = SimTrace::default();
    let result = run(cfg, scheme, frames, seed, warmup_frames, Some(&mut trace))?;
    Ok((result, trace))
}

fn run(
    cfg: &SystemConfig,
    scheme: SchemeKind,
    frames: u64,
    seed: u64,
    warmup_frames: u64,
    mut trace: Option<&mut SimTrace>,
) -> Result<SimResult> {
    cfg.validate()?;
    if frames == 0 {
        return Err(Error::param("frames", "must be at least 1"));
    }
    if warmup_frames >= frames {
        return Err(Error::param(
            "warmup_frames",
            format!("must be below frames ({frames}), got {warmup_frames}"),
        ));
    }
    let eps = cfg.epsilon()?.value();
    let (p, ps) = (cfg.primary_power, cfg.secondary_power);
    let frame = cfg.frame_length();
    let slot = cfg.slot_duration;
    let (noma, rt) = (scheme.is_noma(), scheme.retransmits());

    let mut users = [
        User::new(seed, 0, cfg.arrival_rate),
        User::new(seed, 1, cfg.partner_arrival_rate),
    ];

    let measured = frames - warmup_frames;
    let batches = BATCHES.min(measured);
    let boundary = |b: u64| warmup_frames + b * measured / batches;
    let mut next_batch = 1;
    let mut batch_start = warmup_frames as f64 * frame;

    for i in 0..frames {
        let t_frame = i as f64 * frame;
        if i == warmup_frames {
            for u in &mut users {
                u.age.advance_to(t_frame);
                u.age.reset_area();
            }
            if let Some(tr) = trace.as_deref_mut() {
                tr.measure_from = t_frame;
            }
        } else if i > warmup_frames && i == boundary(next_batch) {
            for u in &mut users {
                u.close_batch(t_frame, batch_start);
            }
            batch_start = t_frame;
            next_batch += 1;
        }
        let measuring = i >= warmup_frames;

        for owner in 0..2 {
            let t0 = t_frame + owner as f64 * frame / 2.0;
            let t1 = t0 + slot;
            let mut sending = [None, None];
            for (k, u) in users.iter_mut().enumerate() {
                u.arrivals_until(t0, measuring);
                if k == owner || noma {
                    sending[k] = u.buffer.take();
                }
            }
            // Both gains are drawn every slot so channel paths do not depend on the scheme.
            let gains = [
                ChannelGain::sample(&mut users[0].channel),
                ChannelGain::sample(&mut users[1].channel),
            ];
            let other = 1 - owner;
            let primary_active = sending[owner].is_some();
            let mut success = [false, false];
            success[owner] = primary_active && p * gains[owner].value() >= eps;
            if sending[other].is_some() {
                let interference = if primary_active {
                    p * gains[owner].value()
                } else {
                    0.0
                };
                success[other] = ps * gains[other].value() >= eps * (interference + 1.0);
            }

            for (k, u) in users.iter_mut().enumerate() {
                let arrived = u.arrivals_until(t1, measuring);
                let Some(generation) = sending[k] else {
                    continue;
                };
                if measuring {
                    let count = if k == owner {
                        &mut u.stats.primary
                    } else {
                        &mut u.stats.secondary
                    };
                    count.record(success[k]);
                }
                if success[k] {
                    let tr = trace.as_deref_mut().map(|tr| &mut tr.deliveries[k]);
                    u.deliver(t1, generation, measuring, tr);
                } else if rt && !arrived {
                    u.buffer = Some(generation);
                }
            }
        }
    }

    let end = frames as f64 * frame;
    for u in &mut users {
        u.close_batch(end, batch_start);
    }
    if let Some(tr) = trace {
        tr.measure_to = end;
    }
    let horizon = end - warmup_frames as f64 * frame;
    let [u0, u1] = users.map(|mut u| {
        u.stats.avg_aoi = u.age.area() / horizon;
        u.stats
    });
    Ok(SimResult {
        scheme,
        config: *cfg,
        frames,
        warmup_frames,
        seed,
        rng: RNG_ALGORITHM,
        horizon,
        users: [u0, u1],
    })
}

impl SuccessCount {
    pub(crate) fn record(&mut self, success: bool) {
        self.attempts += 1;
        self.successes += u64::from(success);
    }
}
