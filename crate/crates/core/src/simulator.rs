//! Frame generation, the iterative SIC + capture decoder, and Monte-Carlo
//! throughput estimation.
//!
//! Trials are embarrassingly parallel; every trial derives its own RNG
//! stream from (seed, trial_index), so estimates are bit-identical for a
//! fixed seed at any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::pathloss::{self, PathLossConfig};

/// Relative slack applied to the SIR threshold test so exact ties at the
/// threshold (P = β·I with exact power ratios) decode.
const SIR_TIE_TOL: f64 = 1e-12;

/// One packet replica: owning user, slot, and power as seen by the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replica {
    pub user: u32,
    pub slot: u32,
    pub power: f64,
}

/// A realized bipartite user/slot graph with per-replica received powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub num_slots: usize,
    pub replicas: Vec<Replica>,
    pub user_degrees: Vec<u32>,
}

impl Frame {
    pub fn num_users(&self) -> usize {
        self.user_degrees.len()
    }
}

/// Outcome of the SIC decoder on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Users decoded by the fixpoint, sorted.
    pub decoded_users: Vec<u32>,
    /// Number of productive iterations.
    pub iterations: usize,
    /// Users decoded in each productive iteration; sums to
    /// `decoded_users.len()`.
    pub per_iteration_decodes: Vec<usize>,
}

/// Monte-Carlo throughput/packet-loss estimate over independent frames.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    /// Mean decoded packets per slot.
    pub mean_throughput: f64,
    /// Standard error of the mean throughput.
    pub std_error: f64,
    /// Mean fraction of users left undecoded.
    pub mean_packet_loss: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Channel applied to generated frames.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    /// Received power equals transmitted power.
    Ideal,
    /// Received power follows the distance power law; every user gets one
    /// random position, shared by all its replicas.
    PathLoss(PathLossConfig),
}

pub(crate) fn sample_distinct_slots<R: Rng + ?Sized>(
    rng: &mut R,
    degree: u32,
    slots: usize,
    out: &mut Vec<u32>,
) -> Result<()> {
    out.clear();
    let l = degree as usize;
    if l > slots {
        return Err(Error::DegreeExceedsSlots {
            degree,
            slots,
        });
    }
    if l * 3 <= slots {
        // rejection sampling; degrees are tiny compared to the frame
        while out.len() < l {
            let s = rng.gen_range(0..slots) as u32;
            if !out.contains(&s) {
                out.push(s);
            }
        }
    } else {
        // partial Fisher-Yates when the degree is a large fraction of M
        let mut idx: Vec<u32> = (0..slots as u32).collect();
        for i in 0..l {
            let j = rng.gen_range(i..slots);
            idx.swap(i, j);
            out.push(idx[i]);
        }
    }
    Ok(())
}

/// Generate one random frame under the ideal channel: each of the
/// N = round(g·M) users draws a degree from Λ, places its replicas in that
/// many distinct slots, and draws an independent power level from Δ for
/// each replica (or one per user when `power_per_user` is set).
pub fn generate_frame<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Frame> {
    let n = cfg.num_users();
    let mut replicas = Vec::new();
    let mut user_degrees = Vec::with_capacity(n);
    let mut slots_buf = Vec::new();
    for user in 0..n {
        let degree = cfg.repetition.sample(rng);
        sample_distinct_slots(rng, degree, cfg.slots, &mut slots_buf)?;
        let user_power = if cfg.power_per_user {
            Some(cfg.power.sample(rng))
        } else {
            None
        };
        for &slot in &slots_buf {
            let power = user_power.unwrap_or_else(|| cfg.power.sample(rng));
            replicas.push(Replica {
                user: user as u32,
                slot,
                power,
            });
        }
        user_degrees.push(degree);
    }
    Ok(Frame {
        num_slots: cfg.slots,
        replicas,
        user_degrees,
    })
}

/// Iterative SIC decoding with capture.
///
/// Each iteration tests every replica of every still-undecoded user against
/// the interference from the other undecoded replicas in its slot, using the
/// start-of-iteration state; a replica with no interferers decodes
/// unconditionally (the model is noise free). All replicas of newly decoded
/// users are cancelled at the iteration boundary. Stops when an iteration
/// decodes nothing.
pub fn sic_decode(frame: &Frame, beta: f64) -> DecodeResult {
    let n = frame.num_users();
    let mut slot_replicas: Vec<Vec<(u32, f64)>> = vec![Vec::new(); frame.num_slots];
    for r in &frame.replicas {
        slot_replicas[r.slot as usize].push((r.user, r.power));
    }

    let mut decoded = vec![false; n];
    let mut newly = vec![false; n];
    let mut per_iteration = Vec::new();
    let mut total_decoded = 0usize;

    loop {
        let mut count = 0usize;
        for reps in &slot_replicas {
            let mut residual = 0.0;
            let mut live = 0usize;
            for &(u, p) in reps {
                if !decoded[u as usize] {
                    residual += p;
                    live += 1;
                }
            }
            if live == 0 {
                continue;
            }
            #[cfg(debug_assertions)]
            let mut captures_with_interference = 0usize;
            for &(u, p) in reps {
                if decoded[u as usize] {
                    continue;
                }
                let interference = residual - p;
                let captured = if live == 1 || interference <= 0.0 {
                    true
                } else {
                    p >= beta * interference * (1.0 - SIR_TIE_TOL)
                };
                if captured {
                    #[cfg(debug_assertions)]
                    if live > 1 {
                        captures_with_interference += 1;
                        // beta > 1 admits at most one SIR capture per slot
                        debug_assert!(captures_with_interference <= 1);
                    }
                    if !newly[u as usize] {
                        newly[u as usize] = true;
                        count += 1;
                    }
                }
            }
        }
        if count == 0 {
            break;
        }
        for (d, n) in decoded.iter_mut().zip(newly.iter()) {
            *d |= *n;
        }
        total_decoded += count;
        per_iteration.push(count);
        debug_assert!(per_iteration.len() <= n + 1);
    }

    let decoded_users: Vec<u32> = (0..n as u32).filter(|&u| decoded[u as usize]).collect();
    debug_assert_eq!(decoded_users.len(), total_decoded);
    DecodeResult {
        decoded_users,
        iterations: per_iteration.len(),
        per_iteration_decodes: per_iteration,
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    // splitmix64 over (seed, trial) so trial streams are independent of
    // worker scheduling
    let mut z = seed ^ trial.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Run `trials` independent frames and estimate throughput and packet loss.
///
/// Deterministic for a fixed seed regardless of the rayon worker count.
pub fn monte_carlo(
    cfg: &SystemConfig,
    trials: usize,
    seed: u64,
    channel: &Channel,
) -> Result<MonteCarloEstimate> {
    if trials < 1 {
        return Err(Error::NoTrials);
    }
    let n = cfg.num_users();
    let per_trial: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let frame = match channel {
                Channel::Ideal => generate_frame(cfg, &mut rng)?,
                Channel::PathLoss(p) => pathloss::pathloss_frame(cfg, p, &mut rng)?,
            };
            let result = sic_decode(&frame, cfg.power.beta());
            let decoded = result.decoded_users.len();
            let throughput = decoded as f64 / cfg.slots as f64;
            let loss = if n == 0 {
                0.0
            } else {
                1.0 - decoded as f64 / n as f64
            };
            Ok((throughput, loss))
        })
        .collect::<Result<_>>()?;

    let t_mean = per_trial.iter().map(|x| x.0).sum::<f64>() / trials as f64;
    let loss_mean = per_trial.iter().map(|x| x.1).sum::<f64>() / trials as f64;
    let std_error = if trials > 1 {
        let var = per_trial
            .iter()
            .map(|x| (x.0 - t_mean).powi(2))
            .sum::<f64>()
            / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean_throughput: t_mean,
        std_error,
        mean_packet_loss: loss_mean,
        trials,
        seed,
    })
}

/// One coupled instantiation for the power-gap monotonicity property:
/// degrees, slot choices, and high/low labels are drawn once, then realized
/// twice with level gaps k1·β and k2·β and decoded independently. For
/// k1 >= k2 the first count never falls below the second.
pub fn coupled_monotonicity_trial(
    cfg_template: &SystemConfig,
    k1: u32,
    k2: u32,
    seed: u64,
) -> Result<(usize, usize)> {
    let mut rng = trial_rng(seed, 0);
    let beta = cfg_template.power.beta();
    let delta = cfg_template.power.probs()[0];
    let n = cfg_template.num_users();

    let mut skeleton: Vec<(u32, u32, bool)> = Vec::new(); // (user, slot, is_high)
    let mut user_degrees = Vec::with_capacity(n);
    let mut slots_buf = Vec::new();
    for user in 0..n {
        let degree = cfg_template.repetition.sample(&mut rng);
        sample_distinct_slots(&mut rng, degree, cfg_template.slots, &mut slots_buf)?;
        for &slot in &slots_buf {
            let high = rng.gen::<f64>() < delta;
            skeleton.push((user as u32, slot, high));
        }
        user_degrees.push(degree);
    }

    let realize = |k: u32| -> Frame {
        let high_power = k as f64 * beta;
        Frame {
            num_slots: cfg_template.slots,
            replicas: skeleton
                .iter()
                .map(|&(user, slot, high)| Replica {
                    user,
                    slot,
                    power: if high { high_power } else { 1.0 },
                })
                .collect(),
            user_degrees: user_degrees.clone(),
        }
    };

    let count1 = sic_decode(&realize(k1), beta).decoded_users.len();
    let count2 = sic_decode(&realize(k2), beta).decoded_users.len();
    Ok((count1, count2))
}
