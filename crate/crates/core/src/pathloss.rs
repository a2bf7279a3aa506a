//! Path-loss channel: the received-power law, the discretization that maps a
//! single-power path-loss system onto an equivalent n-level ideal-channel
//! system, and frame generation with spatially distributed users.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PowerModel, RepetitionDistribution, SystemConfig};
use crate::simulator::{sample_distinct_slots, Frame, Replica};

/// Radial placement law for users around the receiver; the angle is always
/// uniform and irrelevant to received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialDistribution {
    /// Radius uniform on [0, d_max]. Not uniform over the disk area.
    UniformRadius,
    /// Uniform over the disk area: cdf (r/d_max)^2.
    UniformDisk,
}

impl RadialDistribution {
    pub fn cdf(&self, r: f64, d_max: f64) -> f64 {
        let x = (r / d_max).clamp(0.0, 1.0);
        match self {
            RadialDistribution::UniformRadius => x,
            RadialDistribution::UniformDisk => x * x,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, d_max: f64) -> f64 {
        let u: f64 = rng.gen();
        match self {
            RadialDistribution::UniformRadius => u * d_max,
            RadialDistribution::UniformDisk => u.sqrt() * d_max,
        }
    }
}

/// Path-loss channel parameters: no attenuation inside `d_min`, power-law
/// decay with exponent `alpha` beyond it, a common transmit power, and the
/// smallest received power the receiver can decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossConfig {
    pub d_min: f64,
    pub alpha: f64,
    pub power: f64,
    pub min_power: f64,
    #[serde(default = "default_radial")]
    pub radial: RadialDistribution,
}

fn default_radial() -> RadialDistribution {
    RadialDistribution::UniformRadius
}

impl PathLossConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::BadPathLossExponent(self.alpha));
        }
        if !self.min_power.is_finite() || self.min_power <= 0.0 || self.min_power > self.power {
            return Err(Error::BadPowerFloor {
                min_power: self.min_power,
                power: self.power,
            });
        }
        Ok(())
    }

    /// Largest distance at which a lone packet is still decodable:
    /// d_max = (P / P_min)^{1/alpha} · d_min.
    pub fn d_max(&self) -> f64 {
        (self.power / self.min_power).powf(1.0 / self.alpha) * self.d_min
    }
}

/// Received power at distance `d`: P inside the no-loss radius, else
/// P (d / d_min)^{-alpha}.
pub fn received_power(cfg: &PathLossConfig, d: f64) -> f64 {
    if d <= cfg.d_min {
        cfg.power
    } else {
        cfg.power * (d / cfg.d_min).powf(-cfg.alpha)
    }
}

/// The n-level system equivalent to a discretized path-loss channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizationResult {
    pub n: usize,
    /// Received power levels P_1 = P down to P_n = P_min.
    pub levels: Vec<f64>,
    /// Probability of landing in each power zone under the radial law.
    pub delta: Vec<f64>,
    /// Zone distances d_i with received_power(d_i) = P_i.
    pub distances: Vec<f64>,
    /// Zone boundaries (midpoints between consecutive distances).
    pub midpoints: Vec<f64>,
}

/// Discretize the continuous received-power range [P_min, P] into
/// n = floor(log(P/P_min) / log(kβ)) + 1 levels spaced by the factor kβ,
/// with the last level clamped to P_min, and convert the radial law into a
/// power-choice distribution by zone-binning between midpoint radii.
pub fn discretize(cfg: &PathLossConfig, k: u32, beta: f64) -> Result<DiscretizationResult> {
    cfg.validate()?;
    let gap = k as f64 * beta;
    if gap <= 1.0 {
        return Err(Error::BadDiscretizationGap(gap));
    }
    // the 1e-9 nudge keeps exact integer ratios (e.g. P/P_min = kβ) from
    // rounding down a level
    let n = ((cfg.power / cfg.min_power).ln() / gap.ln() + 1e-9).floor() as usize + 1;
    let mut levels: Vec<f64> = (0..n).map(|i| cfg.power / gap.powi(i as i32)).collect();
    levels[n - 1] = cfg.min_power;

    let distances: Vec<f64> = levels
        .iter()
        .map(|p| (cfg.power / p).powf(1.0 / cfg.alpha) * cfg.d_min)
        .collect();
    let d_max = cfg.d_max();

    // sentinels d_0 = -d_1 and d_{n+1} = d_n put the outer midpoints at 0
    // and d_max
    let mut midpoints = Vec::with_capacity(n + 1);
    midpoints.push(0.0);
    for w in distances.windows(2) {
        midpoints.push(0.5 * (w[0] + w[1]));
    }
    midpoints.push(distances[n - 1]);

    let delta: Vec<f64> = (0..n)
        .map(|i| cfg.radial.cdf(midpoints[i + 1], d_max) - cfg.radial.cdf(midpoints[i], d_max))
        .collect();
    debug_assert!((delta.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    Ok(DiscretizationResult {
        n,
        levels,
        delta,
        distances,
        midpoints,
    })
}

impl DiscretizationResult {
    /// Equivalent ideal-channel power model.
    pub fn power_model(&self, beta: f64, gap_factor: u32) -> Result<PowerModel> {
        PowerModel::new(self.levels.clone(), self.delta.clone(), beta, gap_factor)
    }
}

/// Generate a frame under the path-loss channel: every user draws one radial
/// position (shared by all its replicas), places replicas per the repetition
/// protocol, and each replica arrives with the distance-attenuated power.
/// The configured power-choice distribution is ignored; all users transmit
/// at the common power.
pub fn pathloss_frame<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    pl: &PathLossConfig,
    rng: &mut R,
) -> Result<Frame> {
    pl.validate()?;
    let n = cfg.num_users();
    let d_max = pl.d_max();
    let mut replicas = Vec::new();
    let mut user_degrees = Vec::with_capacity(n);
    let mut slots_buf = Vec::new();
    for user in 0..n {
        let degree = cfg.repetition.sample(rng);
        sample_distinct_slots(rng, degree, cfg.slots, &mut slots_buf)?;
        let radius = pl.radial.sample(rng, d_max);
        let power = received_power(pl, radius);
        for &slot in &slots_buf {
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

/// Approximate the asymptotic throughput of the single-power path-loss
/// system at load `g` by discretizing it and evaluating the equivalent
/// n-level system's density evolution. Returns the throughput estimate.
pub fn approximate_throughput(
    cfg: &PathLossConfig,
    repetition: &RepetitionDistribution,
    k: u32,
    beta: f64,
    g: f64,
) -> Result<f64> {
    let disc = discretize(cfg, k, beta)?;
    let power = disc.power_model(beta, k)?;
    let params = crate::de::DEParameters::new(g, repetition, power);
    let (t, _) = crate::de::asymptotic_throughput(&params)?;
    Ok(t)
}
