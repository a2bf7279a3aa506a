//! Core domain types shared by every other module: user-side repetition
//! degree distributions in node and edge perspective, the random transmit
//! power model, and the full system configuration tuple.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact-normalization tolerance for stored distributions.
pub const NORM_TOL: f64 = 1e-9;
/// Constructors renormalize inputs whose sum is within this distance of 1
/// and reject anything worse.
pub const NORM_REPAIR_TOL: f64 = 1e-6;

fn normalize(sum: f64) -> Result<f64> {
    if !sum.is_finite() || (sum - 1.0).abs() > NORM_REPAIR_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(sum)
}

/// Node-perspective repetition distribution Λ: the probability that a user
/// transmits `l` replicas of its packet.
///
/// Stored sparsely as degree → probability; the rate `R = Σ l·Λ_l` is the
/// mean number of replicas per user.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionDistribution {
    coeffs: BTreeMap<u32, f64>,
    rate: f64,
}

impl RepetitionDistribution {
    pub fn new<I: IntoIterator<Item = (u32, f64)>>(coeffs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut sum = 0.0;
        for (degree, value) in coeffs {
            if degree == 0 {
                return Err(Error::ZeroDegree);
            }
            if !(0.0..=1.0 + NORM_REPAIR_TOL).contains(&value) {
                return Err(Error::CoefficientOutOfRange { degree, value });
            }
            if value > 0.0 {
                *map.entry(degree).or_insert(0.0) += value;
                sum += value;
            }
        }
        if map.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let sum = normalize(sum)?;
        for v in map.values_mut() {
            *v /= sum;
        }
        let rate = map.iter().map(|(&l, &p)| l as f64 * p).sum();
        Ok(Self { coeffs: map, rate })
    }

    /// Degree-1 point mass: plain slotted ALOHA.
    pub fn slotted_aloha() -> Self {
        Self::new([(1, 1.0)]).expect("degree-1 point mass is valid")
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, f64> {
        &self.coeffs
    }

    /// Mean repetition rate R = Λ'(1).
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Largest degree with nonzero mass.
    pub fn max_degree(&self) -> u32 {
        *self.coeffs.keys().next_back().expect("non-empty")
    }

    /// Probability of degree 2, the quantity the stability bound depends on.
    pub fn lambda2(&self) -> f64 {
        self.coeffs.get(&2).copied().unwrap_or(0.0)
    }

    /// Λ(x) = Σ Λ_l x^l for x in [0, 1].
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&l, &p)| p * x.powi(l as i32))
            .sum()
    }

    /// Edge-perspective view λ with λ_l = l·Λ_l / R.
    pub fn edge_perspective(&self) -> EdgePerspectiveDistribution {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&l, &p)| (l, l as f64 * p / self.rate))
            .collect();
        EdgePerspectiveDistribution { coeffs }
    }

    /// Draw a degree from Λ.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (&l, &p) in &self.coeffs {
            acc += p;
            if u < acc {
                return l;
            }
        }
        self.max_degree()
    }
}

impl fmt::Display for RepetitionDistribution {
    /// Polynomial form, e.g. `0.5x^2+0.28x^3+0.22x^8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&l, &p) in &self.coeffs {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{p}x^{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// Edge-perspective degree distribution λ: the probability that a uniformly
/// random edge attaches to a user node of degree `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePerspectiveDistribution {
    coeffs: BTreeMap<u32, f64>,
}

impl EdgePerspectiveDistribution {
    pub fn new<I: IntoIterator<Item = (u32, f64)>>(coeffs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut sum = 0.0;
        for (degree, value) in coeffs {
            if degree == 0 {
                return Err(Error::ZeroDegree);
            }
            if !(0.0..=1.0 + NORM_REPAIR_TOL).contains(&value) {
                return Err(Error::CoefficientOutOfRange { degree, value });
            }
            if value > 0.0 {
                *map.entry(degree).or_insert(0.0) += value;
                sum += value;
            }
        }
        if map.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let sum = normalize(sum)?;
        for v in map.values_mut() {
            *v /= sum;
        }
        Ok(Self { coeffs: map })
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, f64> {
        &self.coeffs
    }

    /// λ(x) = Σ λ_l x^{l-1} for x in [0, 1].
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&l, &p)| p * x.powi(l as i32 - 1))
            .sum()
    }

    /// Recover the node perspective: Λ_l ∝ λ_l / l, normalized. The implied
    /// rate is 1 / Σ(λ_l / l).
    pub fn node_perspective(&self) -> RepetitionDistribution {
        let total: f64 = self.coeffs.iter().map(|(&l, &p)| p / l as f64).sum();
        let coeffs: BTreeMap<u32, f64> = self
            .coeffs
            .iter()
            .map(|(&l, &p)| (l, p / l as f64 / total))
            .collect();
        let rate = 1.0 / total;
        RepetitionDistribution { coeffs, rate }
    }
}

/// Multi-level random transmit power model: ordered power levels
/// P_1 > P_2 > ... > P_n, the power-choice distribution Δ, the capture
/// threshold β > 1, and the design gap factor k.
///
/// Levels are stored as ratios to the smallest level; the SIR test only
/// ever sees ratios, so the absolute scale is irrelevant.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel {
    levels: Vec<f64>,
    probs: Vec<f64>,
    beta: f64,
    gap_factor: u32,
}

impl PowerModel {
    pub fn new(levels: Vec<f64>, probs: Vec<f64>, beta: f64, gap_factor: u32) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|&p| !p.is_finite() || p <= 0.0) {
            return Err(Error::BadPowerLevels(levels));
        }
        if levels.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::BadPowerLevels(levels));
        }
        if levels.len() != probs.len() {
            return Err(Error::PowerLengthMismatch {
                levels: levels.len(),
                probs: probs.len(),
            });
        }
        if probs
            .iter()
            .any(|&p| !(0.0..=1.0 + NORM_REPAIR_TOL).contains(&p))
        {
            return Err(Error::NotNormalized {
                sum: probs.iter().sum(),
            });
        }
        if !beta.is_finite() || beta <= 1.0 {
            return Err(Error::BadCaptureThreshold(beta));
        }
        if gap_factor < 1 {
            return Err(Error::BadGapFactor);
        }
        let sum = normalize(probs.iter().sum())?;
        let probs = probs.iter().map(|p| p / sum).collect();
        let floor = *levels.last().expect("non-empty");
        let levels = levels.iter().map(|p| p / floor).collect();
        Ok(Self {
            levels,
            probs,
            beta,
            gap_factor,
        })
    }

    /// Single power level (no power control).
    pub fn single(beta: f64, gap_factor: u32) -> Result<Self> {
        Self::new(vec![1.0], vec![1.0], beta, gap_factor)
    }

    /// Two levels with the design gap P_1 = k·β·P_2 and Δ = {delta, 1-delta}.
    pub fn dual(delta: f64, beta: f64, gap_factor: u32) -> Result<Self> {
        let high = gap_factor as f64 * beta;
        Self::new(vec![high, 1.0], vec![delta, 1.0 - delta], beta, gap_factor)
    }

    /// Power levels as ratios to the smallest level (strictly decreasing,
    /// last element 1).
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gap_factor(&self) -> u32 {
        self.gap_factor
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// True iff P_i >= k·β·P_{i+1} for every adjacent pair: the precondition
    /// under which the density-evolution analysis is valid.
    pub fn gap_satisfied(&self) -> bool {
        let need = self.gap_factor as f64 * self.beta;
        self.levels
            .windows(2)
            .all(|w| w[0] >= need * w[1] * (1.0 - 1e-12))
    }

    /// Draw a power level (as ratio to the smallest).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (p, &d) in self.levels.iter().zip(&self.probs) {
            acc += d;
            if u < acc {
                return *p;
            }
        }
        *self.levels.last().expect("non-empty")
    }
}

/// The full system tuple {M, P, Δ, β, Λ} plus the offered load g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystemConfig", into = "RawSystemConfig")]
pub struct SystemConfig {
    pub slots: usize,
    pub load: f64,
    pub power: PowerModel,
    pub repetition: RepetitionDistribution,
    /// Draw one power per user instead of one per replica. Off by default;
    /// the protocol samples independently per replica.
    pub power_per_user: bool,
}

impl SystemConfig {
    pub fn new(
        slots: usize,
        load: f64,
        power: PowerModel,
        repetition: RepetitionDistribution,
    ) -> Result<Self> {
        if slots < 1 {
            return Err(Error::NoSlots);
        }
        if !load.is_finite() || load < 0.0 {
            return Err(Error::BadLoad(load));
        }
        Ok(Self {
            slots,
            load,
            power,
            repetition,
            power_per_user: false,
        })
    }

    /// Number of users N = round(g·M).
    pub fn num_users(&self) -> usize {
        (self.load * self.slots as f64).round() as usize
    }

    pub fn with_load(&self, load: f64) -> Self {
        Self {
            load,
            ..self.clone()
        }
    }
}

/// Wire format for `SystemConfig`: the exact key set used by configuration
/// files and the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystemConfig {
    slots: usize,
    load: f64,
    beta: f64,
    k: u32,
    power_levels: Vec<f64>,
    power_probs: Vec<f64>,
    repetition: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    power_per_user: bool,
}

impl TryFrom<RawSystemConfig> for SystemConfig {
    type Error = Error;

    fn try_from(raw: RawSystemConfig) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(raw.repetition.len());
        for (key, value) in &raw.repetition {
            let degree: u32 = key.parse().map_err(|_| Error::ZeroDegree)?;
            coeffs.push((degree, *value));
        }
        let repetition = RepetitionDistribution::new(coeffs)?;
        let power = PowerModel::new(raw.power_levels, raw.power_probs, raw.beta, raw.k)?;
        let mut cfg = SystemConfig::new(raw.slots, raw.load, power, repetition)?;
        cfg.power_per_user = raw.power_per_user;
        Ok(cfg)
    }
}

impl From<SystemConfig> for RawSystemConfig {
    fn from(cfg: SystemConfig) -> Self {
        RawSystemConfig {
            slots: cfg.slots,
            load: cfg.load,
            beta: cfg.power.beta(),
            k: cfg.power.gap_factor(),
            power_levels: cfg.power.levels().to_vec(),
            power_probs: cfg.power.probs().to_vec(),
            repetition: cfg
                .repetition
                .coefficients()
                .iter()
                .map(|(l, p)| (l.to_string(), *p))
                .collect(),
            power_per_user: cfg.power_per_user,
        }
    }
}

/// Poisson slot-occupancy pmf g^k e^{-g} / k!: the M → ∞ probability that a
/// slot carries exactly k packets.
pub fn slot_occupancy_pmf(g: f64, k: u32) -> f64 {
    crate::numeric::poisson_pmf(g, k)
}
