//! Experiment configuration files: one TOML document per experiment with
//! the system tuple, an optional load sweep, trial/seed defaults, and an
//! optional path-loss section. Unknown keys are rejected so typos cannot
//! silently change an experiment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

use irsa_core::pathloss::PathLossConfig;
use irsa_core::{PowerModel, RepetitionDistribution, SystemConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    DeSweep,
    Capacity,
    Bounds,
    Optimize,
    Pathloss,
    Discretize,
    SaAnalytic,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::DeSweep => "de-sweep",
            CommandKind::Capacity => "capacity",
            CommandKind::Bounds => "bounds",
            CommandKind::Optimize => "optimize",
            CommandKind::Pathloss => "pathloss",
            CommandKind::Discretize => "discretize",
            CommandKind::SaAnalytic => "sa-analytic",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub g_start: f64,
    pub g_end: f64,
    pub g_step: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    command: Option<CommandKind>,
    slots: usize,
    load: Option<f64>,
    beta: f64,
    k: u32,
    power_levels: Vec<f64>,
    power_probs: Vec<f64>,
    repetition: BTreeMap<String, f64>,
    #[serde(default)]
    power_per_user: bool,
    sweep: Option<SweepSection>,
    trials: Option<usize>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    pathloss: Option<PathLossConfig>,
}

/// A fully validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub command: Option<CommandKind>,
    pub config: SystemConfig,
    pub sweep: Option<SweepSection>,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub pathloss: Option<PathLossConfig>,
}

impl ExperimentSpec {
    /// Loads that this experiment evaluates: the sweep grid, or the single
    /// configured load.
    pub fn loads(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) => {
                let mut g = s.g_start;
                let mut out = Vec::new();
                while g <= s.g_end + 1e-12 {
                    out.push(g);
                    g += s.g_step;
                }
                out
            }
            None => vec![self.config.load],
        }
    }
}

/// Renormalize a probability vector whose sum is within 1e-2 of one,
/// warning on stderr; the model layer itself only repairs 1e-6-level dust.
fn renormalize(values: &mut [f64], what: &str) -> Result<(), CliError> {
    let sum: f64 = values.iter().sum();
    if !sum.is_finite() {
        return Err(CliError::config(format!("{what} sum is not finite")));
    }
    let off = (sum - 1.0).abs();
    if off > 1e-2 + 1e-12 {
        return Err(CliError::config(format!(
            "{what} sum to {sum}; more than 1e-2 away from 1"
        )));
    }
    if off > 1e-6 {
        eprintln!("warning: {what} sum to {sum}; renormalizing");
        for v in values.iter_mut() {
            *v /= sum;
        }
    }
    Ok(())
}

/// Parse and validate one experiment document.
pub fn validate(text: &str) -> Result<ExperimentSpec, CliError> {
    let file: ExperimentFile =
        toml::from_str(text).map_err(|e| CliError::config(format!("config parse error: {e}")))?;

    let mut rep_pairs = Vec::with_capacity(file.repetition.len());
    let mut rep_mass = Vec::with_capacity(file.repetition.len());
    for (key, value) in &file.repetition {
        let degree: u32 = key.parse().map_err(|_| {
            CliError::config(format!("repetition: degree key `{key}` is not an integer"))
        })?;
        rep_pairs.push(degree);
        rep_mass.push(*value);
    }
    if rep_mass.is_empty() {
        return Err(CliError::config("repetition: no degrees given".to_string()));
    }
    renormalize(&mut rep_mass, "repetition coefficients")?;
    let repetition = RepetitionDistribution::new(rep_pairs.into_iter().zip(rep_mass))
        .map_err(|e| CliError::config(format!("repetition: {e}")))?;

    let mut probs = file.power_probs.clone();
    renormalize(&mut probs, "power_probs")?;
    let power = PowerModel::new(file.power_levels.clone(), probs, file.beta, file.k)
        .map_err(|e| CliError::config(format!("power model: {e}")))?;

    if let Some(s) = &file.sweep {
        if !s.g_step.is_finite() || s.g_step <= 0.0 {
            return Err(CliError::config(format!(
                "sweep: g_step must be > 0, got {}",
                s.g_step
            )));
        }
        if s.g_end < s.g_start {
            return Err(CliError::config("sweep: g_end < g_start".to_string()));
        }
        let points = (s.g_end - s.g_start) / s.g_step;
        if points > 1e6 {
            return Err(CliError::config(format!(
                "sweep: {points:.0} load points; refusing more than 1e6"
            )));
        }
    }
    if let Some(pl) = &file.pathloss {
        pl.validate()
            .map_err(|e| CliError::config(format!("pathloss: {e}")))?;
    }

    let load = file.load.unwrap_or_else(|| {
        file.sweep.as_ref().map(|s| s.g_start).unwrap_or(1.0)
    });
    let mut config = SystemConfig::new(file.slots, load, power, repetition)
        .map_err(|e| CliError::config(e.to_string()))?;
    config.power_per_user = file.power_per_user;

    Ok(ExperimentSpec {
        command: file.command,
        config,
        sweep: file.sweep,
        trials: file.trials.unwrap_or(100),
        seed: file.seed.unwrap_or(1),
        output: file.output,
        pathloss: file.pathloss,
    })
}
