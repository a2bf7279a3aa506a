//! Maximizes the supported load g over the edge-perspective degree
//! distribution, the power-choice distribution, and g itself, subject to
//! the density-evolution lossless condition q > f_q(f_p(q)) sampled on a
//! fixed grid. Differential evolution (rand/1/bin) with simplex repair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::de::{capture_coefficients, f_p_2level, f_p_general, DEParameters};
use crate::error::{Error, Result};
use crate::model::{EdgePerspectiveDistribution, PowerModel};
use crate::numeric::poisson_truncation;

/// Margin used in place of strict inequality for the grid constraints.
pub const CONSTRAINT_MARGIN: f64 = 1e-9;
const PENALTY: f64 = 1e3;

/// The search space: which user-node degrees carry free edge-perspective
/// mass, the power-level structure, optional pinned values, the constraint
/// grid, and the load bracket.
#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub degree_support: Vec<u32>,
    /// Number of levels, power ratios, β and k; its probability vector is a
    /// placeholder whenever `fix_delta` is absent.
    pub power: PowerModel,
    /// Pin the power-choice distribution instead of optimizing it.
    pub fix_delta: Option<Vec<f64>>,
    /// Pin the edge-perspective coefficients (aligned with
    /// `degree_support`) instead of optimizing them.
    pub fix_lambda: Option<Vec<f64>>,
    /// Constraint sample points in (0, 1].
    pub q_grid: Vec<f64>,
    pub g_bounds: (f64, f64),
}

impl OptimizationProblem {
    /// Standard grid: 1000 uniform points in (0, 1] plus 50 log-spaced
    /// points near 0, where the stability constraint binds.
    pub fn default_q_grid() -> Vec<f64> {
        let mut grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        for i in 0..50 {
            grid.push(10f64.powf(-6.0 + 3.0 * i as f64 / 49.0));
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        grid
    }

    pub fn new(degree_support: Vec<u32>, power: PowerModel) -> Result<Self> {
        if degree_support.is_empty() {
            return Err(Error::BadProblem("empty degree support".into()));
        }
        if degree_support.contains(&0) {
            return Err(Error::BadProblem("degree 0 in support".into()));
        }
        Ok(Self {
            degree_support,
            power,
            fix_delta: None,
            fix_lambda: None,
            q_grid: Self::default_q_grid(),
            g_bounds: (1e-3, 4.0),
        })
    }

    fn n_levels(&self) -> usize {
        self.power.num_levels()
    }

    fn lambda_dims(&self) -> usize {
        if self.fix_lambda.is_some() {
            0
        } else {
            self.degree_support.len()
        }
    }

    fn delta_dims(&self) -> usize {
        if self.fix_delta.is_some() || self.n_levels() == 1 {
            0
        } else {
            self.n_levels()
        }
    }
}

/// Differential-evolution knobs.
#[derive(Debug, Clone)]
pub struct OptimizerSettings {
    pub population: usize,
    pub mutation_factor: f64,
    pub crossover: f64,
    pub generations: usize,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            population: 50,
            mutation_factor: 0.8,
            crossover: 0.9,
            generations: 300,
            seed: 0,
        }
    }
}

impl OptimizerSettings {
    fn validate(&self) -> Result<()> {
        if self.population < 8 {
            return Err(Error::BadOptimizerSettings("population must be >= 8".into()));
        }
        if !self.mutation_factor.is_finite() || self.mutation_factor <= 0.0 || self.mutation_factor >= 2.0 {
            return Err(Error::BadOptimizerSettings("F must lie in (0, 2)".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::BadOptimizerSettings("CR must lie in [0, 1]".into()));
        }
        if self.generations == 0 {
            return Err(Error::BadOptimizerSettings("need at least 1 generation".into()));
        }
        Ok(())
    }
}

/// Best point found by the search.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_g: f64,
    /// Edge-perspective coefficients over the problem's degree support.
    pub best_lambda: Vec<f64>,
    pub best_delta: Vec<f64>,
    pub feasible: bool,
    /// Best penalized objective per generation; nondecreasing.
    pub history: Vec<f64>,
}

impl OptimizationResult {
    pub fn edge_distribution(&self, problem: &OptimizationProblem) -> Result<EdgePerspectiveDistribution> {
        EdgePerspectiveDistribution::new(
            problem
                .degree_support
                .iter()
                .copied()
                .zip(self.best_lambda.iter().copied()),
        )
    }
}

struct Candidate<'a> {
    g: f64,
    lambda: &'a [f64],
    delta: &'a [f64],
}

fn simplex_ok(v: &[f64]) -> bool {
    v.iter().all(|&x| x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= CONSTRAINT_MARGIN
}

/// Count of violated grid constraints q > f_q(f_p(q)) + margin; 0 means the
/// DE evolves to the lossless fixed point at load g.
fn violations(c: &Candidate, problem: &OptimizationProblem) -> usize {
    let edge = match EdgePerspectiveDistribution::new(
        problem
            .degree_support
            .iter()
            .copied()
            .zip(c.lambda.iter().copied()),
    ) {
        Ok(e) => e,
        Err(_) => return problem.q_grid.len(),
    };
    let rate = edge.node_perspective().rate();
    let n = problem.n_levels();
    let fp: Box<dyn Fn(f64) -> f64> = match n {
        1 => Box::new(move |q| 1.0 - (-c.g * rate * q).exp()),
        2 => {
            let d = c.delta[0];
            Box::new(move |q| f_p_2level(q, c.g, rate, d))
        }
        _ => {
            // capture probabilities depend on δ, so the table is
            // per-candidate
            let power = match PowerModel::new(
                problem.power.levels().to_vec(),
                c.delta.to_vec(),
                problem.power.beta(),
                problem.power.gap_factor(),
            ) {
                Ok(p) => p,
                Err(_) => return problem.q_grid.len(),
            };
            let w = capture_coefficients(&power, poisson_truncation(c.g * rate))
                .expect("positive table size");
            let params = DEParameters::from_edge(c.g, edge.clone(), power);
            Box::new(move |q| f_p_general(q, &params, &w))
        }
    };
    problem
        .q_grid
        .iter()
        .filter(|&&q| q - edge.eval_unchecked(fp(q).clamp(0.0, 1.0)) <= CONSTRAINT_MARGIN)
        .count()
}

/// Full feasibility test for a candidate (g, λ, δ): simplex constraints and
/// every grid constraint.
pub fn feasible(
    g: f64,
    lambda: &[f64],
    delta: &[f64],
    problem: &OptimizationProblem,
) -> bool {
    if lambda.len() != problem.degree_support.len() || !simplex_ok(lambda) {
        return false;
    }
    if problem.n_levels() > 1 && !simplex_ok(delta) {
        return false;
    }
    if !(problem.g_bounds.0..=problem.g_bounds.1).contains(&g) {
        return false;
    }
    violations(&Candidate { g, lambda, delta }, problem) == 0
}

fn repair_simplex(v: &mut [f64]) {
    let mut sum = 0.0;
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
        sum += *x;
    }
    if sum <= 0.0 {
        let u = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x = u);
    } else {
        v.iter_mut().for_each(|x| *x /= sum);
    }
}

struct Genome {
    lambda_dims: usize,
    delta_dims: usize,
}

impl Genome {
    fn len(&self) -> usize {
        1 + self.lambda_dims + self.delta_dims
    }

    fn repair(&self, x: &mut [f64], problem: &OptimizationProblem) {
        x[0] = x[0].clamp(problem.g_bounds.0, problem.g_bounds.1);
        if self.lambda_dims > 0 {
            repair_simplex(&mut x[1..1 + self.lambda_dims]);
        }
        if self.delta_dims > 0 {
            repair_simplex(&mut x[1 + self.lambda_dims..]);
        }
    }

    fn candidate<'a>(&self, x: &'a [f64], problem: &'a OptimizationProblem) -> Candidate<'a> {
        let lambda: &[f64] = if self.lambda_dims > 0 {
            &x[1..1 + self.lambda_dims]
        } else {
            problem.fix_lambda.as_ref().expect("lambda pinned")
        };
        let delta: &[f64] = if self.delta_dims > 0 {
            &x[1 + self.lambda_dims..]
        } else if let Some(d) = &problem.fix_delta {
            d
        } else {
            problem.power.probs()
        };
        Candidate {
            g: x[0],
            lambda,
            delta,
        }
    }
}

fn fitness(x: &[f64], genome: &Genome, problem: &OptimizationProblem) -> f64 {
    let c = genome.candidate(x, problem);
    c.g - PENALTY * violations(&c, problem) as f64
}

/// DE/rand/1/bin over the flattened decision vector. Deterministic for a
/// fixed seed; fitness evaluations within a generation run in parallel.
pub fn optimize(
    problem: &OptimizationProblem,
    settings: &OptimizerSettings,
) -> Result<OptimizationResult> {
    settings.validate()?;
    if let Some(fl) = &problem.fix_lambda {
        if fl.len() != problem.degree_support.len() || !simplex_ok(fl) {
            return Err(Error::BadProblem("fixed lambda is not on the simplex".into()));
        }
    }
    if let Some(fd) = &problem.fix_delta {
        if fd.len() != problem.n_levels() || !simplex_ok(fd) {
            return Err(Error::BadProblem("fixed delta is not on the simplex".into()));
        }
    }
    let genome = Genome {
        lambda_dims: problem.lambda_dims(),
        delta_dims: problem.delta_dims(),
    };
    let dims = genome.len();
    let np = settings.population;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|_| {
            let mut x: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
            x[0] = problem.g_bounds.0 + x[0] * (problem.g_bounds.1 - problem.g_bounds.0);
            genome.repair(&mut x, problem);
            x
        })
        .collect();
    let mut scores: Vec<f64> = population
        .par_iter()
        .map(|x| fitness(x, &genome, problem))
        .collect();

    let mut history = Vec::with_capacity(settings.generations);
    for _ in 0..settings.generations {
        let mut trials: Vec<Vec<f64>> = Vec::with_capacity(np);
        for i in 0..np {
            let mut pick = || loop {
                let r = rng.gen_range(0..np);
                if r != i {
                    return r;
                }
            };
            let (r1, r2, r3) = {
                let a = pick();
                let b = loop {
                    let x = pick();
                    if x != a {
                        break x;
                    }
                };
                let c = loop {
                    let x = pick();
                    if x != a && x != b {
                        break x;
                    }
                };
                (a, b, c)
            };
            let j_rand = rng.gen_range(0..dims);
            let mut trial = population[i].clone();
            for j in 0..dims {
                if j == j_rand || rng.gen::<f64>() < settings.crossover {
                    trial[j] = population[r1][j]
                        + settings.mutation_factor * (population[r2][j] - population[r3][j]);
                }
            }
            genome.repair(&mut trial, problem);
            trials.push(trial);
        }
        let trial_scores: Vec<f64> = trials
            .par_iter()
            .map(|x| fitness(x, &genome, problem))
            .collect();
        for i in 0..np {
            if trial_scores[i] >= scores[i] {
                population[i] = trials[i].clone();
                scores[i] = trial_scores[i];
            }
        }
        let gen_best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        history.push(gen_best);
    }

    let best_idx = scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let best = &population[best_idx];
    let c = genome.candidate(best, problem);
    let feasible_best = feasible(c.g, c.lambda, c.delta, problem);
    Ok(OptimizationResult {
        best_g: c.g,
        best_lambda: c.lambda.to_vec(),
        best_delta: c.delta.to_vec(),
        feasible: feasible_best,
        history,
    })
}
