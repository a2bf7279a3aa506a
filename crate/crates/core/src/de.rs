//! Density evolution for the asymptotic (M → ∞) regime: the two-level
//! closed-form slot update, the general n-level update built from capture
//! coefficients, fixed-point iteration, asymptotic throughput/packet loss,
//! and the capacity search over the load.

use crate::error::{Error, Result};
use crate::model::{EdgePerspectiveDistribution, PowerModel, RepetitionDistribution};
use crate::numeric::poisson_truncation;

/// Default iteration cap; convergence past this point is dominated by the
/// near-threshold bottleneck, not numerics.
pub const DEFAULT_MAX_ITER: usize = 500;
/// Default convergence tolerance on |p_{i+1} - p_i|.
pub const DEFAULT_EPS: f64 = 1e-10;
/// An evolved p below this is classified as lossless: the packet-loss
/// polynomial is < 1e-11 there for every supported degree >= 2.
pub const LOSSLESS_P_THRESHOLD: f64 = 1e-6;
/// Bisection tolerance of the capacity search.
pub const CAPACITY_TOL: f64 = 1e-4;
/// Iteration budget for the capacity probes. 500 iterations suffice for
/// ordinary distributions but undershoot by ~0.02 on optimized ones, whose
/// matched EXIT curves take >10^4 iterations to drain near the threshold.
pub const CAPACITY_MAX_ITER: usize = 20_000;

/// Inputs of one density-evolution run. The slot-side degree distributions
/// are Poisson with mean gR and are derived on the fly, never stored.
#[derive(Debug, Clone)]
pub struct DEParameters {
    pub load: f64,
    pub rate: f64,
    pub edge_dist: EdgePerspectiveDistribution,
    pub power: PowerModel,
    /// Cap capture at the design gap factor instead of the large-k
    /// idealization. Study knob; defaults off.
    pub exact_gap: bool,
}

impl DEParameters {
    pub fn new(load: f64, repetition: &RepetitionDistribution, power: PowerModel) -> Self {
        Self {
            load,
            rate: repetition.rate(),
            edge_dist: repetition.edge_perspective(),
            power,
            exact_gap: false,
        }
    }

    /// Build from an edge-perspective distribution (the optimizer's decision
    /// variables live in edge view); the rate is implied.
    pub fn from_edge(load: f64, edge_dist: EdgePerspectiveDistribution, power: PowerModel) -> Self {
        let rate = edge_dist.node_perspective().rate();
        Self {
            load,
            rate,
            edge_dist,
            power,
            exact_gap: false,
        }
    }

    /// Slot edge-perspective polynomial ρ(x) = e^{-gR(1-x)} (equal to the
    /// node-perspective ψ in the large-system limit).
    pub fn rho(&self, x: f64) -> f64 {
        (-self.load * self.rate * (1.0 - x)).exp()
    }

    /// Node-perspective repetition distribution recovered from the edge view.
    pub fn node_distribution(&self) -> RepetitionDistribution {
        self.edge_dist.node_perspective()
    }
}

/// One step of the (p, q) sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DEState {
    pub p: f64,
    pub q: f64,
    pub iteration: usize,
}

/// Result of a density-evolution run.
#[derive(Debug, Clone)]
pub struct DEOutcome {
    pub p_inf: f64,
    pub converged: bool,
    pub trace: Vec<DEState>,
}

/// Two-level slot update in closed form:
/// f_p(q) = 1 - (1-δ)e^{-gqR} - δe^{-gqδR} - δ(1-δ)gqR e^{-gqR}.
///
/// At δ = 0 or 1 this collapses to the single-level update 1 - e^{-gqR}.
pub fn f_p_2level(q: f64, g: f64, r: f64, delta: f64) -> f64 {
    let a = g * q * r;
    1.0 - (1.0 - delta) * (-a).exp()
        - delta * (-a * delta).exp()
        - delta * (1.0 - delta) * a * (-a).exp()
}

/// User-side update f_q(p) = λ(p).
pub fn f_q(p: f64, edge_dist: &EdgePerspectiveDistribution) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    edge_dist.eval_unchecked(p)
}

/// Capture coefficient table: w[l][t] is the probability that an edge at a
/// degree-l slot with t unresolved co-edges resolves in the current
/// iteration. In both supported regimes the value depends on l only through
/// the support constraint t <= l-1, so one row per t is stored.
#[derive(Debug, Clone)]
pub struct CaptureCoefficients {
    per_t: Vec<f64>,
    max_degree: usize,
}

impl CaptureCoefficients {
    /// w[l][t] with w[l][t] = 0 outside t <= min(stored, l-1).
    pub fn value(&self, l: usize, t: usize) -> f64 {
        if t >= l || t >= self.per_t.len() {
            0.0
        } else {
            self.per_t[t]
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }
}

/// Capture coefficients under the large-gap idealization: a captured packet
/// tolerates any number of lower-power interferers.
pub fn capture_coefficients(power: &PowerModel, max_degree: usize) -> Result<CaptureCoefficients> {
    build_capture(power, max_degree, None)
}

/// Capture coefficients with the lower-interferer count capped at the design
/// gap factor k, for studying the finite-gap regime.
pub fn capture_coefficients_exact_gap(
    power: &PowerModel,
    max_degree: usize,
) -> Result<CaptureCoefficients> {
    build_capture(power, max_degree, Some(power.gap_factor() as usize))
}

#[allow(clippy::needless_range_loop)]
fn build_capture(
    power: &PowerModel,
    max_degree: usize,
    lower_cap: Option<usize>,
) -> Result<CaptureCoefficients> {
    if max_degree < 1 {
        return Err(Error::BadMaxDegree(max_degree));
    }
    let deltas = power.probs();
    let n = deltas.len();
    let t_max = max_degree - 1;

    // pr_higher[i][j]: probability that j unresolved co-edges all hold
    // distinct power levels strictly above level i (1-based), so they all
    // capture ahead of the tagged edge.
    let mut pr_higher = vec![vec![0.0; t_max + 1]; n + 1];
    for i in 1..=n {
        pr_higher[i][0] = 1.0;
        if t_max >= 1 {
            pr_higher[i][1] = deltas[..i - 1].iter().sum();
        }
    }
    for j in 2..=t_max {
        for i in 1..=n {
            pr_higher[i][j] = if j >= i {
                0.0
            } else {
                pr_higher[i - 1][j] + deltas[i - 2] * pr_higher[i - 1][j - 1]
            };
        }
    }
    // lower_mass[i] = δ_{i+1} + ... + δ_n
    let lower_mass: Vec<f64> = (0..=n).map(|i| deltas[i..].iter().sum()).collect();

    let mut per_t = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut w = 0.0;
        for i in 1..=n {
            let mut falling = 1.0; // C(t,j)·j! = t·(t-1)···(t-j+1)
            let mut acc = 0.0;
            for j in 0..=t.min(i - 1) {
                if j > 0 {
                    falling *= (t - j + 1) as f64;
                }
                let m = t - j;
                if lower_cap.is_some_and(|k| m > k) {
                    continue;
                }
                acc += falling * pr_higher[i][j] * lower_mass[i].powi(m as i32);
            }
            w += deltas[i - 1] * acc;
        }
        per_t.push(w);
    }
    debug_assert!((per_t[0] - 1.0).abs() < 1e-12);
    per_t[0] = 1.0;
    Ok(CaptureCoefficients { per_t, max_degree })
}

/// General n-level slot update:
/// p = Σ_l ρ_l (1 - Σ_t w[l][t] C(l-1,t) q^t (1-q)^{l-1-t}),
/// with ρ_l = e^{-gR}(gR)^{l-1}/(l-1)! and the l-sum truncated where the
/// Poisson tail drops below 1e-12 (or at the table's max degree).
pub fn f_p_general(q: f64, params: &DEParameters, w: &CaptureCoefficients) -> f64 {
    let mean = params.load * params.rate;
    let len = poisson_truncation(mean).min(w.max_degree());
    let q_pow = power_table(q, len);
    let qc_pow = power_table(1.0 - q, len);

    let mut p = 0.0;
    let mut rho = (-mean).exp(); // ρ_1
    for l in 1..=len {
        if l > 1 {
            rho *= mean / (l - 1) as f64;
        }
        let mut resolved = 0.0;
        let mut binom = 1.0; // C(l-1, t)
        for t in 0..l {
            if t > 0 {
                binom *= (l - t) as f64 / t as f64;
            }
            resolved += w.value(l, t) * binom * q_pow[t] * qc_pow[l - 1 - t];
        }
        p += rho * (1.0 - resolved);
    }
    p
}

fn power_table(x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut v = 1.0;
    for _ in 0..len {
        out.push(v);
        v *= x;
    }
    out
}

/// Independent three-level reference: direct term-by-term evaluation of the
/// explicit three-power-level slot update. Exists solely as an oracle for
/// `f_p_general` at n = 3.
pub fn f_p_3level_reference(q: f64, g: f64, r: f64, deltas: [f64; 3]) -> f64 {
    let [d1, d2, d3] = deltas;
    debug_assert!((deltas.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    let mean = g * r;
    let len = poisson_truncation(mean);
    let q_pow = power_table(q, len + 1);
    let qc_pow = power_table(1.0 - q, len + 1);

    let mut p = 1.0;
    let mut rho = (-mean).exp();
    for l in 1..=len {
        if l > 1 {
            rho *= mean / (l - 1) as f64;
        }
        let resolved = match l {
            1 => 1.0,
            2 => {
                let pairwise: f64 = deltas.iter().map(|d| d * (1.0 - d)).sum();
                qc_pow[1] + pairwise * q
            }
            _ => {
                let mut s = qc_pow[l - 1];
                let mut binom = 1.0;
                for t in 1..l {
                    binom *= (l - t) as f64 / t as f64;
                    let top = d1 * (1.0 - d1).powi(t as i32);
                    let mid = d2 * (d3.powi(t as i32) + t as f64 * d1 * d3.powi(t as i32 - 1));
                    s += (top + mid) * binom * q_pow[t] * qc_pow[l - 1 - t];
                }
                s += d3 * (1.0 - d3) * (l - 1) as f64 * qc_pow[l - 2] * q;
                let choose2 = ((l - 1) * (l - 2) / 2) as f64;
                s += 2.0 * d1 * d2 * d3 * choose2 * qc_pow[l - 3] * q * q;
                s
            }
        };
        p -= rho * resolved;
    }
    p
}

enum SlotUpdate {
    SingleLevel,
    TwoLevel { delta: f64 },
    General { w: CaptureCoefficients },
}

impl SlotUpdate {
    fn for_params(params: &DEParameters, g_max: f64) -> Result<Self> {
        match params.power.num_levels() {
            1 if !params.exact_gap => Ok(SlotUpdate::SingleLevel),
            2 if !params.exact_gap => Ok(SlotUpdate::TwoLevel {
                delta: params.power.probs()[0],
            }),
            _ => {
                let max_degree = poisson_truncation(g_max * params.rate);
                let w = if params.exact_gap {
                    capture_coefficients_exact_gap(&params.power, max_degree)?
                } else {
                    capture_coefficients(&params.power, max_degree)?
                };
                Ok(SlotUpdate::General { w })
            }
        }
    }

    fn eval(&self, q: f64, params: &DEParameters) -> f64 {
        let p = match self {
            SlotUpdate::SingleLevel => 1.0 - (-params.load * params.rate * q).exp(),
            SlotUpdate::TwoLevel { delta } => f_p_2level(q, params.load, params.rate, *delta),
            SlotUpdate::General { w } => f_p_general(q, params, w),
        };
        // cancellation can push the update a few ulp outside its range
        p.clamp(0.0, 1.0)
    }
}

fn run_de_with(params: &DEParameters, update: &SlotUpdate, max_iter: usize, eps: f64) -> DEOutcome {
    let mut trace = Vec::new();
    let mut q = 1.0;
    let mut p_prev: Option<f64> = None;
    for i in 0..max_iter {
        let p = update.eval(q, params);
        trace.push(DEState {
            p,
            q,
            iteration: i + 1,
        });
        if let Some(prev) = p_prev {
            // the (p_i) sequence is nonincreasing for these monotone updates
            debug_assert!(p <= prev + 1e-12);
            if (p - prev).abs() < eps {
                return DEOutcome {
                    p_inf: p,
                    converged: true,
                    trace,
                };
            }
        }
        p_prev = Some(p);
        q = f_q(p, &params.edge_dist);
    }
    DEOutcome {
        p_inf: p_prev.unwrap_or(1.0),
        converged: false,
        trace,
    }
}

/// Iterate the DE recursion q_1 = 1, p_i = f_p(q_i), q_{i+1} = λ(p_i) until
/// |p_{i+1} - p_i| < eps or `max_iter` is reached.
pub fn run_de(params: &DEParameters, max_iter: usize, eps: f64) -> Result<DEOutcome> {
    let update = SlotUpdate::for_params(params, params.load)?;
    Ok(run_de_with(params, &update, max_iter, eps))
}

/// Asymptotic packet loss P_L = Λ(p_∞) and throughput T = g(1 - P_L).
pub fn asymptotic_throughput(params: &DEParameters) -> Result<(f64, f64)> {
    let outcome = run_de(params, DEFAULT_MAX_ITER, DEFAULT_EPS)?;
    let node = params.node_distribution();
    let loss = node.eval_unchecked(outcome.p_inf.clamp(0.0, 1.0));
    Ok((params.load * (1.0 - loss), loss))
}

/// Largest load that still evolves to the lossless fixed point (p_∞ below
/// `LOSSLESS_P_THRESHOLD`), located by bisection over (0, g_max]. In the
/// lossless region throughput equals load, so this is the asymptotic
/// capacity T*.
pub fn capacity(power: &PowerModel, repetition: &RepetitionDistribution, g_max: f64) -> Result<f64> {
    let template = DEParameters::new(1.0, repetition, power.clone());
    let update = SlotUpdate::for_params(&template, g_max)?;
    let lossless = |g: f64| -> bool {
        let params = DEParameters {
            load: g,
            ..template.clone()
        };
        run_de_with(&params, &update, CAPACITY_MAX_ITER, DEFAULT_EPS).p_inf < LOSSLESS_P_THRESHOLD
    };
    if !lossless(1e-3) {
        return Ok(0.0);
    }
    Ok(crate::numeric::bisect_largest(lossless, 1e-3, g_max, CAPACITY_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RepetitionDistribution;

    fn liva() -> RepetitionDistribution {
        RepetitionDistribution::new([(2, 0.5), (3, 0.28), (8, 0.22)]).unwrap()
    }

    fn params(g: f64, deltas: &[f64]) -> DEParameters {
        let n = deltas.len();
        let levels: Vec<f64> = (0..n).map(|i| 10f64.powi((n - 1 - i) as i32)).collect();
        let power = PowerModel::new(levels, deltas.to_vec(), 2.0, 5).unwrap();
        DEParameters::new(g, &liva(), power)
    }

    #[test]
    fn f_p_2level_trivial_points() {
        assert_eq!(f_p_2level(0.0, 1.0, 3.6, 0.4), 0.0);
        for q in [0.2, 0.5, 0.9] {
            let vanilla = 1.0 - (-1.0 * q * 3.6f64).exp();
            assert!((f_p_2level(q, 1.0, 3.6, 1.0) - vanilla).abs() < 1e-14);
            assert!((f_p_2level(q, 1.0, 3.6, 0.0) - vanilla).abs() < 1e-14);
        }
        // frozen spot value of the closed form
        assert!((f_p_2level(0.3, 1.0, 3.6, 0.4) - 0.448535773692).abs() < 1e-10);
    }

    #[test]
    fn f_q_trivial_points() {
        let edge = liva().edge_perspective();
        assert!((f_q(1.0, &edge) - 1.0).abs() < 1e-12);
        assert_eq!(f_q(0.0, &edge), 0.0);
        let single = RepetitionDistribution::new([(2, 1.0)]).unwrap().edge_perspective();
        assert!((f_q(0.5, &single) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn capture_two_level_matches_direct_formula() {
        let power = PowerModel::dual(0.4, 2.0, 5).unwrap();
        let w = capture_coefficients(&power, 12).unwrap();
        let (d, l) = (0.4f64, 9);
        assert_eq!(w.value(l, 0), 1.0);
        assert!((w.value(l, 1) - 2.0 * (d * (1.0 - d))).abs() < 1e-15);
        for t in 2..=8 {
            let direct = d * (1.0 - d).powi(t as i32);
            assert!((w.value(l, t) - direct).abs() < 1e-15, "t={t}");
        }
        assert!((w.value(l, 1) - 0.48).abs() < 1e-15);
        assert!((w.value(l, 3) - 0.0864).abs() < 1e-15);
    }

    #[test]
    fn capture_single_level_has_no_captures() {
        let power = PowerModel::single(2.0, 5).unwrap();
        let w = capture_coefficients(&power, 8).unwrap();
        assert_eq!(w.value(5, 0), 1.0);
        for t in 1..=4 {
            assert_eq!(w.value(5, t), 0.0);
        }
    }

    #[test]
    fn capture_three_level_matches_term_expansion() {
        let (d1, d2, d3) = (0.27, 0.39, 0.34);
        let power = PowerModel::new(vec![100.0, 10.0, 1.0], vec![d1, d2, d3], 2.0, 5).unwrap();
        let w = capture_coefficients(&power, 10).unwrap();
        // t = 1: every pairing of two distinct levels
        let w1 = d1 * (1.0 - d1) + d2 * (1.0 - d2) + d3 * (1.0 - d3);
        assert!((w.value(8, 1) - w1).abs() < 1e-14);
        // t = 2: includes the triple-distinct term 2 δ1 δ2 δ3
        let w2 = d1 * (1.0 - d1) * (1.0 - d1)
            + d2 * (d3 * d3 + 2.0 * d1 * d3)
            + 2.0 * d1 * d2 * d3;
        assert!((w.value(8, 2) - w2).abs() < 1e-14);
    }

    #[test]
    fn capture_rejects_zero_degree_table() {
        let power = PowerModel::dual(0.4, 2.0, 5).unwrap();
        assert!(matches!(
            capture_coefficients(&power, 0),
            Err(Error::BadMaxDegree(0))
        ));
    }

    #[test]
    fn capture_exact_gap_truncates_lower_tail() {
        let power = PowerModel::dual(0.4, 2.0, 5).unwrap();
        let w = capture_coefficients_exact_gap(&power, 12).unwrap();
        let d = 0.4f64;
        for t in 2..=5 {
            assert!((w.value(11, t) - d * (1.0 - d).powi(t as i32)).abs() < 1e-15);
        }
        // beyond the design gap no capture survives
        assert_eq!(w.value(11, 6), 0.0);
        assert_eq!(w.value(11, 7), 0.0);
    }

    #[test]
    fn general_update_matches_two_level_closed_form() {
        for g in [0.5, 1.0, 1.7] {
            let p2 = params(g, &[0.4, 0.6]);
            let w = capture_coefficients(&p2.power, poisson_truncation(g * 3.6)).unwrap();
            for i in 1..10 {
                let q = i as f64 / 10.0;
                let a = f_p_general(q, &p2, &w);
                let b = f_p_2level(q, g, 3.6, 0.4);
                assert!((a - b).abs() < 1e-8, "g={g} q={q} {a} {b}");
            }
        }
    }

    #[test]
    fn general_update_matches_three_level_reference() {
        let deltas = [0.27, 0.39, 0.34];
        for g in [0.5, 1.0, 1.7] {
            let p3 = params(g, &deltas);
            let w = capture_coefficients(&p3.power, poisson_truncation(g * 3.6)).unwrap();
            for i in 1..10 {
                let q = i as f64 / 10.0;
                let a = f_p_general(q, &p3, &w);
                let b = f_p_3level_reference(q, g, 3.6, deltas);
                assert!((a - b).abs() < 1e-8, "g={g} q={q} {a} {b}");
            }
        }
    }

    #[test]
    fn general_update_trivial_points() {
        let p1 = params(1.0, &[1.0]);
        let w = capture_coefficients(&p1.power, poisson_truncation(3.6)).unwrap();
        assert!(f_p_general(0.0, &p1, &w).abs() < 1e-12);
        for i in 1..10 {
            let q = i as f64 / 10.0;
            let vanilla = 1.0 - (-3.6 * q).exp();
            assert!((f_p_general(q, &p1, &w) - vanilla).abs() < 1e-9);
        }
    }

    #[test]
    fn three_level_reference_trivial_points() {
        assert!(f_p_3level_reference(0.0, 1.0, 3.6, [0.27, 0.39, 0.34]).abs() < 1e-12);
        for i in 1..10 {
            let q = i as f64 / 10.0;
            let collapsed = f_p_3level_reference(q, 0.9, 3.6, [1.0, 0.0, 0.0]);
            let vanilla = 1.0 - (-0.9 * q * 3.6f64).exp();
            assert!((collapsed - vanilla).abs() < 1e-9);
        }
        // frozen spot value
        assert!(
            (f_p_3level_reference(0.3, 1.0, 3.6, [0.27, 0.39, 0.34]) - 0.339385848011).abs()
                < 1e-10
        );
    }

    #[test]
    fn capture_mass_stays_in_unit_interval() {
        let power = PowerModel::new(
            vec![100.0, 10.0, 1.0],
            vec![0.27, 0.39, 0.34],
            2.0,
            5,
        )
        .unwrap();
        let w = capture_coefficients(&power, 40).unwrap();
        for l in 1..=40usize {
            for i in 0..=10 {
                let q = i as f64 / 10.0;
                let mut mass = 0.0;
                let mut binom = 1.0;
                for t in 0..l {
                    if t > 0 {
                        binom *= (l - t) as f64 / t as f64;
                    }
                    mass += w.value(l, t)
                        * binom
                        * q.powi(t as i32)
                        * (1.0 - q).powi((l - 1 - t) as i32);
                }
                assert!((-1e-12..=1.0 + 1e-12).contains(&mass), "l={l} q={q} mass={mass}");
            }
        }
    }

    #[test]
    fn deep_lossless_and_deep_lossy_loads() {
        let low = params(0.1, &[0.4, 0.6]);
        let out = run_de(&low, DEFAULT_MAX_ITER, DEFAULT_EPS).unwrap();
        assert!(out.p_inf < 1e-9, "p_inf={}", out.p_inf);
        assert_eq!(out.trace[0].q, 1.0);

        let high = params(5.0, &[0.4, 0.6]);
        let out = run_de(&high, DEFAULT_MAX_ITER, DEFAULT_EPS).unwrap();
        assert!(out.p_inf > 0.5, "p_inf={}", out.p_inf);
    }

    #[test]
    fn trace_is_nonincreasing_and_fixpoint_contained() {
        for (g, deltas) in [(0.5, vec![1.0]), (1.2, vec![0.4, 0.6]), (1.9, vec![0.27, 0.39, 0.34])]
        {
            let pr = params(g, &deltas);
            let out = run_de(&pr, DEFAULT_MAX_ITER, DEFAULT_EPS).unwrap();
            for w in out.trace.windows(2) {
                assert!(w[1].p <= w[0].p + 1e-12);
            }
            if out.converged {
                let update = SlotUpdate::for_params(&pr, pr.load).unwrap();
                let round = update.eval(f_q(out.p_inf, &pr.edge_dist), &pr);
                assert!((out.p_inf - round).abs() < 10.0 * DEFAULT_EPS);
            }
        }
    }

    #[test]
    fn dual_with_degenerate_delta_matches_vanilla_trace() {
        let one = params(0.5, &[1.0]);
        let power = PowerModel::new(vec![10.0, 1.0], vec![1.0, 0.0], 2.0, 5).unwrap();
        let two = DEParameters::new(0.5, &liva(), power);
        let a = run_de(&one, 200, 1e-12).unwrap();
        let b = run_de(&two, 200, 1e-12).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (x, y) in a.trace.iter().zip(&b.trace) {
            assert!((x.p - y.p).abs() < 1e-14);
            assert!((x.q - y.q).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_throughput_examples() {
        let below = params(1.6, &[0.4, 0.6]);
        let (t, loss) = asymptotic_throughput(&below).unwrap();
        assert!(loss < 1e-9);
        assert!((t - 1.6).abs() < 1e-8);

        let zero = params(0.0, &[0.4, 0.6]);
        let (t, _) = asymptotic_throughput(&zero).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn vanilla_capacity_is_the_known_threshold() {
        let power = PowerModel::single(2.0, 5).unwrap();
        let c = capacity(&power, &liva(), 4.0).unwrap();
        // 0.938 is the established peeling threshold of
        // 0.5x^2+0.28x^3+0.22x^8
        assert!((c - 0.9386).abs() < 5e-4, "c={c}");
        // loads just under capacity are lossless in throughput too
        let (t, _) = asymptotic_throughput(&params(c * 0.99, &[1.0])).unwrap();
        assert!((t - c * 0.99).abs() < 1e-6);
    }

    #[test]
    fn capacity_returns_zero_when_everything_is_lossy() {
        // a degree-1 distribution never peels: any positive load is lossy
        let rep = RepetitionDistribution::slotted_aloha();
        let power = PowerModel::single(2.0, 5).unwrap();
        let c = capacity(&power, &rep, 4.0).unwrap();
        assert_eq!(c, 0.0);
    }
}
