//! Upper bounds on the achievable asymptotic throughput of two-level
//! power-controlled repetition ALOHA: the area condition (UB1), its
//! rate-independent corollary, the tangent-area refinement (UB2), and the
//! degree-2 stability bound (UB3).

use crate::de::{self, f_p_2level};
use crate::error::Result;
use crate::model::{EdgePerspectiveDistribution, PowerModel, RepetitionDistribution};
use crate::numeric::{adaptive_simpson, last_crossing};

const QUAD_TOL: f64 = 1e-8;

/// All bounds for one (Λ, δ) row, plus the areas at UB2's binding point.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub lambda_desc: String,
    pub delta: f64,
    pub rate: f64,
    pub lambda2: f64,
    pub t_star: f64,
    pub ub1: f64,
    pub ub2: f64,
    pub ub3: f64,
    pub rate_independent: f64,
    pub a_p: f64,
    pub a_q: f64,
    pub a_min: f64,
}

impl BoundReport {
    pub fn csv_header() -> &'static str {
        "lambda_desc,delta,R,Lambda2,T_star,UB1,UB2,UB3,RI"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4}",
            self.lambda_desc,
            self.delta,
            self.rate,
            self.lambda2,
            self.t_star,
            self.ub1,
            self.ub2,
            self.ub3,
            self.rate_independent
        )
    }
}

fn ub1_lhs(t: f64, r: f64, delta: f64) -> f64 {
    let a = r * t;
    (delta * delta - 2.0) / a
        + (-a).exp() * ((1.0 - delta * delta) / a + delta * (1.0 - delta))
        + (-a * delta).exp() / a
        + 1.0 / r
}

/// Area bound: the largest throughput T for which
/// (δ²-2)/(RT) + e^{-RT}((1-δ²)/(RT) + δ(1-δ)) + e^{-RTδ}/(RT) + 1/R <= 0.
///
/// The left side starts near 1/R - 1, which is negative for R > 1; the
/// range [1e-4, 4] is scanned before bisecting the last upcrossing to 1e-6.
/// Returns +∞ when the condition never binds in range, and 0 when no
/// positive throughput satisfies it (the degenerate R = 1 case).
pub fn ub1(r: f64, delta: f64) -> f64 {
    if ub1_lhs(1e-4, r, delta) > 0.0 {
        return 0.0;
    }
    last_crossing(|t| ub1_lhs(t, r, delta), 1e-4, 4.0, 400, 1e-6).unwrap_or(f64::INFINITY)
}

/// Rate-independent corollary of the area bound: T <= 2 - δ².
pub fn rate_independent_ub(delta: f64) -> f64 {
    2.0 - delta * delta
}

/// Areas of the EXIT chart at candidate throughput `t` (load g = t at the
/// lossless boundary): A_p under the slot curve, A_q under the user curve,
/// and A_min between the chord from (1,1) and the slot curve.
fn exit_areas(t: f64, edge: &EdgePerspectiveDistribution, r: f64, delta: f64) -> (f64, f64, f64) {
    let g = t;
    let fp = |q: f64| f_p_2level(q, g, r, delta);
    let a_p = adaptive_simpson(fp, 0.0, 1.0, QUAD_TOL);
    let a_q = adaptive_simpson(|p| edge.eval_unchecked(p), 0.0, 1.0, QUAD_TOL);

    // tangency from (1,1) onto the parametric curve (f_p(q), q): contact at
    // f_p'(q_c)(1 - q_c) = 1 - f_p(q_c), slope by central differences
    let h = 1e-6;
    let slope = |q: f64| {
        let lo = (q - h).max(0.0);
        let hi = (q + h).min(1.0);
        (fp(hi) - fp(lo)) / (hi - lo)
    };
    let tangency = |q: f64| slope(q) * (1.0 - q) - (1.0 - fp(q));
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
    if tangency(lo) <= 0.0 {
        // curve flat enough that no interior tangent exists; the refinement
        // degenerates to the plain area condition
        return (a_p, a_q, 0.0);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if tangency(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q_c = lo;
    let p_c = fp(q_c);
    // area between chord and curve over their common span; the chord runs
    // from the contact point to (1,1), the curve ends at (f_p(1), 1)
    let chord_p = |q: f64| 1.0 - (1.0 - q) * (1.0 - p_c) / (1.0 - q_c);
    let full = adaptive_simpson(|q| chord_p(q) - fp(q), q_c, 1.0, QUAD_TOL);
    let slope_pq = (1.0 - q_c) / (1.0 - p_c);
    let end_strip = slope_pq * (1.0 - fp(1.0)).powi(2) / 2.0;
    let a_min = (full - end_strip).max(0.0);
    (a_p, a_q, a_min)
}

/// Tangent-area refinement: the largest T with A_p + A_q + A_min <= 1.
/// Returns the bound and A_min at the binding point. Degenerate sentinels
/// as in [`ub1`].
pub fn ub2(edge: &EdgePerspectiveDistribution, r: f64, delta: f64) -> (f64, f64) {
    let cond = |t: f64| {
        let (a_p, a_q, a_min) = exit_areas(t, edge, r, delta);
        a_p + a_q + a_min - 1.0
    };
    if cond(1e-3) > 0.0 {
        return (0.0, 0.0);
    }
    match last_crossing(cond, 1e-3, 4.0, 400, 1e-5) {
        Some(bound) => {
            let (_, _, a_min) = exit_areas(bound, edge, r, delta);
            (bound, a_min)
        }
        None => (f64::INFINITY, 0.0),
    }
}

/// Stability bound from the degree-2 mass:
/// T < min{2 - δ², 1 / (2(1 + 2δ² - 2δ)Λ₂)}; the second term is unbounded
/// at Λ₂ = 0.
pub fn ub3(delta: f64, lambda2_node: f64) -> f64 {
    let ri = rate_independent_ub(delta);
    if lambda2_node <= 0.0 {
        return ri;
    }
    let stability = 1.0 / (2.0 * (1.0 + 2.0 * delta * delta - 2.0 * delta) * lambda2_node);
    ri.min(stability)
}

/// Compute every bound and the achieved DE capacity for one (Λ, δ) row.
///
/// The capacity is evaluated on the canonical comparison system: two levels
/// a factor kβ apart with β = 2 and k = 5.
pub fn bound_report(repetition: &RepetitionDistribution, delta: f64) -> Result<BoundReport> {
    let edge = repetition.edge_perspective();
    let r = repetition.rate();
    let power = PowerModel::new(
        vec![10.0, 1.0],
        vec![delta, 1.0 - delta],
        2.0,
        5,
    )?;
    let t_star = de::capacity(&power, repetition, 4.0)?;
    let (ub2_val, _) = ub2(&edge, r, delta);
    let ub1_val = ub1(r, delta);
    let (a_p, a_q, a_min) = exit_areas(ub2_val.min(4.0), &edge, r, delta);
    let report = BoundReport {
        lambda_desc: repetition.to_string(),
        delta,
        rate: r,
        lambda2: repetition.lambda2(),
        t_star,
        ub1: ub1_val,
        ub2: ub2_val,
        ub3: ub3(delta, repetition.lambda2()),
        rate_independent: rate_independent_ub(delta),
        a_p,
        a_q,
        a_min,
    };
    debug_assert!(report.ub2 <= report.ub1 + 1e-6);
    Ok(report)
}
