//! Closed-form throughput of slotted ALOHA with 1, 2, or n random power
//! levels. These serve both as user-facing calculators and as oracles for
//! the Monte-Carlo simulator.
//!
//! The n-level forms assume a large multiplicative gap between adjacent
//! power levels (`PowerModel::gap_satisfied`); they are still computable
//! outside that regime, just less accurate.

use crate::error::{Error, Result};

/// Throughput of a power-controlled slotted-ALOHA system, split into
/// per-power-level contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct SAResult {
    /// Total packets decoded per slot.
    pub throughput: f64,
    /// Mean decoded per slot at each power level, highest first. Sums to
    /// `throughput`.
    pub components: Vec<f64>,
}

/// Vanilla slotted ALOHA: T = g e^{-g}.
pub fn sa_throughput(g: f64) -> f64 {
    g * (-g).exp()
}

/// Dual power control: T = gδe^{-gδ} + (1+gδ)·g(1-δ)e^{-g}.
///
/// The first component is the high-power capture term, the second the
/// low-power term (decoded either alone or behind a single captured
/// high-power packet).
pub fn sa_dpc_throughput(g: f64, delta: f64) -> SAResult {
    let high = g * delta * (-g * delta).exp();
    let low = (1.0 + g * delta) * g * (1.0 - delta) * (-g).exp();
    SAResult {
        throughput: high + low,
        components: vec![high, low],
    }
}

/// n-level power control:
/// T = Σ_i (Π_{j<i} (1+gδ_j)e^{-gδ_j}) · gδ_i e^{-gδ_i}.
///
/// Rejects `deltas` that do not form a probability vector.
pub fn sa_npc_throughput(g: f64, deltas: &[f64]) -> Result<SAResult> {
    if deltas.is_empty() || deltas.iter().any(|&d| !(0.0..=1.0).contains(&d)) {
        return Err(Error::NotNormalized {
            sum: deltas.iter().sum(),
        });
    }
    let sum: f64 = deltas.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { sum });
    }
    let mut components = Vec::with_capacity(deltas.len());
    let mut prefix = 1.0;
    for &d in deltas {
        components.push(prefix * g * d * (-g * d).exp());
        prefix *= (1.0 + g * d) * (-g * d).exp();
    }
    Ok(SAResult {
        throughput: components.iter().sum(),
        components,
    })
}

/// Jointly maximize the SA-DPC throughput over g in [0, 10] and δ in [0, 1].
///
/// Coarse 200x100 grid followed by shrinking pattern-search refinement.
/// Returns (g*, δ*, T*).
pub fn sa_dpc_optimum() -> (f64, f64, f64) {
    let f = |g: f64, d: f64| sa_dpc_throughput(g, d).throughput;
    let mut best = (0.0, 0.0, 0.0);
    for i in 0..=200 {
        let g = 10.0 * i as f64 / 200.0;
        for j in 0..=100 {
            let d = j as f64 / 100.0;
            let t = f(g, d);
            if t > best.2 {
                best = (g, d, t);
            }
        }
    }
    let (mut g, mut d, mut t) = best;
    let mut step = 0.05;
    while step > 1e-9 {
        let mut improved = false;
        for (dg, dd) in [
            (step, 0.0),
            (-step, 0.0),
            (0.0, step),
            (0.0, -step),
            (step, step),
            (step, -step),
            (-step, step),
            (-step, -step),
        ] {
            let cg = (g + dg).clamp(0.0, 10.0);
            let cd = (d + dd).clamp(0.0, 1.0);
            let ct = f(cg, cd);
            if ct > t {
                g = cg;
                d = cd;
                t = ct;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (g, d, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sa_examples() {
        assert!((sa_throughput(1.0) - 1.0 / std::f64::consts::E).abs() < 1e-12);
        assert_eq!(sa_throughput(0.0), 0.0);
        assert!((sa_throughput(2.0) - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn dpc_at_paper_point() {
        let r = sa_dpc_throughput(1.75, 0.4);
        assert!((r.throughput - 0.658).abs() < 1e-3, "{}", r.throughput);
        assert!((r.components.iter().sum::<f64>() - r.throughput).abs() < 1e-12);
    }

    #[test]
    fn dpc_collapses_to_sa_at_trivial_delta() {
        for g in [0.3, 1.0, 2.5] {
            assert!((sa_dpc_throughput(g, 0.0).throughput - sa_throughput(g)).abs() < 1e-12);
            assert!((sa_dpc_throughput(g, 1.0).throughput - sa_throughput(g)).abs() < 1e-12);
        }
    }

    #[test]
    fn dpc_gain_identity() {
        // The gain over plain SA expands exactly to
        //   ΔT = gδ(e^{-gδ} - e^{-g}) + g²δ(1-δ)e^{-g},
        // so it is strictly positive for δ in (0,1), g > 0, and never falls
        // below the g²δ(1-δ)e^{-g} term alone.
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let g = 1e-3 + 5.0 * next();
            let d = 0.01 + 0.98 * next();
            let gain = sa_dpc_throughput(g, d).throughput - sa_throughput(g);
            let identity = g * d * ((-g * d).exp() - (-g).exp())
                + g * g * d * (1.0 - d) * (-g).exp();
            let floor = g * g * d * (1.0 - d) * (-g).exp();
            assert!((gain - identity).abs() < 1e-11, "g={g} d={d}");
            assert!(gain > 0.0, "g={g} d={d}");
            assert!(gain >= floor - 1e-12, "g={g} d={d}");
        }
    }

    #[test]
    fn npc_trivial_and_dpc_equivalence() {
        let r = sa_npc_throughput(1.3, &[1.0]).unwrap();
        assert!((r.throughput - sa_throughput(1.3)).abs() < 1e-12);

        for g in [0.5, 1.75, 3.0] {
            for d in [0.1, 0.4, 0.9] {
                let npc = sa_npc_throughput(g, &[d, 1.0 - d]).unwrap();
                let dpc = sa_dpc_throughput(g, d);
                assert!((npc.throughput - dpc.throughput).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn npc_small_load_is_nearly_lossless() {
        let third = 1.0 / 3.0;
        for g in [0.01, 0.05] {
            let t = sa_npc_throughput(g, &[third, third, third]).unwrap().throughput;
            assert!((t - g).abs() < 2.0 * g * g, "g={g} t={t}");
        }
    }

    #[test]
    fn npc_rejects_bad_deltas() {
        assert!(sa_npc_throughput(1.0, &[0.5, 0.4]).is_err());
        assert!(sa_npc_throughput(1.0, &[]).is_err());
        assert!(sa_npc_throughput(1.0, &[1.2, -0.2]).is_err());
    }

    #[test]
    fn optimum_matches_refined_grid_search() {
        // True maximizer of the closed form; the commonly quoted (1.75, 0.4)
        // is a rounded point sitting ~7e-4 below the max.
        let (g, d, t) = sa_dpc_optimum();
        assert!((g - 1.73106).abs() < 1e-3, "g={g}");
        assert!((d - 0.42232).abs() < 1e-3, "d={d}");
        assert!((t - 0.6584960).abs() < 1e-5, "t={t}");
    }

    #[test]
    fn optimum_restricted_to_plain_sa() {
        // At delta fixed to 0 or 1 the surface reduces to g e^{-g}, maximized
        // at g = 1 with value 1/e; spot-check the reduction.
        let t0: f64 = sa_dpc_throughput(1.0, 0.0).throughput;
        let t1: f64 = sa_dpc_throughput(1.0, 1.0).throughput;
        assert!((t0 - 1.0 / std::f64::consts::E).abs() < 1e-12);
        assert!((t1 - 1.0 / std::f64::consts::E).abs() < 1e-12);
    }
}
