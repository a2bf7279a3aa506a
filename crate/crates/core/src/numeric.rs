//! Small numeric routines shared by the analysis modules: adaptive Simpson
//! quadrature, bisection on a boolean predicate, and Poisson helpers.

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth > 50 || delta.abs() < 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, to within `tol`.
///
/// Requires `pred(lo)` true; if `pred(hi)` is also true, returns `hi`.
pub fn bisect_largest<F: Fn(f64) -> bool>(pred: F, lo: f64, hi: f64, tol: f64) -> f64 {
    debug_assert!(pred(lo));
    if pred(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Scan `[lo, hi]` with `samples` points for the last sign change of `f`
/// from <= 0 to > 0, then bisect it down to `tol`. Returns `None` when no
/// crossing exists in the range.
pub fn last_crossing<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    samples: usize,
    tol: f64,
) -> Option<f64> {
    let step = (hi - lo) / samples as f64;
    let mut bracket = None;
    let mut prev_x = lo;
    let mut prev_v = f(lo);
    for i in 1..=samples {
        let x = lo + step * i as f64;
        let v = f(x);
        if prev_v <= 0.0 && v > 0.0 {
            bracket = Some((prev_x, x));
        }
        prev_x = x;
        prev_v = v;
    }
    let (mut a, mut b) = bracket?;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if f(m) <= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(a)
}

/// Truncation length for Poisson sums with the given mean: the tail mass
/// beyond `mean + 12*sqrt(mean) + 30` is far below 1e-12.
pub fn poisson_truncation(mean: f64) -> usize {
    (mean + 12.0 * mean.sqrt() + 30.0).ceil() as usize
}

/// Poisson pmf e^{-mean} mean^k / k!, computed by stable recurrence.
pub fn poisson_pmf(mean: f64, k: u32) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let mut p = (-mean).exp();
    for i in 1..=k {
        p *= mean / i as f64;
    }
    p
}

/// Binomial coefficients C(n, t) for t = 0..=n as f64.
pub fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for t in 1..=n {
        row[t] = row[t - 1] * (n - t + 1) as f64 / t as f64;
    }
    row
}
