//! Quadrature with error budgets.
//!
//! 1-d integrals use adaptive Simpson with the usual 1/15 Richardson
//! error estimate; the reported budget carries a safety factor because the
//! integrands here can have kinks at level-set boundaries. 2-d integrals
//! use midpoint tensor grids with step doubling, which is robust to kinks,
//! and fan out over rows. Dimensions three and up fall back to Monte Carlo
//! with a confidence-interval budget and a counter-based generator, so the
//! result is deterministic per seed regardless of thread count.

use crate::config::QUAD_SAFETY;
use crate::par;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson on `[a, b]`. Returns `(integral, error_bound)`.
///
/// The first few levels split unconditionally so a narrow feature inside
/// a wide interval cannot be skipped by an accidental zero estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let force = 6.min(max_depth);
    let (v, e) = simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, force);
    (v, QUAD_SAFETY * e)
}

/// Adaptive Simpson with interior split points (argmins and kink
/// landmarks), integrating each segment separately.
pub fn adaptive_simpson_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    splits: &[f64],
    tol: f64,
    max_depth: u32,
) -> (f64, f64) {
    let mut nodes: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|s| s.is_finite() && *s > a && *s < b)
        .collect();
    nodes.push(a);
    nodes.push(b);
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    nodes.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * (1.0 + x.abs()));
    let mut value = 0.0;
    let mut err = 0.0;
    for w in nodes.windows(2) {
        let (v, e) = adaptive_simpson(f, w[0], w[1], tol, max_depth);
        value += v;
        err += e;
    }
    (value, err)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    force: u32,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (force == 0 && delta.abs() <= 15.0 * tol) {
        return (
            left + right + delta / 15.0,
            delta.abs() / 15.0 + f64::EPSILON * whole.abs(),
        );
    }
    let nf = force.saturating_sub(1);
    let (lv, le) = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, nf);
    let (rv, re) = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, nf);
    (lv + rv, le + re)
}

/// Midpoint rule over an axis-aligned rectangle with `refine` step
/// doublings. Returns `(integral, error_bound)`; the budget is the last
/// step-doubling difference times the safety factor.
pub fn midpoint_2d<F>(f: &F, lo: [f64; 2], hi: [f64; 2], base: usize, refine: u32) -> (f64, f64)
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let mut n = base.max(8);
    let mut prev = midpoint_2d_once(f, lo, hi, n);
    let mut best = prev;
    let mut err = f64::INFINITY;
    for _ in 0..refine {
        n *= 2;
        let cur = midpoint_2d_once(f, lo, hi, n);
        err = (cur - prev).abs();
        best = cur;
        prev = cur;
    }
    if !err.is_finite() {
        err = best.abs().max(1.0);
    }
    (best, QUAD_SAFETY * err)
}

fn midpoint_2d_once<F>(f: &F, lo: [f64; 2], hi: [f64; 2], n: usize) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let hx = (hi[0] - lo[0]) / n as f64;
    let hy = (hi[1] - lo[1]) / n as f64;
    let rows = par::map_indexed(n, |i| {
        let x = lo[0] + (i as f64 + 0.5) * hx;
        let mut s = 0.0;
        for j in 0..n {
            let y = lo[1] + (j as f64 + 0.5) * hy;
            s += f(x, y);
        }
        s
    });
    rows.into_iter().sum::<f64>() * hx * hy
}

/// Stratified Monte Carlo over the box, deterministic per seed. The box
/// is sliced into equal-width strata along the first axis with equal
/// sample allocation; each stratum draws from its own counter-based
/// stream, so the parallel fan-out keeps the sequence. Returns
/// `(integral, error_bound)` with a 1.96-sigma budget from the stratified
/// variance estimator.
pub fn monte_carlo_box<F>(f: &F, lo: &[f64], hi: &[f64], samples: usize, seed: u64) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = lo.len();
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let strata = 64.min(samples.max(1));
    let per = (samples / strata).max(2);
    let slab = (hi[0] - lo[0]) / strata as f64;
    let partial = par::map_indexed(strata, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64 + 1);
        let x0_lo = lo[0] + slab * s as f64;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut x = vec![0.0; dim];
        for _ in 0..per {
            x[0] = x0_lo + slab * rand::Rng::gen::<f64>(&mut rng);
            for d in 1..dim {
                x[d] = lo[d] + (hi[d] - lo[d]) * rand::Rng::gen::<f64>(&mut rng);
            }
            let v = f(&x);
            sum += v;
            sum2 += v * v;
        }
        (sum, sum2)
    });
    // Equal-probability strata: the estimate is the mean of stratum means
    // and the variance adds up stratum by stratum.
    let mut mean = 0.0;
    let mut var_of_mean = 0.0;
    let s_count = strata as f64;
    for (sum, sum2) in &partial {
        let m = sum / per as f64;
        let v = (sum2 / per as f64 - m * m).max(0.0);
        mean += m / s_count;
        var_of_mean += v / (per as f64 * s_count * s_count);
    }
    (mean * vol, 1.96 * var_of_mean.sqrt() * vol)
}
