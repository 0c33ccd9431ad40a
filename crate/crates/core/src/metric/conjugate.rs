//! The conjugate sup-norm metric: the smallest lambda whose dual ball of
//! radius 1/lambda keeps the conjugates within lambda of each other,
//!
//!   delta(u, v) = inf { lambda > 0 : sup_{|y| <= 1/lambda} |u*(y) - v*(y)| <= lambda }.
//!
//! g(lambda) = sup over the shrinking ball is nonincreasing, so the
//! infimum is found by monotone bisection; it is either a minimum or 0.
//! Conjugates of the closed forms are themselves closed forms, and for
//! those pairs the sup is evaluated exactly:
//!
//! - two positively homogeneous conjugates (support functions plus
//!   constants) reduce to the exact extrema of a support difference over
//!   the sphere;
//! - two indicator conjugates jump to +inf exactly when the probe ball
//!   meets the symmetric difference of the domains, which happens below a
//!   threshold radius found from radial functions;
//! - quadratic pairs reduce to extrema of a quadratic over a disk.
//!
//! Mixed and grid-backed pairs fall back to a sampled sup with the
//! sampling gap reported in the budget.

use super::{Method, MetricResult};
use crate::body::ConvexBody;
use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::func::{ConvexFunction, Shape};
use crate::geom;
use crate::linalg::Matrix;
use crate::transform::{as_support_plus_const, conjugate_closed_form};

enum DualSide {
    /// h(K, .) + c, finite everywhere.
    Hom { body: ConvexBody, c: f64 },
    /// I_K + c with 0 interior to K.
    Ind { body: ConvexBody, c: f64 },
    /// y^T M y + <b, y> + c.
    Quad { m: Matrix, b: Vec<f64>, c: f64 },
    /// Anything else: the conjugate evaluated as the exact discrete sup
    /// over primal samples, max_i (<x_i, y> - u(x_i)). Finite everywhere,
    /// and exact for grid inputs under the hull-of-samples reading.
    Gen { pts: Vec<(Vec<f64>, f64)> },
}

fn dual_side(u: &ConvexFunction, cfg: &NumericConfig) -> Result<DualSide> {
    if let Some(c) = conjugate_closed_form(u)? {
        if let Some((k, off)) = as_support_plus_const(&c) {
            return Ok(DualSide::Hom {
                body: k.clone(),
                c: off,
            });
        }
        match c.shape() {
            Shape::IndicatorPlus { body, offset } => {
                return Ok(DualSide::Ind {
                    body: body.clone(),
                    c: *offset,
                })
            }
            Shape::Quadratic {
                matrix,
                linear,
                constant,
            } => {
                return Ok(DualSide::Quad {
                    m: matrix.clone(),
                    b: linear.clone(),
                    c: *constant,
                })
            }
            _ => {}
        }
    }
    Ok(DualSide::Gen { pts: primal_samples(u, cfg)? })
}

/// Finite primal samples (x, u(x)) for the discrete-sup conjugate, capped
/// so each dual evaluation stays cheap.
fn primal_samples(u: &ConvexFunction, cfg: &NumericConfig) -> Result<Vec<(Vec<f64>, f64)>> {
    let n = u.dim();
    let (_, m) = u.global_min()?;
    let r = u.sublevel_set(m + 40.0)?.max_norm().unwrap_or(10.0) + 1.0;
    let cap_1d = cfg.dual_grid.clamp(257, 1025);
    let mut pts = Vec::new();
    match n {
        1 => {
            for i in 0..cap_1d {
                let x = -r + 2.0 * r * i as f64 / (cap_1d - 1) as f64;
                let v = u.eval_unchecked(&[x]);
                if v.is_finite() {
                    pts.push((vec![x], v));
                }
            }
        }
        2 => {
            let side = 41usize;
            for i in 0..side {
                for j in 0..side {
                    let x = [
                        -r + 2.0 * r * i as f64 / (side - 1) as f64,
                        -r + 2.0 * r * j as f64 / (side - 1) as f64,
                    ];
                    let v = u.eval_unchecked(&x);
                    if v.is_finite() {
                        pts.push((vec![x[0], x[1]], v));
                    }
                }
            }
        }
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                what: "sampled dual side",
            })
        }
    }
    if pts.is_empty() {
        return Err(Error::InvalidFunction("no finite samples for conjugation".into()));
    }
    Ok(pts)
}

/// Extrema over the unit sphere of h_A - h_B (with B possibly a point at
/// the origin).
fn hom_extrema(a: &ConvexBody, b: Option<&ConvexBody>) -> Result<(f64, f64)> {
    match a.dim() {
        Some(1) => {
            let (a0, a1) = a
                .as_interval()
                .ok_or_else(|| Error::InvalidBody("1-d body without interval form".into()))?;
            let (b0, b1) = match b {
                Some(bb) => bb
                    .as_interval()
                    .ok_or_else(|| Error::InvalidBody("1-d body without interval form".into()))?,
                None => (0.0, 0.0),
            };
            let plus = a1 - b1; // direction +1
            let minus = -a0 + b0; // direction -1
            Ok((plus.min(minus), plus.max(minus)))
        }
        Some(2) => {
            let sa = supported(a)?;
            let sb = match b {
                Some(bb) => supported(bb)?,
                None => geom::SupportedBody2::polygon(&[[0.0, 0.0]]),
            };
            Ok(geom::support_diff_extrema(&sa, &sb))
        }
        Some(d) => Err(Error::UnsupportedDimension {
            dim: d,
            what: "support extrema",
        }),
        None => Err(Error::EmptyBody("support extrema")),
    }
}

fn supported(k: &ConvexBody) -> Result<geom::SupportedBody2> {
    if let Some(p) = k.as_polygon() {
        return Ok(geom::SupportedBody2::polygon(&p));
    }
    match k {
        ConvexBody::Ball { center, radius } if center.len() == 2 => {
            Ok(geom::SupportedBody2::ball([center[0], center[1]], *radius))
        }
        _ => Err(Error::InvalidBody("no exact support structure".into())),
    }
}

/// sup |rho D(theta) + c| over rho in [0, r]: the value set is the
/// interval [c + r min(D_min, 0), c + r max(D_max, 0)].
fn sup_abs_hom(c: f64, d_min: f64, d_max: f64, r: f64) -> f64 {
    let lo = c + r * d_min.min(0.0);
    let hi = c + r * d_max.max(0.0);
    lo.abs().max(hi.abs())
}

/// Extrema of a quadratic over the closed disk of radius r.
fn quad_extrema_on_ball(m: &Matrix, b: &[f64], c: f64, r: f64) -> (f64, f64) {
    let n = m.dim();
    let eval =
        |y: &[f64]| m.quadratic_form(y) + b.iter().zip(y).map(|(a, x)| a * x).sum::<f64>() + c;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut push = |v: f64| {
        lo = lo.min(v);
        hi = hi.max(v);
    };
    push(eval(&vec![0.0; n]));
    if let Ok(inv) = m.inverse() {
        let crit: Vec<f64> = inv.apply(b).iter().map(|v| -0.5 * v).collect();
        let nc: f64 = crit.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nc <= r {
            push(eval(&crit));
        }
    }
    match n {
        1 => {
            push(eval(&[r]));
            push(eval(&[-r]));
        }
        _ => {
            // Boundary: trig polynomial of degree 2; dense sampling with a
            // golden polish on the bracketing arcs of each extremum.
            let msamp = 720;
            let phi = |th: f64| {
                let y = [r * th.cos(), r * th.sin()];
                eval(&y)
            };
            let mut best_hi = (0.0, f64::NEG_INFINITY);
            let mut best_lo = (0.0, f64::INFINITY);
            for k in 0..msamp {
                let th = std::f64::consts::TAU * k as f64 / msamp as f64;
                let v = phi(th);
                if v > best_hi.1 {
                    best_hi = (th, v);
                }
                if v < best_lo.1 {
                    best_lo = (th, v);
                }
            }
            let w = std::f64::consts::TAU / msamp as f64;
            let (_, vmax) = crate::func::golden_min(&|t| -phi(t), best_hi.0 - w, best_hi.0 + w);
            push(-vmax);
            let (_, vmin) = crate::func::golden_min(&phi, best_lo.0 - w, best_lo.0 + w);
            push(vmin);
        }
    }
    (lo, hi)
}

/// sup over the disk of |q(y) - (h(y) + c_h)| with q quadratic and h a
/// support function: radial slices are scalar quadratics, solved exactly;
/// the direction fan is sampled and its gap reported.
fn sup_abs_quad_minus_hom(
    m: &Matrix,
    b: &[f64],
    cq: f64,
    homb: &ConvexBody,
    ch: f64,
    r: f64,
    samples: usize,
) -> Result<(f64, f64)> {
    let n = m.dim();
    let dirs: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..samples)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / samples as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                what: "mixed dual sup",
            })
        }
    };
    let mut best = 0.0_f64;
    let mut prev: Option<f64> = None;
    let mut jump = 0.0_f64;
    for u in &dirs {
        let alpha = m.quadratic_form(u);
        let beta: f64 = b.iter().zip(u).map(|(a, x)| a * x).sum::<f64>() - homb.support(u)?;
        let gamma = cq - ch;
        // f(rho) = alpha rho^2 + beta rho + gamma on [0, r].
        let mut cand = vec![gamma, alpha * r * r + beta * r + gamma];
        if alpha.abs() > 1e-300 {
            let rho = -beta / (2.0 * alpha);
            if rho > 0.0 && rho < r {
                cand.push(alpha * rho * rho + beta * rho + gamma);
            }
        }
        let v = cand.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if let Some(p) = prev {
            jump = jump.max((v - p).abs());
        }
        prev = Some(v);
        best = best.max(v);
    }
    Ok((best, if n == 1 { 0.0 } else { jump }))
}

/// Sampled sup for generic sides; never claims +inf (the generic
/// representation is finite by construction).
fn sup_abs_sampled(a: &DualSide, b: &DualSide, r: f64, cfg: &NumericConfig) -> (f64, f64) {
    let n = side_dim(a);
    let eval = |s: &DualSide, y: &[f64]| -> f64 {
        match s {
            DualSide::Hom { body, c } => body.support(y).unwrap_or(f64::INFINITY) + c,
            DualSide::Ind { body, c } => {
                if body.contains(y) {
                    *c
                } else {
                    f64::INFINITY
                }
            }
            DualSide::Quad { m, b, c } => {
                m.quadratic_form(y) + b.iter().zip(y).map(|(a, x)| a * x).sum::<f64>() + c
            }
            DualSide::Gen { pts } => pts
                .iter()
                .map(|(x, v)| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - v)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    };
    let diff = |y: &[f64]| -> f64 {
        let va = eval(a, y);
        let vb = eval(b, y);
        match (va.is_finite(), vb.is_finite()) {
            (true, true) => (va - vb).abs(),
            (false, false) => 0.0,
            _ => f64::INFINITY,
        }
    };
    let mut best = 0.0_f64;
    let mut jump = 0.0_f64;
    let mut prev: Option<f64> = None;
    match n {
        1 => {
            let m = cfg.dual_grid.clamp(129, 8193);
            for k in 0..=m {
                let y = -r + 2.0 * r * k as f64 / m as f64;
                let v = diff(&[y]);
                if v.is_infinite() {
                    return (f64::INFINITY, 0.0);
                }
                if let Some(p) = prev {
                    jump = jump.max((v - p).abs());
                }
                prev = Some(v);
                best = best.max(v);
            }
        }
        _ => {
            let (nr, nth) = (48, 128);
            for i in 0..=nr {
                let rho = r * i as f64 / nr as f64;
                for k in 0..nth {
                    let th = std::f64::consts::TAU * k as f64 / nth as f64;
                    let v = diff(&[rho * th.cos(), rho * th.sin()]);
                    if v.is_infinite() {
                        return (f64::INFINITY, 0.0);
                    }
                    if let Some(p) = prev {
                        jump = jump.max((v - p).abs());
                    }
                    prev = Some(v);
                    best = best.max(v);
                }
            }
        }
    }
    (best, 2.0 * jump)
}

fn side_dim(s: &DualSide) -> usize {
    match s {
        DualSide::Hom { body, .. } | DualSide::Ind { body, .. } => body.dim().unwrap_or(1),
        DualSide::Quad { m, .. } => m.dim(),
        DualSide::Gen { pts } => pts.first().map(|(x, _)| x.len()).unwrap_or(1),
    }
}

/// Threshold radius at which the probe ball first meets the symmetric
/// difference of two indicator domains: dist(0, A Delta B). Exact for
/// origin-centered balls, sampled radial search otherwise.
fn symmetric_difference_distance(a: &ConvexBody, b: &ConvexBody) -> Result<(f64, f64)> {
    if let (
        ConvexBody::Ball {
            center: ca,
            radius: ra,
        },
        ConvexBody::Ball {
            center: cb,
            radius: rb,
        },
    ) = (a, b)
    {
        if ca.iter().all(|v| *v == 0.0) && cb.iter().all(|v| *v == 0.0) {
            if (ra - rb).abs() <= 1e-15 * ra.max(*rb) {
                return Ok((f64::INFINITY, 0.0));
            }
            return Ok((ra.min(*rb), 0.0));
        }
    }
    let n = a.dim().ok_or(Error::EmptyBody("dual domain"))?;
    let dirs: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..1024)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 1024.0;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                what: "dual domain distance",
            })
        }
    };
    let mut d0 = f64::INFINITY;
    let mut any_diff = false;
    for u in &dirs {
        let ra = a.radial(u)?;
        let rb = b.radial(u)?;
        if (ra - rb).abs() > 1e-11 * (1.0 + ra.abs() + rb.abs()) {
            any_diff = true;
            d0 = d0.min(ra.min(rb));
        }
    }
    if !any_diff {
        return Ok((f64::INFINITY, 0.0));
    }
    // Sampling can only overestimate the threshold radius; report the
    // direction-fan resolution as the gap.
    let gap = if n == 1 {
        0.0
    } else {
        d0 * (std::f64::consts::TAU / 1024.0)
    };
    Ok((d0, gap))
}

/// g(lambda) with r = 1/lambda: value possibly +inf, plus a gap bound for
/// sampled routes.
fn sup_abs_diff(a: &DualSide, b: &DualSide, r: f64, cfg: &NumericConfig) -> Result<(f64, f64)> {
    match (a, b) {
        (DualSide::Hom { body: ka, c: ca }, DualSide::Hom { body: kb, c: cb }) => {
            let (dmin, dmax) = hom_extrema(ka, Some(kb))?;
            Ok((sup_abs_hom(ca - cb, dmin, dmax, r), 0.0))
        }
        (DualSide::Ind { body: ka, c: ca }, DualSide::Ind { body: kb, c: cb }) => {
            let (d0, gap) = symmetric_difference_distance(ka, kb)?;
            if r > d0 {
                Ok((f64::INFINITY, gap))
            } else {
                Ok(((ca - cb).abs(), gap))
            }
        }
        (
            DualSide::Quad {
                m: m1,
                b: b1,
                c: c1,
            },
            DualSide::Quad {
                m: m2,
                b: b2,
                c: c2,
            },
        ) => {
            let n = m1.dim();
            let mut m = Matrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, m1.get(i, j) - m2.get(i, j));
                }
            }
            let b: Vec<f64> = b1.iter().zip(b2).map(|(x, y)| x - y).collect();
            let (lo, hi) = quad_extrema_on_ball(&m, &b, c1 - c2, r);
            Ok((
                lo.abs().max(hi.abs()),
                1e-12 * (1.0 + lo.abs().max(hi.abs())),
            ))
        }
        // One side an indicator: infinite as soon as the ball escapes its
        // domain; otherwise the indicator contributes a constant.
        (DualSide::Ind { body, c }, other) | (other, DualSide::Ind { body, c }) => {
            let rin = body.inradius_at_origin()?;
            if r > rin {
                return Ok((f64::INFINITY, 0.0));
            }
            match other {
                DualSide::Hom { body: kh, c: ch } => {
                    let (dmin, dmax) = hom_extrema(kh, None)?;
                    Ok((sup_abs_hom(ch - c, dmin, dmax, r), 0.0))
                }
                DualSide::Quad { m, b, c: cq } => {
                    let (lo, hi) = quad_extrema_on_ball(m, b, cq - c, r);
                    Ok((
                        lo.abs().max(hi.abs()),
                        1e-12 * (1.0 + lo.abs().max(hi.abs())),
                    ))
                }
                DualSide::Gen { .. } | DualSide::Ind { .. } => Ok(sup_abs_sampled(a, b, r, cfg)),
            }
        }
        (DualSide::Quad { m, b, c }, DualSide::Hom { body, c: ch })
        | (DualSide::Hom { body, c: ch }, DualSide::Quad { m, b, c }) => {
            sup_abs_quad_minus_hom(m, b, *c, body, *ch, r, 1440)
        }
        _ => Ok(sup_abs_sampled(a, b, r, cfg)),
    }
}

/// The conjugate sup-norm distance with a monotone-bisection fixed point.
pub fn delta_conjugate(
    u: &ConvexFunction,
    v: &ConvexFunction,
    cfg: &NumericConfig,
) -> Result<MetricResult> {
    let n = u.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    u.require_envelope()?;
    v.require_envelope()?;
    let a = dual_side(u, cfg)?;
    let b = dual_side(v, cfg)?;

    // Exact analytic case: two indicator conjugates.
    if let (DualSide::Ind { body: ka, c: ca }, DualSide::Ind { body: kb, c: cb }) = (&a, &b) {
        let (d0, gap) = symmetric_difference_distance(ka, kb)?;
        let lambda_jump = if d0.is_infinite() { 0.0 } else { 1.0 / d0 };
        let value = lambda_jump.max((ca - cb).abs());
        return Ok(MetricResult {
            value,
            truncation_bound: 0.0,
            quadrature_error: if d0.is_finite() { gap / (d0 * d0) } else { 0.0 },
            method: Method::Analytic,
            detail: None,
        });
    }

    let mut worst_gap = 0.0_f64;
    let mut g = |lambda: f64| -> Result<f64> {
        let (val, gap) = sup_abs_diff(&a, &b, 1.0 / lambda, cfg)?;
        worst_gap = worst_gap.max(gap);
        Ok(val)
    };

    // delta = 0 exactly when g vanishes for arbitrarily small lambda.
    let tiny = 1e-9;
    if g(tiny)? <= tiny {
        return Ok(MetricResult {
            value: 0.0,
            truncation_bound: 0.0,
            quadrature_error: worst_gap + tiny,
            method: method_for(&a, &b),
            detail: None,
        });
    }
    // Bracket: grow lambda until g(lambda) <= lambda.
    let mut hi = 1.0;
    let mut grow = 0;
    while g(hi)? > hi {
        hi *= 2.0;
        grow += 1;
        if grow > 120 {
            return Err(Error::Tolerance(
                "conjugate metric bracket did not close; inputs may not be coercive".into(),
            ));
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { tiny };
    if g(lo)? <= lo {
        lo = tiny;
    }
    for _ in 0..200 {
        if hi - lo <= cfg.fixed_point_tol * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid)? <= mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MetricResult {
        value: hi,
        truncation_bound: 0.0,
        quadrature_error: (hi - lo).max(0.0) + worst_gap,
        method: method_for(&a, &b),
        detail: None,
    })
}

fn method_for(a: &DualSide, b: &DualSide) -> Method {
    match (a, b) {
        (DualSide::Gen { .. }, _) | (_, DualSide::Gen { .. }) => Method::Grid,
        _ => Method::Analytic,
    }
}
