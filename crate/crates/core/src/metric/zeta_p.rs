//! The weighted L^p metric on coercive convex functions with
//! full-dimensional domain, the epigraph measure behind its p = 1 case,
//! and the norm-convergence diagnostic used as a test oracle.

use super::{EpiMeasure, Method, MetricResult};
use crate::body;
use crate::config::{NumericConfig, EPS_TAIL_ABS};
use crate::error::{Error, Result};
use crate::family::SequenceFamily;
use crate::func::ConvexFunction;
use crate::quad;
use crate::transform::as_indicator_plus_const;
use crate::weight::{Membership, WeightFunction};
use serde::{Deserialize, Serialize};

/// Truncation radius: grow until the analytic tail of the weighted
/// integrand drops below the relative target. Returns `(radius, tail)`.
fn truncation_radius(
    zeta: &WeightFunction,
    p: f64,
    envelopes: &[(f64, f64)],
    n: usize,
    start: f64,
    estimate_hint: f64,
    eps_tail_rel: f64,
) -> Result<(f64, f64)> {
    let mut r = start.max(1.0);
    let target = (eps_tail_rel * estimate_hint.abs()).max(EPS_TAIL_ABS);
    let tail_at = |r: f64| -> Result<f64> {
        let mut t = 0.0;
        for (a, b) in envelopes {
            t += zeta.tail_radial(p, *a, *b, r, n)?;
        }
        Ok(t)
    };
    let mut tail = tail_at(r)?;
    for _ in 0..240 {
        if tail <= target {
            return Ok((r, tail));
        }
        r *= 1.5;
        tail = tail_at(r)?;
    }
    // Radius capped; report the residual honestly instead of spinning.
    Ok((r, tail))
}

fn integrate_box<F>(
    f: F,
    n: usize,
    r: f64,
    landmarks: &[f64],
    cfg: &NumericConfig,
) -> Result<(f64, f64, Method)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match n {
        1 => {
            let (v, e) = quad::adaptive_simpson_split(
                &|x| f(&[x]),
                -r,
                r,
                landmarks,
                cfg.quad_tol,
                cfg.quad_max_depth,
            );
            Ok((v, e, Method::Grid))
        }
        2 => {
            let (v, e) = quad::midpoint_2d(
                &|x, y| f(&[x, y]),
                [-r, -r],
                [r, r],
                cfg.grid_2d,
                cfg.refine_2d,
            );
            Ok((v, e, Method::Grid))
        }
        _ => {
            let lo = vec![-r; n];
            let hi = vec![r; n];
            let (v, e) = quad::monte_carlo_box(&|x| f(x), &lo, &hi, cfg.mc_samples, cfg.seed);
            Ok((v, e, Method::MonteCarlo))
        }
    }
}

fn require_member(zeta: &WeightFunction, p: f64, n: usize) -> Result<()> {
    match zeta.check_membership(p, n).membership {
        Membership::Member => Ok(()),
        Membership::NotMember => Err(Error::MembershipUnverified(format!(
            "weight fails the moment condition for p={p}, n={n}"
        ))),
        Membership::Inconclusive => Err(Error::MembershipUnverified(format!(
            "weight membership inconclusive for p={p}, n={n}"
        ))),
    }
}

fn require_full_dim(f: &ConvexFunction, what: &str) -> Result<()> {
    if f.is_full_dimensional()? {
        Ok(())
    } else {
        Err(Error::NotFullDimensional(format!(
            "{what}: the weighted L^p metric requires a full-dimensional domain"
        )))
    }
}

/// Psi(epi u) = \int zeta(u(x)) dx, finite for coercive u when the weight
/// has a finite first moment of order n - 1.
pub fn epigraph_measure(
    u: &ConvexFunction,
    zeta: &WeightFunction,
    cfg: &NumericConfig,
) -> Result<EpiMeasure> {
    let n = u.dim();
    require_member(zeta, 1.0, n)?;
    let env = u.require_envelope()?;

    // Indicator fast path: zeta(t) V_n(K), exact up to the body enclosure.
    if let Some((k, t)) = as_indicator_plus_const(u) {
        let (vlo, vhi) = k.volume_bounds();
        return Ok(EpiMeasure {
            value: zeta.eval(t) * 0.5 * (vlo + vhi),
            truncation_bound: 0.0,
            quadrature_error: zeta.eval(t) * 0.5 * (vhi - vlo),
            method: Method::Analytic,
        });
    }

    let (argmin, min_v) = u.global_min()?;
    let start = starting_radius(u, min_v)?;
    let rough = zeta.eval(min_v); // scale hint only
    let (r, tail) = truncation_radius(
        zeta,
        1.0,
        &[env],
        n,
        start,
        rough.max(1e-6),
        cfg.eps_tail_rel,
    )?;
    let landmarks = [argmin[0]];
    let (value, qerr, method) =
        integrate_box(|x| zeta.eval(u.eval_unchecked(x)), n, r, &landmarks, cfg)?;
    Ok(EpiMeasure {
        value: value.max(0.0),
        truncation_bound: tail,
        quadrature_error: qerr,
        method,
    })
}

fn starting_radius(u: &ConvexFunction, min_v: f64) -> Result<f64> {
    let s = u.sublevel_set(min_v + 5.0)?;
    Ok(match s {
        body::ConvexBody::Empty => 1.0,
        other => other.max_norm().unwrap_or(1.0) + 1.0,
    })
}

/// (\int |zeta(u) - zeta(v)|^p)^{1/p} on the common truncation box, with
/// the tail bounded by the sum of the two weighted tails.
pub fn delta_zeta_p(
    u: &ConvexFunction,
    v: &ConvexFunction,
    zeta: &WeightFunction,
    p: f64,
    cfg: &NumericConfig,
) -> Result<MetricResult> {
    if !(p >= 1.0) {
        return Err(Error::InvalidConfig(format!("p must be >= 1, got {p}")));
    }
    let n = u.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    require_member(zeta, p, n)?;
    require_full_dim(u, "dim dom < n (left operand)")?;
    require_full_dim(v, "dim dom < n (right operand)")?;
    let env_u = u.require_envelope()?;
    let env_v = v.require_envelope()?;

    // Indicator pairs are exact: the integrand is piecewise constant on
    // K cap L, K \ L and L \ K.
    if let (Some((k, s)), Some((l, t))) = (as_indicator_plus_const(u), as_indicator_plus_const(v)) {
        let (inter, ierr) = body::intersection_volume(k, l, cfg.mc_samples, cfg.seed)?;
        let (zs, zt) = (zeta.eval(s), zeta.eval(t));
        let vk = k.volume();
        let vl = l.volume();
        let ip = (zs - zt).abs().powf(p) * inter
            + zs.powf(p) * (vk - inter).max(0.0)
            + zt.powf(p) * (vl - inter).max(0.0);
        let value = ip.powf(1.0 / p);
        let slack = ierr * ((zs - zt).abs().powf(p) + zs.powf(p) + zt.powf(p));
        let budget = ((ip + slack).powf(1.0 / p) - value).max(0.0);
        return Ok(MetricResult {
            value,
            truncation_bound: 0.0,
            quadrature_error: budget,
            method: Method::Analytic,
            detail: Some(format!(
                "V(K)={vk:.12} V(L)={vl:.12} V(K cap L)={inter:.12}"
            )),
        });
    }

    let (xu, mu) = u.global_min()?;
    let (xv, mv) = v.global_min()?;
    let start = starting_radius(u, mu)?.max(starting_radius(v, mv)?);
    let hint = zeta.eval(mu.min(mv)).max(1e-6);
    let (r, tail) = truncation_radius(zeta, p, &[env_u, env_v], n, start, hint, cfg.eps_tail_rel)?;
    let landmarks = [xu[0], xv[0]];
    let (ip, qerr, method) = integrate_box(
        |x| {
            let a = zeta.eval(u.eval_unchecked(x));
            let b = zeta.eval(v.eval_unchecked(x));
            (a - b).abs().powf(p)
        },
        n,
        r,
        &landmarks,
        cfg,
    )?;
    let ip = ip.max(0.0);
    let value = ip.powf(1.0 / p);
    // Conservative enclosure of the p-th root under both error sources.
    let vhi = (ip + qerr + tail).powf(1.0 / p);
    let vlo = (ip - qerr).max(0.0).powf(1.0 / p);
    let truncation = ((ip + tail).powf(1.0 / p) - value).max(0.0);
    Ok(MetricResult {
        value,
        truncation_bound: truncation,
        quadrature_error: (vhi - value).max(value - vlo).max(truncation) - truncation,
        method,
        detail: None,
    })
}

/// The p = 1 distance through the epigraph measure:
/// Psi(u) + Psi(v) - 2 Psi(u v max), an independent route used as a
/// cross-check oracle for [`delta_zeta_p`].
pub fn delta_zeta_1_via_measure(
    u: &ConvexFunction,
    v: &ConvexFunction,
    zeta: &WeightFunction,
    cfg: &NumericConfig,
) -> Result<MetricResult> {
    let n = u.dim();
    require_member(zeta, 1.0, n)?;
    require_full_dim(u, "dim dom < n (left operand)")?;
    require_full_dim(v, "dim dom < n (right operand)")?;

    if let (Some((k, s)), Some((l, t))) = (as_indicator_plus_const(u), as_indicator_plus_const(v)) {
        // Psi(max(u, v)) = zeta(max(s,t)) V(K cap L).
        let (inter, ierr) = body::intersection_volume(k, l, cfg.mc_samples, cfg.seed)?;
        let (zs, zt) = (zeta.eval(s), zeta.eval(t));
        let value = (zs * k.volume() + zt * l.volume() - 2.0 * zt.min(zs) * inter).max(0.0);
        return Ok(MetricResult {
            value,
            truncation_bound: 0.0,
            quadrature_error: 2.0 * zt.min(zs) * ierr,
            method: Method::Analytic,
            detail: None,
        });
    }

    let pu = epigraph_measure(u, zeta, cfg)?;
    let pv = epigraph_measure(v, zeta, cfg)?;
    let w = ConvexFunction::maximum(vec![u.clone(), v.clone()])?;
    let pw = epigraph_measure(&w, zeta, cfg)?;
    Ok(MetricResult {
        value: (pu.value + pv.value - 2.0 * pw.value).max(0.0),
        truncation_bound: pu.truncation_bound + pv.truncation_bound + 2.0 * pw.truncation_bound,
        quadrature_error: pu.quadrature_error + pv.quadrature_error + 2.0 * pw.quadrature_error,
        method: pw.method,
        detail: None,
    })
}

/// `(\int zeta(u)^p)^{1/p}` with budget, the L^p norm of the composed
/// layer function.
pub fn weighted_lp_norm(
    u: Option<&ConvexFunction>,
    zeta: &WeightFunction,
    p: f64,
    n: usize,
    cfg: &NumericConfig,
) -> Result<MetricResult> {
    let Some(u) = u else {
        return Ok(MetricResult::analytic(0.0));
    };
    let env = u.require_envelope()?;
    require_member(zeta, p, n)?;
    if let Some((k, t)) = as_indicator_plus_const(u) {
        return Ok(MetricResult::analytic(
            zeta.eval(t) * k.volume().powf(1.0 / p),
        ));
    }
    let (xm, mu) = u.global_min()?;
    let start = starting_radius(u, mu)?;
    let (r, tail) = truncation_radius(
        zeta,
        p,
        &[env],
        n,
        start,
        zeta.eval(mu).max(1e-6),
        cfg.eps_tail_rel,
    )?;
    let landmarks = [xm[0]];
    let (ip, qerr, method) = integrate_box(
        |x| zeta.eval(u.eval_unchecked(x)).powf(p),
        n,
        r,
        &landmarks,
        cfg,
    )?;
    let value = ip.max(0.0).powf(1.0 / p);
    let vhi = (ip.max(0.0) + qerr + tail).powf(1.0 / p);
    Ok(MetricResult {
        value,
        truncation_bound: 0.0,
        quadrature_error: (vhi - value).max(0.0),
        method,
        detail: None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheffeRow {
    pub k: u64,
    /// || zeta(u_k) - zeta(u) ||_p
    pub lp_difference: f64,
    /// || zeta(u_k) ||_p
    pub lp_member: f64,
    pub budget: f64,
}

/// Comparison of the two convergence statements along a sequence:
/// the L^p distance to the limit layer tends to zero exactly when the
/// member norms tend to the limit norm (under declared pointwise
/// convergence). Used as a test oracle for the norm-convergence route.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheffeReport {
    pub rows: Vec<ScheffeRow>,
    /// || zeta(u) ||_p of the declared limit (0 when none).
    pub lp_limit: f64,
    pub difference_converges: bool,
    pub norms_converge: bool,
    /// Whether the two statements agree, as they must under declared
    /// pointwise convergence.
    pub consistent: bool,
}

pub fn scheffe_check(
    family: &SequenceFamily,
    ks: &[u64],
    zeta: &WeightFunction,
    p: f64,
    tol: f64,
    cfg: &NumericConfig,
) -> Result<ScheffeReport> {
    let limit = family.limit()?;
    let n = family.member(1)?.dim();
    let lim_norm = weighted_lp_norm(limit.as_ref(), zeta, p, n, cfg)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let uk = family.member(k)?;
        let diff = match &limit {
            Some(ul) => delta_zeta_p(&uk, ul, zeta, p, cfg)?,
            None => weighted_lp_norm(Some(&uk), zeta, p, n, cfg)?,
        };
        let norm_k = weighted_lp_norm(Some(&uk), zeta, p, n, cfg)?;
        rows.push(ScheffeRow {
            k,
            lp_difference: diff.value,
            lp_member: norm_k.value,
            budget: diff.budget() + norm_k.budget(),
        });
    }
    let last = rows
        .last()
        .ok_or_else(|| Error::InvalidConfig("empty index list".into()))?;
    let difference_converges = last.lp_difference <= tol + last.budget;
    let norms_converge =
        (last.lp_member - lim_norm.value).abs() <= tol + last.budget + lim_norm.budget();
    Ok(ScheffeReport {
        rows,
        lp_limit: lim_norm.value,
        difference_converges,
        norms_converge,
        consistent: difference_converges == norms_converge,
    })
}
