//! Level-set Hausdorff integrals: the metric built on the bounded-penalty
//! extension of d_H, and the forced translation-invariant extension whose
//! integral blows up on vertical shifts.
//!
//! Both integrate a set distance between sublevel sets against the weight
//! decrement. Substituting s = zeta(t) turns the layer integral into an
//! s-integral over [0, zeta(min)]; the integrand jumps where a sublevel
//! set first becomes nonempty, so the s-range is split at both minima and
//! each piece integrated adaptively.

use super::{Method, MetricResult};
use crate::body::{self, ConvexBody};
use crate::config::{NumericConfig, EPS_TAIL_ABS};
use crate::error::{Error, Result};
use crate::func::ConvexFunction;
use crate::quad;
use crate::transform::as_indicator_plus_const;
use crate::weight::{Membership, WeightFunction};

/// delta^H: \int_0^inf hat-d_H({zeta(u) >= s}, {zeta(v) >= s}) ds with the
/// bounded-penalty empty-set extension.
pub fn delta_zeta_h(
    u: &ConvexFunction,
    v: &ConvexFunction,
    zeta: &WeightFunction,
    cfg: &NumericConfig,
) -> Result<MetricResult> {
    match zeta.check_membership_m0().membership {
        Membership::Member => {}
        _ => {
            return Err(Error::MembershipUnverified(
                "the level-set metric needs an integrable weight on [0, inf)".into(),
            ))
        }
    }
    let n = u.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    let env_u = u.require_envelope()?;
    let env_v = v.require_envelope()?;

    // Indicator pairs have the closed form
    // (zeta(s0) - zeta(t0)) max{1, d_H(K,{0})} + zeta(t0) d_H(K, L),
    // with (K, s0) the function of smaller offset.
    if let (Some((k, s0)), Some((l, t0))) = (as_indicator_plus_const(u), as_indicator_plus_const(v))
    {
        let (k, s0, l, t0) = if s0 <= t0 {
            (k, s0, l, t0)
        } else {
            (l, t0, k, s0)
        };
        let (dh, gap) = body::hausdorff_detailed(k, l)?;
        let penalty = k.max_norm()?.max(1.0);
        let value = (zeta.eval(s0) - zeta.eval(t0)) * penalty + zeta.eval(t0) * dh;
        return Ok(MetricResult {
            value,
            truncation_bound: 0.0,
            quadrature_error: zeta.eval(t0) * gap,
            method: Method::Analytic,
            detail: None,
        });
    }

    let (_, mu) = u.global_min()?;
    let (_, mv) = v.global_min()?;
    let (f_lo, m_lo, m_hi) = if mu <= mv {
        (u, mu, mv)
    } else {
        (v, mu.min(mv), mu.max(mv))
    };

    // Common cone envelope bounds both sublevel sets inside a ball of
    // radius (t - b)/a, which controls the integrand for large t.
    let a = env_u.0.min(env_v.0);
    let b = env_u.1.min(env_v.1);
    let mut t_max = (m_hi + 8.0).max(b + 1.0);
    let mut tail = tail_bound(zeta, a, b, t_max)?;
    let mut estimate = zeta.eval(m_lo).max(1e-6);
    for _ in 0..200 {
        if tail <= (cfg.eps_tail_rel * estimate).max(EPS_TAIL_ABS) {
            break;
        }
        t_max = b + (t_max - b) * 1.5;
        tail = tail_bound(zeta, a, b, t_max)?;
        estimate = estimate.max(1.0);
    }

    // Piece 1: one sublevel empty, s in (zeta(m_hi), zeta(m_lo)].
    let tol = cfg.quad_tol.max(1e-9);
    let mut value = 0.0;
    let mut qerr = 0.0;
    if m_hi > m_lo {
        let f = |s: f64| -> f64 {
            let t = match zeta.inverse(s) {
                Ok(t) => t,
                Err(_) => return 0.0,
            };
            let set = f_lo.sublevel_set(t).unwrap_or(ConvexBody::Empty);
            body::hausdorff_extended_hat(&set, &ConvexBody::Empty).unwrap_or(0.0)
        };
        let (v1, e1) = quad::adaptive_simpson(&f, zeta.eval(m_hi), zeta.eval(m_lo), tol, 24);
        value += v1;
        qerr += e1;
    }
    // Piece 2: both nonempty, s in [zeta(t_max), zeta(m_hi)].
    let f2 = |s: f64| -> f64 {
        let t = match zeta.inverse(s) {
            Ok(t) => t,
            Err(_) => return 0.0,
        };
        let su = u.sublevel_set(t).unwrap_or(ConvexBody::Empty);
        let sv = v.sublevel_set(t).unwrap_or(ConvexBody::Empty);
        body::hausdorff_extended_hat(&su, &sv).unwrap_or(0.0)
    };
    let (v2, e2) = quad::adaptive_simpson(&f2, zeta.eval(t_max), zeta.eval(m_hi), tol, 24);
    value += v2;
    qerr += e2;

    Ok(MetricResult {
        value: value.max(0.0),
        truncation_bound: tail,
        quadrature_error: qerr,
        method: Method::Grid,
        detail: None,
    })
}

/// \int_0^{s(T)} 2 (zeta^{-1}(s) - b)/a ds
///   = (2/a) ((T - b) zeta(T) + \int_T^inf zeta),  by parts.
fn tail_bound(zeta: &WeightFunction, a: f64, b: f64, t_max: f64) -> Result<f64> {
    let int_tail = zeta.tail_moment(1.0, 0, t_max.max(0.0))?;
    Ok((2.0 / a) * ((t_max - b) * zeta.eval(t_max) + int_tail).max(0.0))
}

/// The integral metric under the forced translation-invariant extension
/// (with the standard unit-rate exponential layers): any gap between the
/// two minima puts an infinite set distance on an s-interval of positive
/// length, so the value is +inf there. Finite only when the minima agree.
pub fn tilde_integral(
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
    let zeta = WeightFunction::exponential(1.0);
    let env_u = u.require_envelope()?;
    let env_v = v.require_envelope()?;
    let (_, mu) = u.global_min()?;
    let (_, mv) = v.global_min()?;
    if (mu - mv).abs() > 1e-9 {
        return Ok(MetricResult {
            value: f64::INFINITY,
            truncation_bound: 0.0,
            quadrature_error: 0.0,
            method: Method::Analytic,
            detail: Some(format!(
                "min levels differ ({mu} vs {mv}): the extension assigns +inf on a set of positive measure"
            )),
        });
    }
    // Equal minima: identical empty/nonempty pattern, integrate d_H.
    let a = env_u.0.min(env_v.0);
    let b = env_u.1.min(env_v.1);
    let m_hi = mu.max(mv);
    let mut t_max = (m_hi + 8.0).max(b + 1.0);
    let mut tail = tail_bound(&zeta, a, b, t_max)?;
    for _ in 0..200 {
        if tail <= (cfg.eps_tail_rel * zeta.eval(mu).max(1.0)).max(EPS_TAIL_ABS) {
            break;
        }
        t_max = b + (t_max - b) * 1.5;
        tail = tail_bound(&zeta, a, b, t_max)?;
    }
    let f = |s: f64| -> f64 {
        let t = match zeta.inverse(s) {
            Ok(t) => t,
            Err(_) => return 0.0,
        };
        let su = u.sublevel_set(t).unwrap_or(ConvexBody::Empty);
        let sv = v.sublevel_set(t).unwrap_or(ConvexBody::Empty);
        body::hausdorff_extended_tilde(&su, &sv).unwrap_or(0.0)
    };
    let (value, qerr) = quad::adaptive_simpson(
        &f,
        zeta.eval(t_max),
        zeta.eval(m_hi),
        cfg.quad_tol.max(1e-9),
        24,
    );
    Ok(MetricResult {
        value: value.max(0.0),
        truncation_bound: tail,
        quadrature_error: qerr,
        method: Method::Grid,
        detail: None,
    })
}
