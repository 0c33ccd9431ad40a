//! Weight functions: positive, continuous, decreasing maps used to turn
//! convex functions into integrable quasi-concave layers.
//!
//! A weight belongs to the moment class `M(p, n)` when `zeta^p` has a
//! finite moment of order `n - 1`, and to `M0` when it is integrable on
//! `[0, inf)`. Both verdicts combine adaptive quadrature on a truncated
//! interval with an analytic tail certificate; tabulated weights cannot be
//! certified from finitely many samples and must declare a dominating
//! closed form, otherwise the verdict is inconclusive.
//!
//! The measure `nu` with `nu([t, inf)) = zeta(t)` is represented through
//! `eval`; by convention `zeta(+inf) = 0`, so compositions with functions
//! taking the value `+inf` need no domain restriction.

use crate::config::{EPS_INV, EPS_TAIL_REL};
use crate::error::{Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightForm {
    /// t -> exp(-c t), c > 0.
    Exponential { c: f64 },
    /// t -> (max(t, 0) + shift)^(-q), shift > 0. Constant left of zero.
    PowerTail { q: f64, shift: f64 },
    /// Strictly decreasing samples with monotone (linear) interpolation.
    Tabulated {
        ts: Vec<f64>,
        values: Vec<f64>,
        /// Closed form known to dominate the weight on the tail; without it
        /// no improper integral over the weight can be certified.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dominating: Option<Box<WeightForm>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Member,
    NotMember,
    Inconclusive,
}

/// Verdict with the computed integral value (estimate plus error bound).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentVerdict {
    pub membership: Membership,
    pub integral: f64,
    pub error: f64,
}

type CacheKey = (u64, u32);

#[derive(Debug, Clone)]
pub struct WeightFunction {
    form: WeightForm,
    cache: Arc<Mutex<std::collections::BTreeMap<CacheKey, MomentVerdict>>>,
}

impl Serialize for WeightFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.form.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let form = WeightForm::deserialize(d)?;
        WeightFunction::new(form).map_err(serde::de::Error::custom)
    }
}

impl WeightFunction {
    pub fn new(form: WeightForm) -> Result<Self> {
        match &form {
            WeightForm::Exponential { c } => {
                if !(*c > 0.0) {
                    return Err(Error::InvalidWeight(
                        "exponential rate must be positive".into(),
                    ));
                }
            }
            WeightForm::PowerTail { q, shift } => {
                if !(*q > 0.0 && *shift > 0.0) {
                    return Err(Error::InvalidWeight(
                        "power tail needs q > 0 and shift > 0".into(),
                    ));
                }
            }
            WeightForm::Tabulated { ts, values, .. } => {
                if ts.len() != values.len() || ts.len() < 2 {
                    return Err(Error::InvalidWeight(
                        "tabulated weight needs >= 2 samples".into(),
                    ));
                }
                for w in ts.windows(2) {
                    if w[0] >= w[1] {
                        return Err(Error::InvalidWeight(
                            "tabulated abscissae must increase".into(),
                        ));
                    }
                }
                for w in values.windows(2) {
                    if w[0] <= w[1] {
                        return Err(Error::InvalidWeight(
                            "tabulated values must strictly decrease".into(),
                        ));
                    }
                }
                if values.iter().any(|v| *v <= 0.0) {
                    return Err(Error::InvalidWeight(
                        "tabulated values must be positive".into(),
                    ));
                }
            }
        }
        Ok(Self {
            form,
            cache: Arc::new(Mutex::new(Default::default())),
        })
    }

    pub fn exponential(c: f64) -> Self {
        Self::new(WeightForm::Exponential { c }).expect("positive rate")
    }

    pub fn power_tail(q: f64, shift: f64) -> Self {
        Self::new(WeightForm::PowerTail { q, shift }).expect("valid power tail")
    }

    pub fn form(&self) -> &WeightForm {
        &self.form
    }

    /// zeta(t); accepts `t = +inf` and returns 0 by the tail convention.
    pub fn eval(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 0.0;
        }
        match &self.form {
            WeightForm::Exponential { c } => (-c * t).exp(),
            WeightForm::PowerTail { q, shift } => (t.max(0.0) + shift).powf(-q),
            WeightForm::Tabulated { ts, values, .. } => {
                if t <= ts[0] {
                    return values[0];
                }
                if t >= *ts.last().unwrap() {
                    return *values.last().unwrap();
                }
                let i = match ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(i) => return values[i],
                    Err(i) => i - 1,
                };
                let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    /// Supremum of the range (may be +inf for the exponential form).
    pub fn range_sup(&self) -> f64 {
        match &self.form {
            WeightForm::Exponential { .. } => f64::INFINITY,
            WeightForm::PowerTail { q, shift } => shift.powf(-q),
            WeightForm::Tabulated { values, .. } => values[0],
        }
    }

    /// Strict decrease on all of R. The power-tail form is flat left of
    /// zero, so it fails this even though its moments are finite.
    pub fn strictly_decreasing(&self) -> bool {
        match &self.form {
            WeightForm::Exponential { .. } => true,
            WeightForm::PowerTail { .. } => false,
            WeightForm::Tabulated { .. } => true,
        }
    }

    /// zeta^{-1}(s) to within `EPS_INV`. Errors when `s` is outside the
    /// range: that failure mode is exactly what makes a linear map fall
    /// outside the admissible class for isometries.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::WeightRange { value: s });
        }
        match &self.form {
            WeightForm::Exponential { c } => Ok(-s.ln() / c),
            WeightForm::PowerTail { q, shift } => {
                let sup = shift.powf(-q);
                if s > sup * (1.0 + 1e-12) {
                    return Err(Error::WeightRange { value: s });
                }
                Ok((s.min(sup).powf(-1.0 / q) - shift).max(0.0))
            }
            WeightForm::Tabulated { ts, values, .. } => {
                if s > values[0] * (1.0 + 1e-12) || s < *values.last().unwrap() * (1.0 - 1e-12) {
                    return Err(Error::WeightRange { value: s });
                }
                let (mut lo, mut hi) = (ts[0], *ts.last().unwrap());
                // zeta decreasing: zeta(lo) >= s >= zeta(hi).
                for _ in 0..200 {
                    if hi - lo <= EPS_INV {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) >= s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// Exact tail `\int_{t0}^\infty zeta(t)^p t^k dt` for `t0 >= 0`.
    /// Returns +inf when the integral diverges and an error when no
    /// certificate exists (tabulated weight without a dominating form).
    pub fn tail_moment(&self, p: f64, k: u32, t0: f64) -> Result<f64> {
        debug_assert!(t0 >= 0.0);
        match &self.form {
            WeightForm::Exponential { c } => Ok(exp_tail(p * c, k, t0)),
            WeightForm::PowerTail { q, shift } => Ok(power_tail_integral(p * q, *shift, k, t0)),
            WeightForm::Tabulated { dominating, .. } => match dominating {
                Some(d) => WeightFunction::new((**d).clone())?.tail_moment(p, k, t0),
                None => Err(Error::MembershipUnverified(
                    "tabulated weight has no dominating form for tail certification".into(),
                )),
            },
        }
    }

    /// Tail of the radial integral `\int_{|x| > R} zeta(a |x| + b)^p dx`
    /// over R^n, used as the truncation bound for every integral metric.
    pub fn tail_radial(&self, p: f64, a: f64, b: f64, radius: f64, n: usize) -> Result<f64> {
        debug_assert!(a > 0.0 && radius >= 0.0);
        let t0 = (a * radius + b).max(0.0);
        // n v_n / a^n * \int_{t0}^\infty zeta(t)^p ((t - b)/1)^{n-1} dt,
        // expanded binomially into plain tail moments.
        let surface = n as f64 * crate::body::unit_ball_volume(n);
        let mut total = 0.0;
        let m = n as u32 - 1;
        for j in 0..=m {
            let coeff = binom(m, j) * (-b).powi((m - j) as i32);
            let tm = self.tail_moment(p, j, t0)?;
            if tm.is_infinite() {
                return Ok(f64::INFINITY);
            }
            total += coeff * tm;
        }
        Ok((surface / a.powi(n as i32) * total).max(0.0))
    }

    /// Membership in the class `M(p, n)`: `zeta^p` has finite moment of
    /// order `n - 1`. Cached per `(p, n)`.
    pub fn check_membership(&self, p: f64, n: usize) -> MomentVerdict {
        let key = (p.to_bits(), n as u32);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let verdict = self.membership_uncached(p, n);
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(verdict.clone());
        verdict
    }

    fn membership_uncached(&self, p: f64, n: usize) -> MomentVerdict {
        let k = n as u32 - 1;
        let finite = match &self.form {
            WeightForm::Exponential { .. } => Some(true),
            WeightForm::PowerTail { q, .. } => Some(p * q > n as f64),
            WeightForm::Tabulated { dominating, .. } => match dominating {
                Some(d) => match WeightFunction::new((**d).clone()) {
                    Ok(dw) => dw.tail_moment(p, k, 0.0).ok().map(|t| t.is_finite()),
                    Err(_) => None,
                },
                None => None,
            },
        };
        match finite {
            None => MomentVerdict {
                membership: Membership::Inconclusive,
                integral: f64::NAN,
                error: f64::INFINITY,
            },
            Some(false) => MomentVerdict {
                membership: Membership::NotMember,
                integral: f64::INFINITY,
                error: 0.0,
            },
            Some(true) => {
                let (value, err) = self.moment_integral(p, k);
                MomentVerdict {
                    membership: Membership::Member,
                    integral: value,
                    error: err,
                }
            }
        }
    }

    /// Quadrature estimate of `\int_0^\infty zeta^p t^k dt` with the tail
    /// folded into the error bound.
    fn moment_integral(&self, p: f64, k: u32) -> (f64, f64) {
        let f = |t: f64| self.eval(t).powf(p) * t.powi(k as i32);
        let mut t_max = 8.0;
        let mut tail = self.tail_moment(p, k, t_max).unwrap_or(f64::INFINITY);
        for _ in 0..60 {
            let cur = quad::adaptive_simpson(&f, 0.0, t_max, 1e-12, 40).0;
            if tail.is_finite() && tail <= EPS_TAIL_REL * cur.abs().max(1e-12) {
                break;
            }
            t_max *= 2.0;
            tail = self.tail_moment(p, k, t_max).unwrap_or(f64::INFINITY);
        }
        let (value, qerr) = quad::adaptive_simpson(&f, 0.0, t_max, 1e-12, 40);
        (value + tail, qerr + tail)
    }

    /// Membership in `M0`: integrability of the weight itself on `[0, inf)`.
    /// Tracked separately from the moment classes; neither implies the other
    /// in general.
    pub fn check_membership_m0(&self) -> MomentVerdict {
        self.check_membership(1.0, 1)
    }

    /// Observed inclusion `M(p, n)` into `M(q, n)` for `p <= q`.
    pub fn membership_monotonicity_check(&self, p: f64, q: f64, n: usize) -> bool {
        debug_assert!(1.0 <= p && p <= q);
        let vp = self.check_membership(p, n).membership;
        let vq = self.check_membership(q, n).membership;
        match (vp, vq) {
            (Membership::Member, Membership::Member) => true,
            (Membership::Member, _) => false,
            _ => true,
        }
    }

    /// Probe-grid validation of positivity and monotone decrease.
    pub fn validate_on(&self, t_lo: f64, t_hi: f64, samples: usize) -> Result<()> {
        let mut prev = f64::INFINITY;
        for i in 0..=samples {
            let t = t_lo + (t_hi - t_lo) * i as f64 / samples as f64;
            let v = self.eval(t);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidWeight(format!(
                    "weight not positive finite at t={t}"
                )));
            }
            if v > prev + 1e-12 * prev.abs().max(1.0) {
                return Err(Error::InvalidWeight(format!("weight increases near t={t}")));
            }
            prev = v;
        }
        Ok(())
    }
}

fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// `\int_{t0}^\infty e^{-beta t} t^k dt` by the standard recurrence.
fn exp_tail(beta: f64, k: u32, t0: f64) -> f64 {
    let mut i = (-beta * t0).exp() / beta; // k = 0
    for j in 1..=k {
        i = (-beta * t0).exp() * t0.powi(j as i32) / beta + j as f64 / beta * i;
    }
    i
}

/// `\int_{t0}^\infty (t + s)^{-e} t^k dt`, +inf when it diverges.
fn power_tail_integral(e: f64, s: f64, k: u32, t0: f64) -> f64 {
    if e <= (k + 1) as f64 {
        return f64::INFINITY;
    }
    // Expand t^k = ((t+s) - s)^k.
    let mut total = 0.0;
    for j in 0..=k {
        let coeff = binom(k, j) * (-s).powi((k - j) as i32);
        let expo = j as f64 - e;
        total += coeff * (t0 + s).powf(expo + 1.0) / (-(expo + 1.0));
    }
    total.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_member_for_all_p_n() {
        let z = WeightFunction::exponential(1.0);
        for p in [1.0, 2.0, 3.0] {
            for n in [1usize, 2, 3] {
                let v = z.check_membership(p, n);
                assert_eq!(v.membership, Membership::Member);
                // Analytic moment (n-1)! / p^n.
                let fact: f64 = (1..n).map(|i| i as f64).product();
                let exact = fact / p.powi(n as i32);
                assert!(
                    (v.integral - exact).abs() <= 1e-8 + v.error,
                    "p={p} n={n}: {} vs {exact}",
                    v.integral
                );
            }
        }
    }

    #[test]
    fn power_tail_membership_boundary() {
        // Comparison-test oracle: \int_0^inf (t+s)^{-pq} t^{n-1} dt is
        // finite exactly when pq > n.
        let member = WeightFunction::power_tail(2.0, 1.0);
        assert_eq!(
            member.check_membership(1.0, 1).membership,
            Membership::Member
        );
        let not = WeightFunction::power_tail(1.0, 1.0);
        assert_eq!(
            not.check_membership(1.0, 1).membership,
            Membership::NotMember
        );
        // Numeric blow-up check for the divergent case: truncated integrals
        // keep growing with the cutoff.
        let f = |t: f64| not.eval(t);
        let i1 = quad::adaptive_simpson(&f, 0.0, 1e3, 1e-10, 40).0;
        let i2 = quad::adaptive_simpson(&f, 0.0, 1e6, 1e-10, 40).0;
        assert!(i2 > i1 + 5.0);
    }

    #[test]
    fn membership_monotone_in_p() {
        let z = WeightFunction::exponential(1.0);
        assert!(z.membership_monotonicity_check(1.0, 2.0, 2));
        let pt = WeightFunction::power_tail(1.2, 0.5);
        // pq barely above n at p = 1, n = 1; still above at q = 2.
        assert!(pt.membership_monotonicity_check(1.0, 2.0, 1));
        assert!(z.membership_monotonicity_check(2.0, 2.0, 2));
    }

    #[test]
    fn inverse_closed_forms() {
        let z = WeightFunction::exponential(1.0);
        assert!((z.inverse(1.0).unwrap() - 0.0).abs() < EPS_INV);
        let z2 = WeightFunction::exponential(2.0);
        assert!((z2.inverse((-4.0f64).exp()).unwrap() - 2.0).abs() < 1e-9);
        let pt = WeightFunction::power_tail(2.0, 1.0);
        let t = 3.0;
        assert!((pt.inverse(pt.eval(t)).unwrap() - t).abs() < 1e-9);
    }

    #[test]
    fn tabulated_inverse_by_bisection() {
        // Samples of e^{-t}: the inverse of 0.5 is ln 2.
        let ts: Vec<f64> = (0..=400).map(|i| -2.0 + i as f64 * 0.02).collect();
        let vals: Vec<f64> = ts.iter().map(|t| (-t).exp()).collect();
        let z = WeightFunction::new(WeightForm::Tabulated {
            ts,
            values: vals,
            dominating: Some(Box::new(WeightForm::Exponential { c: 1.0 })),
        })
        .unwrap();
        let inv = z.inverse(0.5).unwrap();
        assert!((inv - std::f64::consts::LN_2).abs() < 1e-4, "inv={inv}");
        assert_eq!(z.check_membership(1.0, 2).membership, Membership::Member);
    }

    #[test]
    fn tabulated_without_dominating_is_inconclusive() {
        let z = WeightFunction::new(WeightForm::Tabulated {
            ts: vec![0.0, 1.0, 2.0],
            values: vec![1.0, 0.5, 0.25],
            dominating: None,
        })
        .unwrap();
        assert_eq!(
            z.check_membership(1.0, 1).membership,
            Membership::Inconclusive
        );
    }

    #[test]
    fn out_of_range_inverse_errors() {
        let pt = WeightFunction::power_tail(2.0, 1.0);
        // sup of the range is shift^{-q} = 1.
        assert!(pt.inverse(2.0).is_err());
        assert!(pt.inverse(0.5).is_ok());
        let z = WeightFunction::exponential(1.0);
        assert!(z.inverse(0.0).is_err());
    }

    #[test]
    fn round_trip_identity_on_probe_range() {
        let z = WeightFunction::exponential(0.7);
        for i in 0..50 {
            let s = 0.01 + 0.05 * i as f64;
            let t = z.inverse(s).unwrap();
            assert!((z.eval(t) - s).abs() <= EPS_INV * (1.0 + s));
        }
    }

    #[test]
    fn strict_monotonicity_probes() {
        let z = WeightFunction::exponential(1.0);
        z.validate_on(-5.0, 10.0, 500).unwrap();
        assert!(z.strictly_decreasing());
        let pt = WeightFunction::power_tail(2.0, 1.0);
        pt.validate_on(-5.0, 10.0, 500).unwrap(); // decreasing, not strictly
        assert!(!pt.strictly_decreasing());
    }

    #[test]
    fn tail_radial_matches_quadrature() {
        // n = 2, zeta = e^{-t}: int_{|x|>R} e^{-(a|x|+b)} dx
        //   = 2 pi e^{-b} \int_R^inf e^{-a r} r dr.
        let z = WeightFunction::exponential(1.0);
        let (a, b, r0) = (0.5, -1.0, 3.0);
        let tail = z.tail_radial(1.0, a, b, r0, 2).unwrap();
        let f = |r: f64| (-(a * r + b)).exp() * r * std::f64::consts::TAU;
        let oracle = quad::adaptive_simpson(&f, r0, 200.0, 1e-12, 40).0;
        assert!(
            (tail - oracle).abs() < 1e-8 * oracle,
            "tail={tail} oracle={oracle}"
        );
    }
}
