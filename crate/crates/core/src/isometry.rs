//! Isometries of the weighted L^1 metric: maps u -> f(u compose alpha^{-1})
//! with alpha(x) = phi x + x0 and f(t) = zeta^{-1}(zeta(t) / |det phi|).
//!
//! A linear part is admissible when that scalar map is well-defined and
//! convex on R. Unimodular maps always qualify; for the exponential weight
//! f is affine (a vertical shift), for the power-tail weight f is
//! piecewise affine and the verdict is decided analytically. Tabulated
//! weights are certified on a probe window only and the verdict says so.

use crate::config::{NumericConfig, EPS_INV};
use crate::error::{Error, Result};
use crate::func::{ConvexFunction, GridFn, Shape};
use crate::linalg::Matrix;
use crate::metric::{delta_zeta_p, epigraph_measure};
use crate::weight::{WeightForm, WeightFunction};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PhiVerdict {
    Member { windowed: bool },
    NotMember { reason: String },
    Inconclusive,
}

impl PhiVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, PhiVerdict::Member { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometrySpec {
    pub phi: Matrix,
    pub x0: Vec<f64>,
    pub zeta: WeightFunction,
}

impl IsometrySpec {
    pub fn new(phi: Matrix, x0: Vec<f64>, zeta: WeightFunction) -> Result<Self> {
        if phi.dim() != x0.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                got: x0.len(),
            });
        }
        if phi.det().abs() < 1e-12 {
            return Err(Error::NotInPhi("linear part is singular".into()));
        }
        Ok(Self { phi, x0, zeta })
    }

    pub fn det_abs(&self) -> f64 {
        self.phi.det().abs()
    }

    /// The derived scalar map f(t) = zeta^{-1}(zeta(t) / |det phi|).
    pub fn scalar_map(&self, t: f64) -> Result<f64> {
        self.zeta.inverse(self.zeta.eval(t) / self.det_abs())
    }

    pub fn membership(&self, probe: (f64, f64)) -> PhiVerdict {
        check_phi_membership(&self.phi, &self.zeta, probe)
    }
}

/// Membership of phi in the admissible class for the weight: the scalar
/// map must be well-defined and convex on all of R. Analytic for the
/// closed-form weights, probe-window certification for tabulated ones.
pub fn check_phi_membership(phi: &Matrix, zeta: &WeightFunction, probe: (f64, f64)) -> PhiVerdict {
    let det = phi.det().abs();
    if det < 1e-12 {
        return PhiVerdict::NotMember {
            reason: "linear part is singular".into(),
        };
    }
    if (det - 1.0).abs() <= 1e-12 {
        // Unimodular maps always satisfy the conditions: f is the identity.
        return PhiVerdict::Member { windowed: false };
    }
    match zeta.form() {
        WeightForm::Exponential { .. } => PhiVerdict::Member { windowed: false },
        WeightForm::PowerTail { .. } => {
            if det >= 1.0 {
                // f is max(const, affine): convex, and zeta(t)/det stays
                // inside the range.
                PhiVerdict::Member { windowed: false }
            } else {
                PhiVerdict::NotMember {
                    reason: format!(
                        "weight is bounded as t -> -inf, so |det| = {det} < 1 leaves the range"
                    ),
                }
            }
        }
        WeightForm::Tabulated { .. } => {
            // Windowed verdict: dense midpoint convexity on the probe
            // interval; a failure anywhere is a definitive rejection.
            let m = 1000usize;
            let f = |t: f64| zeta.inverse(zeta.eval(t) / det);
            let mut vals = Vec::with_capacity(m + 1);
            for i in 0..=m {
                let t = probe.0 + (probe.1 - probe.0) * i as f64 / m as f64;
                match f(t) {
                    Ok(v) => vals.push(v),
                    Err(_) => {
                        return PhiVerdict::NotMember {
                            reason: format!("scalar map undefined at t = {t}"),
                        }
                    }
                }
            }
            let scale = vals.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
            for w in vals.windows(3) {
                if w[1] > 0.5 * (w[0] + w[2]) + 1e2 * EPS_INV * scale {
                    return PhiVerdict::NotMember {
                        reason: "scalar map fails midpoint convexity on the probe window".into(),
                    };
                }
            }
            PhiVerdict::Member { windowed: true }
        }
    }
}

/// u(Q x + q) for closed forms; used with Q = phi^{-1}, q = -phi^{-1} x0.
fn precompose_linear(
    u: &ConvexFunction,
    q_mat: &Matrix,
    q_vec: &[f64],
    directions: usize,
) -> Result<Option<ConvexFunction>> {
    match u.shape() {
        Shape::IndicatorPlus { body, offset } => {
            // {x : Qx + q in K} = Q^{-1}(K - q).
            let inv = q_mat
                .inverse()
                .map_err(|_| Error::NotInPhi("singular linear part".into()))?;
            let neg_q: Vec<f64> = q_vec.iter().map(|v| -v).collect();
            let moved = body.translate(&neg_q);
            let image = moved.affine_image(&inv, &vec![0.0; q_vec.len()], directions)?;
            Ok(Some(ConvexFunction::indicator(image, *offset)?))
        }
        Shape::Quadratic {
            matrix,
            linear,
            constant,
        } => {
            // (Qx + q)^T A (Qx + q) + <b, Qx + q> + c.
            let qt = q_mat.transpose();
            let m = qt.mul(&matrix.mul(q_mat));
            let aq = matrix.apply(q_vec);
            let mut lin = qt.apply(&aq);
            let qtb = qt.apply(linear);
            for i in 0..lin.len() {
                lin[i] = 2.0 * lin[i] + qtb[i];
            }
            let c = matrix.quadratic_form(q_vec)
                + linear.iter().zip(q_vec).map(|(b, x)| b * x).sum::<f64>()
                + constant;
            Ok(Some(ConvexFunction::quadratic(m, lin, c)?))
        }
        _ => Ok(None),
    }
}

/// Apply the isometry I(u) = f(u compose alpha^{-1}). Exact closed forms
/// for the exponential weight (vertical shift plus affine precomposition)
/// and for indicator inputs under any member weight; everything else is
/// re-sampled to a grid on the image box.
pub fn apply_isometry(
    spec: &IsometrySpec,
    u: &ConvexFunction,
    cfg: &NumericConfig,
) -> Result<ConvexFunction> {
    let n = u.dim();
    if spec.phi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: spec.phi.dim(),
        });
    }
    let (_, min_u) = u.global_min()?;
    let probe = (min_u - 5.0, min_u + 50.0);
    if !spec.membership(probe).is_member() {
        return Err(Error::NotInPhi(format!(
            "|det phi| = {} is not admissible for this weight",
            spec.det_abs()
        )));
    }
    let inv = spec
        .phi
        .inverse()
        .map_err(|_| Error::NotInPhi("singular linear part".into()))?;
    let q_vec: Vec<f64> = inv.apply(&spec.x0).iter().map(|v| -v).collect();

    // Exponential weight: f(t) = t + ln(det)/c, a vertical shift.
    if let WeightForm::Exponential { c } = spec.zeta.form() {
        let shift = spec.det_abs().ln() / c;
        if let Some(pre) = precompose_linear(u, &inv, &q_vec, cfg.directions)? {
            return ConvexFunction::shifted(pre, vec![0.0; n], shift);
        }
    }
    // Indicator inputs stay closed form under any member weight:
    // I(I_K + t) = I_{phi K + x0} + f(t).
    if let Shape::IndicatorPlus { body, offset } = u.shape() {
        let image = body.affine_image(&spec.phi, &spec.x0, cfg.directions)?;
        return ConvexFunction::indicator(image, spec.scalar_map(*offset)?);
    }
    // General route: evaluate x -> f(u(alpha^{-1} x)) on the image box.
    let dom = u.sublevel_set(min_u + 30.0)?;
    let r = dom.max_norm().unwrap_or(5.0) + 1.0;
    let corners: Vec<Vec<f64>> = match n {
        1 => vec![vec![-r], vec![r]],
        2 => vec![vec![-r, -r], vec![r, -r], vec![r, r], vec![-r, r]],
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                what: "isometry resampling",
            })
        }
    };
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for c in &corners {
        let y = spec.phi.apply(c);
        for i in 0..n {
            let v = y[i] + spec.x0[i];
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let shape = match n {
        1 => vec![cfg.dual_grid.clamp(257, 4097)],
        _ => vec![257, 257],
    };
    let spec2 = spec.clone();
    let g = GridFn::sample(lo, hi, shape, move |x| {
        let mut y = inv.apply(x);
        for i in 0..n {
            y[i] += q_vec[i];
        }
        let v = u.eval_unchecked(&y);
        if v.is_finite() {
            spec2.scalar_map(v).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        }
    });
    ConvexFunction::grid(g)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryRow {
    pub pair: usize,
    pub before: f64,
    pub after: f64,
    pub deviation: f64,
    pub budget: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryReport {
    pub rows: Vec<IsometryRow>,
    pub max_deviation: f64,
    pub max_budget: f64,
    pub pass: bool,
}

/// Numeric verification of the isometry property on a corpus of pairs:
/// |delta(I(u), I(v)) - delta(u, v)| must stay within the combined budget.
pub fn verify_isometry(
    spec: &IsometrySpec,
    pairs: &[(ConvexFunction, ConvexFunction)],
    cfg: &NumericConfig,
) -> Result<IsometryReport> {
    let mut rows = Vec::with_capacity(pairs.len());
    let mut max_dev = 0.0_f64;
    let mut max_budget = 0.0_f64;
    let mut pass = true;
    for (i, (u, v)) in pairs.iter().enumerate() {
        let before = delta_zeta_p(u, v, &spec.zeta, 1.0, cfg)?;
        let iu = apply_isometry(spec, u, cfg)?;
        let iv = apply_isometry(spec, v, cfg)?;
        let after = delta_zeta_p(&iu, &iv, &spec.zeta, 1.0, cfg)?;
        let deviation = (after.value - before.value).abs();
        let budget = before.budget() + after.budget() + 1e-9;
        pass &= deviation <= budget;
        max_dev = max_dev.max(deviation);
        max_budget = max_budget.max(budget);
        rows.push(IsometryRow {
            pair: i,
            before: before.value,
            after: after.value,
            deviation,
            budget,
        });
    }
    Ok(IsometryReport {
        rows,
        max_deviation: max_dev,
        max_budget,
        pass,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureRow {
    pub index: usize,
    pub before: f64,
    pub after: f64,
    pub deviation: f64,
    pub budget: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureReport {
    pub rows: Vec<MeasureRow>,
    pub pass: bool,
}

/// Isometries preserve the weighted epigraph measure; check it function
/// by function.
pub fn measure_preservation_check(
    spec: &IsometrySpec,
    corpus: &[ConvexFunction],
    cfg: &NumericConfig,
) -> Result<MeasureReport> {
    let mut rows = Vec::with_capacity(corpus.len());
    let mut pass = true;
    for (i, u) in corpus.iter().enumerate() {
        let before = epigraph_measure(u, &spec.zeta, cfg)?;
        let iu = apply_isometry(spec, u, cfg)?;
        let after = epigraph_measure(&iu, &spec.zeta, cfg)?;
        let deviation = (after.value - before.value).abs();
        let budget = before.budget() + after.budget() + 1e-9;
        pass &= deviation <= budget;
        rows.push(MeasureRow {
            index: i,
            before: before.value,
            after: after.value,
            deviation,
            budget,
        });
    }
    Ok(MeasureReport { rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::sampler;
    use rand::SeedableRng;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    fn exp_spec(phi: Matrix, x0: Vec<f64>, c: f64) -> IsometrySpec {
        IsometrySpec::new(phi, x0, WeightFunction::exponential(c)).unwrap()
    }

    #[test]
    fn unimodular_always_member() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let z = WeightFunction::exponential(1.0);
        for _ in 0..10 {
            let phi = sampler::random_unimodular_2d(&mut rng);
            assert!(check_phi_membership(&phi, &z, (-5.0, 5.0)).is_member());
        }
    }

    #[test]
    fn exponential_scalar_map_is_affine_shift() {
        let phi = Matrix::scaled_identity(2, 2.0); // det 4
        let spec = exp_spec(phi, vec![0.0, 0.0], 0.5);
        let shift = 4.0f64.ln() / 0.5;
        for t in [-2.0, 0.0, 3.0] {
            assert!((spec.scalar_map(t).unwrap() - (t + shift)).abs() < 1e-9);
        }
    }

    #[test]
    fn bounded_weight_rejects_small_determinant() {
        // Power-tail weights are bounded as t -> -inf: |det| < 1 fails.
        let z = WeightFunction::power_tail(2.0, 1.0);
        let phi = Matrix::scaled_identity(2, 0.5); // det 0.25
        assert!(matches!(
            check_phi_membership(&phi, &z, (-5.0, 5.0)),
            PhiVerdict::NotMember { .. }
        ));
        let phi_big = Matrix::scaled_identity(2, 2.0);
        assert!(check_phi_membership(&phi_big, &z, (-5.0, 5.0)).is_member());
    }

    #[test]
    fn identity_spec_is_identity_map() {
        let spec = exp_spec(Matrix::identity(2), vec![0.0, 0.0], 1.0);
        let u = sampler::random_quadratic_2d(&mut rand_chacha::ChaCha8Rng::seed_from_u64(4));
        let iu = apply_isometry(&spec, &u, &cfg()).unwrap();
        for p in [[0.0, 0.0], [1.0, -0.5], [-2.0, 0.3]] {
            assert!((iu.evaluate(&p).unwrap() - u.evaluate(&p).unwrap()).abs() < 1e-10);
        }
        // Unimodular specialization: f is the identity within inversion
        // tolerance whenever |det| = 1.
        for t in [-3.0, 0.0, 4.0] {
            assert!((spec.scalar_map(t).unwrap() - t).abs() < 1e-9);
        }
    }

    #[test]
    fn indicator_maps_to_translated_image() {
        let phi = Matrix::scaled_identity(2, 2.0);
        let spec = exp_spec(phi, vec![1.0, 0.0], 1.0);
        let k = ConvexBody::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let u = ConvexFunction::indicator(k, 0.5).unwrap();
        let iu = apply_isometry(&spec, &u, &cfg()).unwrap();
        // Image triangle is scaled by 2 and translated by (1, 0); the
        // offset moves by ln(4).
        let inside = [1.5, 0.2];
        let expect = 0.5 + 4.0f64.ln();
        assert!((iu.evaluate(&inside).unwrap() - expect).abs() < 1e-9);
        assert!(iu.evaluate(&[-1.0, 0.0]).unwrap().is_infinite());
    }

    #[test]
    fn example_map_is_isometry_on_indicator_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let phi = sampler::random_gl_2d(&mut rng, (0.6, 1.8));
        let spec = exp_spec(phi, vec![0.4, -0.3], 1.0);
        let pairs: Vec<_> = (0..5)
            .map(|_| {
                (
                    sampler::random_indicator_2d(&mut rng, 1.2, (-0.3, 0.6)),
                    sampler::random_indicator_2d(&mut rng, 1.2, (-0.3, 0.6)),
                )
            })
            .collect();
        let report = verify_isometry(&spec, &pairs, &cfg()).unwrap();
        assert!(
            report.pass,
            "max deviation {} budget {}",
            report.max_deviation, report.max_budget
        );
    }

    #[test]
    fn measure_preserved_on_quadratics() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let phi = sampler::random_gl_2d(&mut rng, (0.7, 1.5));
        let spec = exp_spec(phi, vec![0.2, 0.1], 1.0);
        let corpus = vec![
            sampler::random_quadratic_2d(&mut rng),
            sampler::random_quadratic_2d(&mut rng),
        ];
        let report = measure_preservation_check(&spec, &corpus, &cfg()).unwrap();
        assert!(report.pass, "rows {:?}", report.rows);
    }

    #[test]
    fn resampled_route_matches_scalar_map() {
        // Power-tail weight forces the grid route on quadratics: with
        // |det| = 2, q = 2, shift = 1 the scalar map on t >= 0 is
        // f(t) = sqrt(2)(t + 1) - 1, so I(u)(x) = f(u(x/2)).
        let spec = IsometrySpec::new(
            Matrix::scaled_identity(1, 2.0),
            vec![0.0],
            WeightFunction::power_tail(2.0, 1.0),
        )
        .unwrap();
        let u = ConvexFunction::quadratic(Matrix::identity(1), vec![0.0], 0.0).unwrap();
        let iu = apply_isometry(&spec, &u, &cfg()).unwrap();
        for x in [-2.0, -0.5, 0.0, 1.0, 2.5] {
            let expect = 2f64.sqrt() * (x * x / 4.0 + 1.0) - 1.0;
            let got = iu.evaluate(&[x]).unwrap();
            assert!((got - expect).abs() < 1e-3, "x={x}: {got} vs {expect}");
        }
    }

    #[test]
    fn measure_preserving_translation_is_not_isometry() {
        // u -> u(. - Psi(u) x0) preserves the measure but not distances:
        // reproduce the witness on two intervals of different mass.
        let z = WeightFunction::exponential(1.0);
        let c = cfg();
        let u = ConvexFunction::indicator(ConvexBody::interval(0.0, 1.0).unwrap(), 0.0).unwrap();
        let v = ConvexFunction::indicator(ConvexBody::interval(0.0, 2.0).unwrap(), 0.0).unwrap();
        let shift = |f: &ConvexFunction| {
            let psi = epigraph_measure(f, &z, &c).unwrap().value;
            ConvexFunction::shifted(f.clone(), vec![psi], 0.0).unwrap()
        };
        let (su, sv) = (shift(&u), shift(&v));
        let before = delta_zeta_p(&u, &v, &z, 1.0, &c).unwrap();
        let after = delta_zeta_p(&su, &sv, &z, 1.0, &c).unwrap();
        // Measures are preserved...
        for (orig, moved) in [(&u, &su), (&v, &sv)] {
            let a = epigraph_measure(orig, &z, &c).unwrap().value;
            let b = epigraph_measure(moved, &z, &c).unwrap().value;
            assert!((a - b).abs() < 1e-9);
        }
        // ... but the distance is not.
        let budget = before.budget() + after.budget() + 1e-9;
        assert!(
            (after.value - before.value).abs() > 3.0 * budget,
            "expected violation: before {} after {}",
            before.value,
            after.value
        );
    }
}
