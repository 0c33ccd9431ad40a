//! Legendre-Fenchel conjugation, inf-convolution and coercivity
//! classification via conjugate domains.
//!
//! Closed forms map to closed forms: indicators and support functions
//! exchange, positive-definite quadratics stay quadratic, cones become
//! ball indicators. Grids go through the discrete Legendre transform: a
//! convex-hull-of-slopes sweep per axis (monotone chain), applied
//! separably in 2-d, which computes the exact discrete conjugate of the
//! sampled data in linear time per axis. The dual box is the slope range
//! of the data; outside it the conjugate continues affinely and is never
//! needed for biconjugation over the primal box.

use crate::body::{self, ConvexBody};
use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::func::{ConvexFunction, GridFn, Shape};
use crate::linalg::Matrix;
use crate::par;
use serde::{Deserialize, Serialize};

/// A conjugate together with the box on which its values are resolved and
/// the maximal dual-feasibility violation observed on probe pairs.
#[derive(Debug, Clone)]
pub struct ConjugateResult {
    pub function: ConvexFunction,
    pub domain_box: (Vec<f64>, Vec<f64>),
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coercivity {
    NotCoercive,
    Coercive,
    SuperCoercive,
}

/// The Legendre-Fenchel transform u*(y) = sup_x (<x,y> - u(x)).
pub fn conjugate(f: &ConvexFunction, cfg: &NumericConfig) -> Result<ConjugateResult> {
    conjugate_covering(f, cfg, None)
}

/// Conjugation with a requested dual box: grid routes resolve the result
/// at least on `cover` (the sweep is exact at any dual node, so widening
/// costs only nodes). Needed so a biconjugate is resolved on the primal
/// box even when the conjugate is flat.
fn conjugate_covering(
    f: &ConvexFunction,
    cfg: &NumericConfig,
    cover: Option<(&[f64], &[f64])>,
) -> Result<ConjugateResult> {
    if let Some(g) = conjugate_closed_form(f)? {
        let r = default_box_radius(f);
        let result = ConjugateResult {
            function: g,
            domain_box: (vec![-r; f.dim()], vec![r; f.dim()]),
            accuracy: 0.0,
        };
        return Ok(result);
    }
    conjugate_via_grid(f, cfg, cover)
}

/// Closed-form conjugates; `None` when only the grid route applies.
pub fn conjugate_closed_form(f: &ConvexFunction) -> Result<Option<ConvexFunction>> {
    let out = match f.shape() {
        Shape::IndicatorPlus { body, offset } => {
            let h = ConvexFunction::support_fn(body.clone())?;
            Some(add_constant(h, -offset)?)
        }
        Shape::SupportFn { body } => Some(ConvexFunction::indicator(body.clone(), 0.0)?),
        Shape::NormCone { lambda } => Some(ConvexFunction::indicator(
            ConvexBody::ball(vec![0.0; f.dim()], 1.0 / lambda)?,
            0.0,
        )?),
        Shape::AffineNorm { a, b } => Some(ConvexFunction::indicator(
            ConvexBody::ball(vec![0.0; f.dim()], *a)?,
            -b,
        )?),
        Shape::Quadratic {
            matrix,
            linear,
            constant,
        } => {
            let inv = match matrix.inverse() {
                Ok(i) => i,
                Err(_) => return Ok(None), // singular: conjugate is not a quadratic
            };
            // u = x^T A x + <b,x> + c  =>  u* = (y-b)^T A^{-1} (y-b)/4 - c.
            let m = inv.scale(0.25);
            let half_invb: Vec<f64> = inv.apply(linear).iter().map(|v| 0.5 * v).collect();
            let lin: Vec<f64> = half_invb.iter().map(|v| -v).collect();
            let c = 0.25 * inv.quadratic_form(linear) - constant;
            Some(ConvexFunction::quadratic(m, lin, c)?)
        }
        Shape::Shifted { inner, x0, t0 } => {
            // (u(.-x0) + t0)* = u* + <x0, .> - t0; only representable in
            // closed form when the linear term can be absorbed.
            if x0.iter().all(|v| *v == 0.0) {
                match conjugate_closed_form(inner)? {
                    Some(ci) => Some(add_constant(ci, -t0)?),
                    None => None,
                }
            } else if let Shape::Quadratic { .. } = inner.shape() {
                // Shifted quadratics are simplified at construction, so
                // this arm is not reachable; keep the fallback honest.
                None
            } else {
                None
            }
        }
        Shape::Maximum { .. } | Shape::Grid(_) => None,
    };
    Ok(out)
}

/// u + c in closed form.
fn add_constant(f: ConvexFunction, c: f64) -> Result<ConvexFunction> {
    if c == 0.0 {
        return Ok(f);
    }
    let n = f.dim();
    ConvexFunction::shifted(f, vec![0.0; n], c)
}

/// Recognize `h(K, .) + c` whether bare or wrapped in a zero shift.
pub fn as_support_plus_const(f: &ConvexFunction) -> Option<(&ConvexBody, f64)> {
    match f.shape() {
        Shape::SupportFn { body } => Some((body, 0.0)),
        Shape::Shifted { inner, x0, t0 } if x0.iter().all(|v| *v == 0.0) => match inner.shape() {
            Shape::SupportFn { body } => Some((body, *t0)),
            _ => None,
        },
        _ => None,
    }
}

/// Recognize `I_K + c`.
pub fn as_indicator_plus_const(f: &ConvexFunction) -> Option<(&ConvexBody, f64)> {
    match f.shape() {
        Shape::IndicatorPlus { body, offset } => Some((body, *offset)),
        _ => None,
    }
}

fn default_box_radius(f: &ConvexFunction) -> f64 {
    f.envelope()
        .map(|(a, b)| {
            let m = f.global_min().map(|(_, v)| v).unwrap_or(0.0);
            ((m + 10.0 - b) / a).abs().max(1.0)
        })
        .unwrap_or(10.0)
}

/// u** = (u*)*. Equal to u for proper l.s.c. convex inputs; grid inputs
/// come back as the convex hull of their sampled epigraph points.
pub fn biconjugate(f: &ConvexFunction, cfg: &NumericConfig) -> Result<ConvexFunction> {
    let c1 = conjugate(f, cfg)?;
    // Resolve the second conjugate on the primal box of the input.
    let (lo, hi) = primal_box(f);
    let c2 = conjugate_covering(&c1.function, cfg, Some((&lo, &hi)))?;
    Ok(c2.function)
}

fn primal_box(f: &ConvexFunction) -> (Vec<f64>, Vec<f64>) {
    match f.shape() {
        Shape::Grid(g) => (g.lo.clone(), g.hi.clone()),
        _ => {
            let r = default_box_radius(f);
            (vec![-r; f.dim()], vec![r; f.dim()])
        }
    }
}

/// Inf-convolution by the conjugate route `(u* + v*)*`; both inputs must
/// be coercive so the value stays above -inf.
pub fn inf_convolution(
    u: &ConvexFunction,
    v: &ConvexFunction,
    cfg: &NumericConfig,
) -> Result<ConvexFunction> {
    u.require_envelope()?;
    v.require_envelope()?;
    let cu = conjugate(u, cfg)?;
    let cv = conjugate(v, cfg)?;
    let sum = match try_add_closed(&cu.function, &cv.function)? {
        Some(s) => s,
        None => sample_sum_to_grid(&cu.function, &cv.function, cfg)?,
    };
    Ok(conjugate(&sum, cfg)?.function)
}

/// Closed-form pointwise sums that stay in the representable class.
fn try_add_closed(a: &ConvexFunction, b: &ConvexFunction) -> Result<Option<ConvexFunction>> {
    // Zero support functions (h of the origin point) are the identity.
    if is_zero_support(a) {
        return Ok(Some(b.clone()));
    }
    if is_zero_support(b) {
        return Ok(Some(a.clone()));
    }
    if let (Some((ka, ca)), Some((kb, cb))) = (as_support_plus_const(a), as_support_plus_const(b)) {
        // h_K + h_L = h_{K+L}.
        let sum = body::minkowski_sum(ka, kb, 720)?;
        let h = ConvexFunction::support_fn(sum)?;
        return Ok(Some(add_constant(h, ca + cb)?));
    }
    if let (
        Shape::Quadratic {
            matrix: m1,
            linear: l1,
            constant: c1,
        },
        Shape::Quadratic {
            matrix: m2,
            linear: l2,
            constant: c2,
        },
    ) = (a.shape(), b.shape())
    {
        let n = a.dim();
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, m1.get(i, j) + m2.get(i, j));
            }
        }
        let lin: Vec<f64> = l1.iter().zip(l2).map(|(x, y)| x + y).collect();
        return Ok(Some(ConvexFunction::quadratic(m, lin, c1 + c2)?));
    }
    // Support function of a single point is a linear term: absorb into a
    // quadratic partner.
    for (s, q) in [(a, b), (b, a)] {
        if let (
            Some((k, c0)),
            Shape::Quadratic {
                matrix,
                linear,
                constant,
            },
        ) = (as_support_plus_const(s), q.shape())
        {
            if let Some(pt) = point_of(k) {
                let lin: Vec<f64> = linear.iter().zip(&pt).map(|(x, y)| x + y).collect();
                return Ok(Some(ConvexFunction::quadratic(
                    matrix.clone(),
                    lin,
                    constant + c0,
                )?));
            }
        }
    }
    // Two indicators add to the indicator of the intersection, kept as a
    // pointwise maximum (offsets add).
    if let (Some((ka, sa)), Some((kb, sb))) =
        (as_indicator_plus_const(a), as_indicator_plus_const(b))
    {
        let ia = ConvexFunction::indicator(ka.clone(), sa + sb)?;
        let ib = ConvexFunction::indicator(kb.clone(), sa + sb)?;
        return Ok(Some(ConvexFunction::maximum(vec![ia, ib])?));
    }
    Ok(None)
}

fn is_zero_support(f: &ConvexFunction) -> bool {
    match as_support_plus_const(f) {
        Some((k, c)) => {
            c == 0.0
                && point_of(k)
                    .map(|p| p.iter().all(|v| *v == 0.0))
                    .unwrap_or(false)
        }
        None => false,
    }
}

fn point_of(k: &ConvexBody) -> Option<Vec<f64>> {
    match k {
        ConvexBody::Ball { center, radius } if *radius == 0.0 => Some(center.clone()),
        ConvexBody::Polygon2d { vertices } if vertices.len() == 1 => {
            Some(vec![vertices[0][0], vertices[0][1]])
        }
        _ => None,
    }
}

fn sample_sum_to_grid(
    a: &ConvexFunction,
    b: &ConvexFunction,
    cfg: &NumericConfig,
) -> Result<ConvexFunction> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    let r = default_box_radius(a).max(default_box_radius(b));
    let (lo, hi) = (vec![-r; n], vec![r; n]);
    let shape = match n {
        1 => vec![cfg.dual_grid.max(64)],
        2 => vec![257, 257],
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                what: "grid-sampled sums",
            })
        }
    };
    let g = GridFn::sample(lo, hi, shape, |x| a.eval_unchecked(x) + b.eval_unchecked(x));
    ConvexFunction::grid(g)
}

// --- discrete Legendre transform ------------------------------------------

/// Lower convex hull of `(x, v)` pairs sorted by x (strictly increasing).
fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Keep slopes strictly increasing.
            if (b.1 - a.1) * (p.0 - b.0) >= (p.1 - b.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Exact discrete conjugate of sampled 1-d data at the sorted dual nodes:
/// `max_i (x_i y - v_i)`, linear time by a two-pointer sweep.
fn legendre_sweep(points: &[(f64, f64)], ys: &[f64]) -> Vec<f64> {
    let hull = lower_hull(points);
    let mut j = 0usize;
    ys.iter()
        .map(|&y| {
            while j + 1 < hull.len()
                && hull[j + 1].0 * y - hull[j + 1].1 >= hull[j].0 * y - hull[j].1
            {
                j += 1;
            }
            hull[j].0 * y - hull[j].1
        })
        .collect()
}

/// Slope range of the finite data along a line, from its lower hull.
fn slope_range(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let hull = lower_hull(points);
    if hull.len() < 2 {
        return None;
    }
    let s0 = (hull[1].1 - hull[0].1) / (hull[1].0 - hull[0].0);
    let k = hull.len();
    let s1 = (hull[k - 1].1 - hull[k - 2].1) / (hull[k - 1].0 - hull[k - 2].0);
    Some((s0, s1))
}

fn conjugate_via_grid(
    f: &ConvexFunction,
    cfg: &NumericConfig,
    cover: Option<(&[f64], &[f64])>,
) -> Result<ConjugateResult> {
    let g = match f.shape() {
        Shape::Grid(g) => g.clone(),
        _ => {
            // Resample non-grid shapes to a box wide enough for the
            // envelope to dominate.
            let r = default_box_radius(f);
            let n = f.dim();
            let shape = match n {
                1 => vec![cfg.dual_grid.max(64)],
                2 => vec![257, 257],
                d => {
                    return Err(Error::UnsupportedDimension {
                        dim: d,
                        what: "grid conjugation",
                    })
                }
            };
            GridFn::sample(vec![-r; n], vec![r; n], shape, |x| f.eval_unchecked(x))
        }
    };
    match g.shape.len() {
        1 => conjugate_grid_1d(f, &g, cfg, cover),
        2 => conjugate_grid_2d(f, &g, cfg, cover),
        d => Err(Error::UnsupportedDimension {
            dim: d,
            what: "grid conjugation",
        }),
    }
}

fn dual_axis(s_lo: f64, s_hi: f64, nodes: usize) -> (f64, f64, usize) {
    let m = nodes.max(9);
    if s_hi - s_lo < 1e-9 {
        let mid = 0.5 * (s_lo + s_hi);
        (mid - 0.5, mid + 0.5, m)
    } else {
        (s_lo, s_hi, m)
    }
}

fn conjugate_grid_1d(
    f: &ConvexFunction,
    g: &GridFn,
    cfg: &NumericConfig,
    cover: Option<(&[f64], &[f64])>,
) -> Result<ConjugateResult> {
    let pts: Vec<(f64, f64)> = (0..g.shape[0])
        .filter(|i| g.values[*i].is_finite())
        .map(|i| (g.node(0, i), g.values[i]))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidFunction("grid has no finite values".into()));
    }
    let (mut s_lo, mut s_hi) = slope_range(&pts).unwrap_or((-1.0, 1.0));
    if let Some((clo, chi)) = cover {
        s_lo = s_lo.min(clo[0]);
        s_hi = s_hi.max(chi[0]);
    }
    let (y_lo, y_hi, m) = dual_axis(s_lo, s_hi, cfg.dual_grid);
    let ys: Vec<f64> = (0..m)
        .map(|j| y_lo + (y_hi - y_lo) * j as f64 / (m - 1) as f64)
        .collect();
    let vals = legendre_sweep(&pts, &ys);
    let out = ConvexFunction::grid(GridFn {
        lo: vec![y_lo],
        hi: vec![y_hi],
        shape: vec![m],
        values: vals,
    })?;
    let acc = fenchel_probe(f, &out, &[y_lo], &[y_hi]);
    Ok(ConjugateResult {
        function: out,
        domain_box: (vec![y_lo], vec![y_hi]),
        accuracy: acc,
    })
}

fn conjugate_grid_2d(
    f: &ConvexFunction,
    g: &GridFn,
    cfg: &NumericConfig,
    cover: Option<(&[f64], &[f64])>,
) -> Result<ConjugateResult> {
    let (mx, my) = (g.shape[0], g.shape[1]);
    // Pass 1: conjugate along axis 1 (x2) for every x1 slice.
    let mut s2_lo = f64::INFINITY;
    let mut s2_hi = f64::NEG_INFINITY;
    let mut rows: Vec<Option<Vec<(f64, f64)>>> = Vec::with_capacity(mx);
    for i in 0..mx {
        let pts: Vec<(f64, f64)> = (0..my)
            .filter(|j| g.value(&[i, *j]).is_finite())
            .map(|j| (g.node(1, j), g.value(&[i, j])))
            .collect();
        if let Some((a, b)) = slope_range(&pts) {
            s2_lo = s2_lo.min(a);
            s2_hi = s2_hi.max(b);
        } else if let Some(p) = pts.first() {
            s2_lo = s2_lo.min(p.0.signum());
            s2_hi = s2_hi.max(p.0.signum());
        }
        rows.push(if pts.is_empty() { None } else { Some(pts) });
    }
    if !s2_lo.is_finite() {
        s2_lo = -1.0;
        s2_hi = 1.0;
    }
    if let Some((clo, chi)) = cover {
        s2_lo = s2_lo.min(clo[1]);
        s2_hi = s2_hi.max(chi[1]);
    }
    let nodes = cfg.dual_grid.min(1025);
    let (y2_lo, y2_hi, m2) = dual_axis(s2_lo, s2_hi, nodes.min(my * 2));
    let y2s: Vec<f64> = (0..m2)
        .map(|j| y2_lo + (y2_hi - y2_lo) * j as f64 / (m2 - 1) as f64)
        .collect();
    // w[i][j2] = sup_{x2} (x2 y2 - u(x1_i, x2)); None rows stay +inf.
    let w: Vec<Option<Vec<f64>>> = par::map_slice(&rows, |row| {
        row.as_ref().map(|pts| legendre_sweep(pts, &y2s))
    });

    // Pass 2: for each y2, conjugate -w along x1.
    let mut s1_lo = f64::INFINITY;
    let mut s1_hi = f64::NEG_INFINITY;
    let mut cols: Vec<Vec<(f64, f64)>> = Vec::with_capacity(m2);
    for j2 in 0..m2 {
        let pts: Vec<(f64, f64)> = (0..mx)
            .filter_map(|i| w[i].as_ref().map(|r| (g.node(0, i), -r[j2])))
            .collect();
        if let Some((a, b)) = slope_range(&pts) {
            s1_lo = s1_lo.min(a);
            s1_hi = s1_hi.max(b);
        }
        cols.push(pts);
    }
    if !s1_lo.is_finite() {
        s1_lo = -1.0;
        s1_hi = 1.0;
    }
    if let Some((clo, chi)) = cover {
        s1_lo = s1_lo.min(clo[0]);
        s1_hi = s1_hi.max(chi[0]);
    }
    let (y1_lo, y1_hi, m1) = dual_axis(s1_lo, s1_hi, nodes.min(mx * 2));
    let y1s: Vec<f64> = (0..m1)
        .map(|i| y1_lo + (y1_hi - y1_lo) * i as f64 / (m1 - 1) as f64)
        .collect();
    let conj_cols: Vec<Vec<f64>> = par::map_slice(&cols, |pts| legendre_sweep(pts, &y1s));
    // Assemble row-major over (y1, y2).
    let mut values = vec![0.0; m1 * m2];
    for (j2, col) in conj_cols.iter().enumerate() {
        for (i1, v) in col.iter().enumerate() {
            values[i1 * m2 + j2] = *v;
        }
    }
    let out = ConvexFunction::grid(GridFn {
        lo: vec![y1_lo, y2_lo],
        hi: vec![y1_hi, y2_hi],
        shape: vec![m1, m2],
        values,
    })?;
    let acc = fenchel_probe(f, &out, &[y1_lo, y2_lo], &[y1_hi, y2_hi]);
    Ok(ConjugateResult {
        function: out,
        domain_box: (vec![y1_lo, y2_lo], vec![y1_hi, y2_hi]),
        accuracy: acc,
    })
}

/// Max positive violation of u(x) + u*(y) >= <x, y> over probe pairs.
fn fenchel_probe(u: &ConvexFunction, conj: &ConvexFunction, y_lo: &[f64], y_hi: &[f64]) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let n = u.dim();
    let r = default_box_radius(u);
    let mut worst: f64 = 0.0;
    for _ in 0..256 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| rng.gen_range(y_lo[i]..y_hi[i].max(y_lo[i] + 1e-9)))
            .collect();
        let ux = u.eval_unchecked(&x);
        let cy = conj.eval_unchecked(&y);
        if ux.is_finite() && cy.is_finite() {
            let ip: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            worst = worst.max(ip - ux - cy);
        }
    }
    worst
}

/// Coercivity via the conjugate domain: coercive iff 0 is interior to
/// dom u*, super-coercive iff dom u* is everything (tested up to a probe
/// box for shapes without an analytic answer).
pub fn classify_coercivity(f: &ConvexFunction) -> Result<Coercivity> {
    let c = match f.shape() {
        Shape::IndicatorPlus { .. } | Shape::Grid(_) => Coercivity::SuperCoercive,
        Shape::Quadratic { matrix, .. } => {
            if matrix.inverse().is_ok() && matrix.is_psd(1e-12) {
                Coercivity::SuperCoercive
            } else {
                Coercivity::NotCoercive
            }
        }
        Shape::NormCone { .. } | Shape::AffineNorm { .. } => Coercivity::Coercive,
        Shape::SupportFn { .. } => {
            if f.envelope().is_some() {
                Coercivity::Coercive
            } else {
                Coercivity::NotCoercive
            }
        }
        Shape::Shifted { inner, .. } => classify_coercivity(inner)?,
        Shape::Maximum { items } => {
            let mut best = Coercivity::NotCoercive;
            for it in items {
                let c = classify_coercivity(it)?;
                best = match (best, c) {
                    (_, Coercivity::SuperCoercive) | (Coercivity::SuperCoercive, _) => {
                        Coercivity::SuperCoercive
                    }
                    (_, Coercivity::Coercive) | (Coercivity::Coercive, _) => Coercivity::Coercive,
                    _ => Coercivity::NotCoercive,
                };
            }
            if best == Coercivity::NotCoercive {
                probe_coercivity(f)?
            } else {
                best
            }
        }
    };
    Ok(c)
}

/// Numeric probe: sup growth of <x,y> - u(x) under box doubling decides
/// whether y lies in dom u*.
fn probe_coercivity(f: &ConvexFunction) -> Result<Coercivity> {
    let n = f.dim();
    let dirs: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..16)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 16.0;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                what: "coercivity probe",
            })
        }
    };
    let finite_at = |y: &[f64]| -> bool {
        let sup_on = |r: f64| -> f64 {
            let m = 512;
            let mut s = f64::NEG_INFINITY;
            for k in 0..=m {
                let x: Vec<f64> = match n {
                    1 => vec![-r + 2.0 * r * k as f64 / m as f64],
                    _ => {
                        let th = std::f64::consts::TAU * k as f64 / m as f64;
                        vec![r * th.cos(), r * th.sin()]
                    }
                };
                let u = f.eval_unchecked(&x);
                if u.is_finite() {
                    let ip: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                    s = s.max(ip - u);
                }
            }
            s
        };
        let mut prev = f64::NEG_INFINITY;
        for r in [4.0, 16.0, 64.0, 256.0] {
            let cur = sup_on(r).max(prev);
            if prev.is_finite() && cur > prev + 1e-6 * (1.0 + prev.abs()) {
                return false;
            }
            prev = cur;
        }
        true
    };
    let small = 1e-3;
    let coercive = dirs
        .iter()
        .all(|d| finite_at(&d.iter().map(|v| v * small).collect::<Vec<_>>()));
    if !coercive {
        return Ok(Coercivity::NotCoercive);
    }
    let big = 1e3;
    let sup = dirs
        .iter()
        .all(|d| finite_at(&d.iter().map(|v| v * big).collect::<Vec<_>>()));
    Ok(if sup {
        Coercivity::SuperCoercive
    } else {
        Coercivity::Coercive
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::golden_min;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    #[test]
    fn conjugate_indicator_is_support_fn() {
        let k = ConvexBody::interval(-1.0, 2.0).unwrap();
        let u = ConvexFunction::indicator(k.clone(), 0.0).unwrap();
        let c = conjugate(&u, &cfg()).unwrap();
        assert_eq!(c.accuracy, 0.0);
        // h(K, 1) = 2, h(K, -1) = 1.
        assert!((c.function.evaluate(&[1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!((c.function.evaluate(&[-1.0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_cone_is_ball_indicator() {
        let u = ConvexFunction::norm_cone(2, 2.0).unwrap();
        let c = conjugate(&u, &cfg()).unwrap();
        assert_eq!(c.function.evaluate(&[0.4, 0.0]).unwrap(), 0.0);
        assert!(c.function.evaluate(&[0.6, 0.0]).unwrap().is_infinite());
    }

    #[test]
    fn quadratic_self_conjugate() {
        let u = ConvexFunction::quadratic(Matrix::scaled_identity(2, 0.5), vec![0.0, 0.0], 0.0)
            .unwrap();
        let c = conjugate(&u, &cfg()).unwrap();
        for p in [[0.3, -0.7], [1.5, 2.0]] {
            assert!(
                (c.function.evaluate(&p).unwrap() - u.evaluate(&p).unwrap()).abs() < 1e-12,
                "not self-conjugate at {p:?}"
            );
        }
    }

    #[test]
    fn biconjugate_round_trips_closed_forms() {
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        let u = ConvexFunction::indicator(k, 2.0).unwrap();
        let b = biconjugate(&u, &cfg()).unwrap();
        assert_eq!(b.evaluate(&[0.5]).unwrap(), 2.0);
        assert!(b.evaluate(&[1.5]).unwrap().is_infinite());

        let q =
            ConvexFunction::quadratic(Matrix::scaled_identity(1, 2.0), vec![1.0], -0.5).unwrap();
        let bq = biconjugate(&q, &cfg()).unwrap();
        for x in [-1.0, 0.0, 0.7] {
            assert!((bq.evaluate(&[x]).unwrap() - q.evaluate(&[x]).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_biconjugate_recovers_convex_sample() {
        // DERIVED tolerance: u** of sampled x^4 matches within C*h on the
        // interior; empirically C ~ 1 for this grid, frozen with margin.
        let h = 1e-3;
        let m = (4.0 / h) as usize + 1;
        let g = GridFn::sample(vec![-2.0], vec![2.0], vec![m], |x| x[0].powi(4));
        let u = ConvexFunction::grid(g).unwrap();
        let b = biconjugate(&u, &cfg()).unwrap();
        let mut worst = 0.0_f64;
        for k in 0..200 {
            let x = -1.9 + 3.8 * k as f64 / 199.0;
            let diff = (b.evaluate(&[x]).unwrap() - x.powi(4)).abs();
            worst = worst.max(diff);
        }
        assert!(worst <= 5.0 * h, "worst interior deviation {worst}");
    }

    #[test]
    fn grid_conjugate_2d_matches_closed_form() {
        // 2-d separable sweep on samples of |x|^2: the conjugate is
        // |y|^2/4, exact at dual nodes up to the discretization of the
        // hull slopes.
        let g = GridFn::sample(vec![-3.0, -3.0], vec![3.0, 3.0], vec![121, 121], |x| {
            x[0] * x[0] + x[1] * x[1]
        });
        let u = ConvexFunction::grid(g).unwrap();
        let c = conjugate(&u, &cfg()).unwrap();
        let mut worst = 0.0_f64;
        for p in [[0.0, 0.0], [1.0, 0.5], [-2.0, 1.0], [3.0, -3.0]] {
            let got = c.function.evaluate(&p).unwrap();
            let want = 0.25 * (p[0] * p[0] + p[1] * p[1]);
            worst = worst.max((got - want).abs());
        }
        // Node spacing h = 0.05: discrete conjugate error is O(h^2)-ish
        // plus the dual-grid interpolation; 5e-3 has ample margin.
        assert!(worst < 5e-3, "worst 2-d conjugate deviation {worst}");
        assert!(c.accuracy <= 1e-9, "Fenchel violation {}", c.accuracy);

        let b = biconjugate(&u, &cfg()).unwrap();
        let mut worst2 = 0.0_f64;
        for k in 0..40 {
            let x = [-2.5 + 5.0 * (k as f64) / 39.0, 1.3 - (k as f64) * 0.05];
            let dev = (b.evaluate(&x).unwrap() - u.evaluate(&x).unwrap()).abs();
            worst2 = worst2.max(dev);
        }
        assert!(worst2 < 5e-3, "2-d biconjugate deviation {worst2}");
    }

    #[test]
    fn inf_convolution_of_indicators_sums_bodies() {
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        let l = ConvexBody::interval(0.0, 2.0).unwrap();
        let u = ConvexFunction::indicator(k, 0.0).unwrap();
        let v = ConvexFunction::indicator(l, 0.0).unwrap();
        let w = inf_convolution(&u, &v, &cfg()).unwrap();
        assert_eq!(w.evaluate(&[2.5]).unwrap(), 0.0);
        assert!(w.evaluate(&[3.5]).unwrap().is_infinite());
        assert!(w.evaluate(&[-0.5]).unwrap().is_infinite());
    }

    #[test]
    fn inf_convolution_identity_element() {
        let u = ConvexFunction::quadratic(Matrix::scaled_identity(1, 1.0), vec![0.5], 0.2).unwrap();
        let zero = ConvexFunction::indicator(ConvexBody::point(vec![0.0]), 0.0).unwrap();
        let w = inf_convolution(&u, &zero, &cfg()).unwrap();
        for x in [-1.0, 0.0, 2.0] {
            assert!((w.evaluate(&[x]).unwrap() - u.evaluate(&[x]).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn inf_convolution_halves_quadratic() {
        // (|x|^2/2) box (|x|^2/2) = |x|^2/4, checked against a direct 1-d
        // minimization oracle on a grid.
        let u = ConvexFunction::quadratic(Matrix::scaled_identity(1, 0.5), vec![0.0], 0.0).unwrap();
        let w = inf_convolution(&u, &u, &cfg()).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.7] {
            let oracle = golden_min(&|y: f64| 0.5 * y * y + 0.5 * (x - y) * (x - y), -10.0, 10.0).1;
            assert!((w.evaluate(&[x]).unwrap() - oracle).abs() < 1e-9);
            assert!((oracle - 0.25 * x * x).abs() < 1e-9);
        }
    }

    #[test]
    fn coercivity_classification() {
        let cone = ConvexFunction::norm_cone(2, 1.5).unwrap();
        assert_eq!(classify_coercivity(&cone).unwrap(), Coercivity::Coercive);
        let quad = ConvexFunction::quadratic(Matrix::scaled_identity(2, 0.5), vec![0.0, 0.0], 0.0)
            .unwrap();
        assert_eq!(
            classify_coercivity(&quad).unwrap(),
            Coercivity::SuperCoercive
        );
        // h(K, .) with 0 interior to K is coercive, via the conjugate route.
        let k = ConvexBody::interval(-1.0, 2.0).unwrap();
        let h = ConvexFunction::support_fn(k).unwrap();
        assert_eq!(classify_coercivity(&h).unwrap(), Coercivity::Coercive);
        // Degenerate quadratic is not coercive.
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let flat = ConvexFunction::quadratic(m, vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(classify_coercivity(&flat).unwrap(), Coercivity::NotCoercive);
    }

    #[test]
    fn moreau_fenchel_inequality_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u = ConvexFunction::quadratic(Matrix::scaled_identity(2, 0.8), vec![0.3, -0.1], 0.4)
            .unwrap();
        let c = conjugate(&u, &cfg()).unwrap();
        for _ in 0..200 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let lhs = u.evaluate(&x).unwrap() + c.function.evaluate(&y).unwrap();
            let rhs = x[0] * y[0] + x[1] * y[1];
            assert!(lhs >= rhs - 1e-9);
        }
    }

    #[test]
    fn conjugate_order_reversal_on_samples() {
        // f <= g pointwise implies f* >= g*.
        let f = ConvexFunction::quadratic(Matrix::scaled_identity(1, 0.5), vec![0.0], 0.0).unwrap();
        let g = ConvexFunction::quadratic(Matrix::scaled_identity(1, 1.0), vec![0.0], 0.0).unwrap();
        let cf = conjugate(&f, &cfg()).unwrap().function;
        let cg = conjugate(&g, &cfg()).unwrap().function;
        for k in 0..40 {
            let y = -2.0 + 4.0 * k as f64 / 39.0;
            assert!(cf.evaluate(&[y]).unwrap() >= cg.evaluate(&[y]).unwrap() - 1e-12);
        }
    }
}
