//! Convex bodies: exact planar polytope algebra plus the closed forms for
//! balls and boxes, the Hausdorff metric and its two extensions to the
//! empty set, symmetric-difference volumes and Minkowski sums.
//!
//! Exactness policy: 1-d bodies are intervals and everything is closed
//! form; in 2-d, polygon/box pairs are exact, ball pairs are exact, mixed
//! ball/polygon pairs are exact for support-based quantities and fall back
//! to Monte Carlo for volumes of intersections. `SupportSampled` carries
//! exact support values on sampled directions together with touching
//! points, which give certified inner/outer volume bounds.

use crate::error::{Error, Result};
use crate::geom::{self, P2};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexBody {
    /// Convex polygon, counterclockwise vertices, 2-d only.
    Polygon2d {
        vertices: Vec<P2>,
    },
    /// Euclidean ball; radius 0 encodes a point.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Axis-aligned box, `lo <= hi` componentwise.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Support values on unit directions (2-d), optionally with the
    /// boundary points attaining them.
    SupportSampled {
        directions: Vec<P2>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        touch: Option<Vec<P2>>,
        /// Lazily materialized halfplane intersection; derived data.
        #[serde(skip)]
        outer: Arc<OnceLock<Vec<P2>>>,
    },
    Empty,
}

/// Volume of the n-dimensional unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

impl ConvexBody {
    pub fn polygon(vertices: Vec<P2>) -> Result<Self> {
        if vertices.is_empty() {
            return Ok(ConvexBody::Empty);
        }
        if vertices.len() >= 3 && !geom::is_convex_ccw(&vertices) {
            return Err(Error::InvalidBody(
                "polygon vertices must be distinct and in counterclockwise convex position".into(),
            ));
        }
        Ok(ConvexBody::Polygon2d { vertices })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidBody(format!("ball radius {radius} < 0")));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn point(x: Vec<f64>) -> Self {
        ConvexBody::Ball {
            center: x,
            radius: 0.0,
        }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::cuboid(vec![a], vec![b])
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidBody("box lo/hi length mismatch".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidBody(
                "box needs lo <= hi componentwise".into(),
            ));
        }
        Ok(ConvexBody::Box { lo, hi })
    }

    pub fn support_sampled(
        directions: Vec<P2>,
        values: Vec<f64>,
        touch: Option<Vec<P2>>,
    ) -> Result<Self> {
        if directions.len() != values.len() || directions.len() < 3 {
            return Err(Error::InvalidBody(
                "support sampling needs matching direction/value lists with >= 3 entries".into(),
            ));
        }
        let body = ConvexBody::SupportSampled {
            directions,
            values,
            touch,
            outer: Arc::new(OnceLock::new()),
        };
        if body.outer_polygon().is_empty() {
            return Err(Error::InvalidBody(
                "support values define an empty halfplane intersection".into(),
            ));
        }
        Ok(body)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ConvexBody::Empty)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexBody::Polygon2d { .. } | ConvexBody::SupportSampled { .. } => Some(2),
            ConvexBody::Ball { center, .. } => Some(center.len()),
            ConvexBody::Box { lo, .. } => Some(lo.len()),
            ConvexBody::Empty => None,
        }
    }

    /// Outer polygon of a support-sampled body (halfplane intersection),
    /// computed once and cached.
    fn outer_polygon(&self) -> Vec<P2> {
        match self {
            ConvexBody::SupportSampled {
                directions,
                values,
                outer,
                ..
            } => outer
                .get_or_init(|| {
                    let bound = values.iter().fold(1.0_f64, |m, v| m.max(v.abs())) * 4.0;
                    geom::halfplane_intersection(directions, values, bound)
                })
                .clone(),
            _ => Vec::new(),
        }
    }

    /// 2-d vertex representation where one exists exactly.
    pub(crate) fn as_polygon(&self) -> Option<Vec<P2>> {
        match self {
            ConvexBody::Polygon2d { vertices } => Some(vertices.clone()),
            ConvexBody::Box { lo, hi } if lo.len() == 2 => Some(vec![
                [lo[0], lo[1]],
                [hi[0], lo[1]],
                [hi[0], hi[1]],
                [lo[0], hi[1]],
            ]),
            ConvexBody::Ball { center, radius } if center.len() == 2 && *radius == 0.0 => {
                Some(vec![[center[0], center[1]]])
            }
            _ => None,
        }
    }

    /// 1-d interval representation `[a, b]` where one exists.
    pub(crate) fn as_interval(&self) -> Option<(f64, f64)> {
        match self {
            ConvexBody::Box { lo, hi } if lo.len() == 1 => Some((lo[0], hi[0])),
            ConvexBody::Ball { center, radius } if center.len() == 1 => {
                Some((center[0] - radius, center[0] + radius))
            }
            _ => None,
        }
    }

    /// Exact volume where available; `volume_bounds` reports the certified
    /// enclosure for sampled representations. Empty bodies have volume 0 by
    /// convention.
    pub fn volume(&self) -> f64 {
        let (lo, hi) = self.volume_bounds();
        0.5 * (lo + hi)
    }

    /// Certified `(lower, upper)` volume bounds; equal for closed forms.
    pub fn volume_bounds(&self) -> (f64, f64) {
        match self {
            ConvexBody::Empty => (0.0, 0.0),
            ConvexBody::Polygon2d { vertices } => {
                let v = geom::polygon_area(vertices).max(0.0);
                (v, v)
            }
            ConvexBody::Ball { center, radius } => {
                let v = unit_ball_volume(center.len()) * radius.powi(center.len() as i32);
                (v, v)
            }
            ConvexBody::Box { lo, hi } => {
                let v = lo.iter().zip(hi).map(|(a, b)| b - a).product::<f64>();
                (v, v)
            }
            ConvexBody::SupportSampled { touch, .. } => {
                let outer = geom::polygon_area(&self.outer_polygon()).max(0.0);
                let inner = match touch {
                    Some(pts) => geom::polygon_area(&geom::convex_hull(pts)).max(0.0),
                    None => 0.0,
                };
                (inner.min(outer), outer)
            }
        }
    }

    /// Support function h(K, u) = max_{x in K} <x, u>.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("support value")),
            ConvexBody::Polygon2d { vertices } => Ok(geom::polygon_support(vertices, [u[0], u[1]])),
            ConvexBody::Ball { center, radius } => {
                let c: f64 = center.iter().zip(u).map(|(a, b)| a * b).sum();
                let nu: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok(c + radius * nu)
            }
            ConvexBody::Box { lo, hi } => Ok(lo
                .iter()
                .zip(hi)
                .zip(u)
                .map(|((a, b), ui)| (a * ui).max(b * ui))
                .sum()),
            ConvexBody::SupportSampled { .. } => {
                let poly = self.outer_polygon();
                Ok(geom::polygon_support(&poly, [u[0], u[1]]))
            }
        }
    }

    /// Boundary point attaining the support value in direction `u`.
    pub fn support_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("support point")),
            ConvexBody::Polygon2d { vertices } => {
                let p = geom::polygon_support_argmax(vertices, [u[0], u[1]]);
                Ok(vec![p[0], p[1]])
            }
            ConvexBody::Ball { center, radius } => {
                let nu: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                if nu == 0.0 {
                    return Ok(center.clone());
                }
                Ok(center
                    .iter()
                    .zip(u)
                    .map(|(c, ui)| c + radius * ui / nu)
                    .collect())
            }
            ConvexBody::Box { lo, hi } => Ok(lo
                .iter()
                .zip(hi)
                .zip(u)
                .map(|((a, b), ui)| if *ui >= 0.0 { *b } else { *a })
                .collect()),
            ConvexBody::SupportSampled { .. } => {
                let poly = self.outer_polygon();
                let p = geom::polygon_support_argmax(&poly, [u[0], u[1]]);
                Ok(vec![p[0], p[1]])
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexBody::Empty => false,
            ConvexBody::Polygon2d { vertices } => geom::contains_point(vertices, [x[0], x[1]]),
            ConvexBody::Ball { center, radius } => {
                let d2: f64 = center
                    .iter()
                    .zip(x)
                    .map(|(c, xi)| (c - xi) * (c - xi))
                    .sum();
                d2.sqrt() <= radius + 1e-12 * radius.max(1.0)
            }
            ConvexBody::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(x)
                .all(|((a, b), xi)| *xi >= a - 1e-12 && *xi <= b + 1e-12),
            ConvexBody::SupportSampled { .. } => {
                geom::contains_point(&self.outer_polygon(), [x[0], x[1]])
            }
        }
    }

    /// Euclidean distance from `x` to the body (0 inside).
    pub fn distance_to_point(&self, x: &[f64]) -> Result<f64> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("distance")),
            ConvexBody::Polygon2d { vertices } => {
                Ok(geom::distance_to_polygon(vertices, [x[0], x[1]]))
            }
            ConvexBody::Ball { center, radius } => {
                let d: f64 = center
                    .iter()
                    .zip(x)
                    .map(|(c, xi)| (c - xi) * (c - xi))
                    .sum::<f64>()
                    .sqrt();
                Ok((d - radius).max(0.0))
            }
            ConvexBody::Box { lo, hi } => {
                let mut d2 = 0.0;
                for ((a, b), xi) in lo.iter().zip(hi).zip(x) {
                    let e = (a - xi).max(0.0).max(xi - b);
                    d2 += e * e;
                }
                Ok(d2.sqrt())
            }
            ConvexBody::SupportSampled { .. } => Ok(geom::distance_to_polygon(
                &self.outer_polygon(),
                [x[0], x[1]],
            )),
        }
    }

    /// max_{x in K} |x|; equals the Hausdorff distance to the origin point.
    pub fn max_norm(&self) -> Result<f64> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("max norm")),
            ConvexBody::Polygon2d { vertices } => {
                Ok(vertices.iter().fold(0.0_f64, |m, v| m.max(geom::norm(*v))))
            }
            ConvexBody::Ball { center, radius } => {
                Ok(center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius)
            }
            ConvexBody::Box { lo, hi } => {
                let mut m = 0.0_f64;
                for corner in 0..(1usize << lo.len()) {
                    let mut s = 0.0;
                    for (i, (a, b)) in lo.iter().zip(hi).enumerate() {
                        let c = if corner >> i & 1 == 1 { *b } else { *a };
                        s += c * c;
                    }
                    m = m.max(s.sqrt());
                }
                Ok(m)
            }
            ConvexBody::SupportSampled { .. } => Ok(self
                .outer_polygon()
                .iter()
                .fold(0.0_f64, |m, v| m.max(geom::norm(*v)))),
        }
    }

    /// Some point of the body, used as an argmin witness for indicators.
    pub fn witness_point(&self) -> Result<Vec<f64>> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("witness point")),
            ConvexBody::Polygon2d { vertices } => {
                let n = vertices.len() as f64;
                let mut c = [0.0, 0.0];
                for v in vertices {
                    c[0] += v[0] / n;
                    c[1] += v[1] / n;
                }
                Ok(vec![c[0], c[1]])
            }
            ConvexBody::Ball { center, .. } => Ok(center.clone()),
            ConvexBody::Box { lo, hi } => {
                Ok(lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect())
            }
            ConvexBody::SupportSampled { .. } => {
                let poly = self.outer_polygon();
                let n = poly.len() as f64;
                let mut c = [0.0, 0.0];
                for v in &poly {
                    c[0] += v[0] / n;
                    c[1] += v[1] / n;
                }
                Ok(vec![c[0], c[1]])
            }
        }
    }

    /// Largest r with B(0, r) contained in the body; 0 when the origin is
    /// not interior. Exact for intervals, balls, boxes and polygons.
    pub fn inradius_at_origin(&self) -> Result<f64> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("inradius")),
            ConvexBody::Ball { center, radius } => {
                let c: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok((radius - c).max(0.0))
            }
            ConvexBody::Box { lo, hi } => Ok(lo
                .iter()
                .zip(hi)
                .map(|(a, b)| b.min(-a))
                .fold(f64::INFINITY, f64::min)
                .max(0.0)),
            ConvexBody::Polygon2d { vertices } => {
                if !geom::contains_point(vertices, [0.0, 0.0]) {
                    return Ok(0.0);
                }
                let n = vertices.len();
                let mut r = f64::INFINITY;
                for i in 0..n {
                    r = r.min(geom::distance_to_segment(
                        [0.0, 0.0],
                        vertices[i],
                        vertices[(i + 1) % n],
                    ));
                }
                Ok(r)
            }
            ConvexBody::SupportSampled { values, .. } => {
                // h(u) >= r for every direction is necessary and, on the
                // sampled fan, the certificate we report.
                Ok(values.iter().fold(f64::INFINITY, |m, v| m.min(*v)).max(0.0))
            }
        }
    }

    /// Radial function: sup { t >= 0 : t u in K } for a unit direction u,
    /// for bodies containing the origin.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        match self {
            ConvexBody::Empty => Err(Error::EmptyBody("radial function")),
            ConvexBody::Ball { center, radius } => {
                let cu: f64 = center.iter().zip(u).map(|(c, ui)| c * ui).sum();
                let c2: f64 = center.iter().map(|c| c * c).sum();
                let disc = cu * cu - (c2 - radius * radius);
                if disc < 0.0 {
                    return Ok(0.0);
                }
                Ok((cu + disc.sqrt()).max(0.0))
            }
            ConvexBody::Box { lo, hi } => {
                let mut t = f64::INFINITY;
                for ((a, b), ui) in lo.iter().zip(hi).zip(u) {
                    if *ui > 1e-300 {
                        t = t.min(b / ui);
                    } else if *ui < -1e-300 {
                        t = t.min(a / ui);
                    }
                }
                Ok(t.max(0.0))
            }
            ConvexBody::Polygon2d { vertices } => {
                let n = vertices.len();
                let mut t = f64::INFINITY;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let e = geom::sub(b, a);
                    let normal = [e[1], -e[0]];
                    let den = normal[0] * u[0] + normal[1] * u[1];
                    if den > 1e-300 {
                        let num = geom::dot(a, normal);
                        t = t.min(num / den);
                    }
                }
                Ok(t.max(0.0))
            }
            ConvexBody::SupportSampled { .. } => {
                let poly = geom::convex_hull(&self.outer_polygon());
                ConvexBody::polygon(poly)?.radial(u)
            }
        }
    }

    pub fn translate(&self, v: &[f64]) -> ConvexBody {
        match self {
            ConvexBody::Empty => ConvexBody::Empty,
            ConvexBody::Polygon2d { vertices } => ConvexBody::Polygon2d {
                vertices: vertices
                    .iter()
                    .map(|p| [p[0] + v[0], p[1] + v[1]])
                    .collect(),
            },
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: center.iter().zip(v).map(|(c, vi)| c + vi).collect(),
                radius: *radius,
            },
            ConvexBody::Box { lo, hi } => ConvexBody::Box {
                lo: lo.iter().zip(v).map(|(a, vi)| a + vi).collect(),
                hi: hi.iter().zip(v).map(|(b, vi)| b + vi).collect(),
            },
            ConvexBody::SupportSampled {
                directions,
                values,
                touch,
                ..
            } => ConvexBody::SupportSampled {
                directions: directions.clone(),
                values: directions
                    .iter()
                    .zip(values)
                    .map(|(u, h)| h + u[0] * v[0] + u[1] * v[1])
                    .collect(),
                touch: touch
                    .as_ref()
                    .map(|ts| ts.iter().map(|p| [p[0] + v[0], p[1] + v[1]]).collect()),
                outer: Arc::new(OnceLock::new()),
            },
        }
    }

    /// Image under `x -> phi x + shift`, exact for polygon-like bodies and
    /// for balls under similarities; other balls become support samplings
    /// with exact values at the sampled directions.
    pub fn affine_image(
        &self,
        phi: &Matrix,
        shift: &[f64],
        directions: usize,
    ) -> Result<ConvexBody> {
        let n = phi.dim();
        match self {
            ConvexBody::Empty => Ok(ConvexBody::Empty),
            ConvexBody::Polygon2d { vertices } => {
                let mapped: Vec<P2> = vertices
                    .iter()
                    .map(|v| {
                        let y = phi.apply(&[v[0], v[1]]);
                        [y[0] + shift[0], y[1] + shift[1]]
                    })
                    .collect();
                let hull = geom::convex_hull(&mapped);
                ConvexBody::polygon(if hull.is_empty() { mapped } else { hull })
            }
            ConvexBody::Box { lo, hi } if n == 1 => {
                let a = phi.get(0, 0);
                let (x0, x1) = (a * lo[0] + shift[0], a * hi[0] + shift[0]);
                ConvexBody::cuboid(vec![x0.min(x1)], vec![x0.max(x1)])
            }
            ConvexBody::Box { .. } if n == 2 => {
                let poly = self.as_polygon().expect("2-d box has a polygon form");
                ConvexBody::polygon(poly)?.affine_image(phi, shift, directions)
            }
            ConvexBody::Ball { center, radius } => {
                let c = phi.apply(center);
                let c: Vec<f64> = c.iter().zip(shift).map(|(a, b)| a + b).collect();
                // Similarity check: phi^T phi = s^2 I.
                let g = phi.transpose().mul(phi);
                let s2 = g.get(0, 0);
                let mut similar = true;
                for i in 0..n {
                    for j in 0..n {
                        let want = if i == j { s2 } else { 0.0 };
                        if (g.get(i, j) - want).abs() > 1e-10 * s2.abs().max(1.0) {
                            similar = false;
                        }
                    }
                }
                if similar {
                    return ConvexBody::ball(c, radius * s2.sqrt());
                }
                if n != 2 {
                    return Err(Error::UnsupportedDimension {
                        dim: n,
                        what: "affine image of a ball under a non-similarity",
                    });
                }
                // Ellipse: exact support values h(u) = <c,u> + r |phi^T u|.
                let phit = phi.transpose();
                let m = directions.max(16);
                let mut dirs = Vec::with_capacity(m);
                let mut vals = Vec::with_capacity(m);
                let mut touch = Vec::with_capacity(m);
                for k in 0..m {
                    let th = std::f64::consts::TAU * k as f64 / m as f64;
                    let u = [th.cos(), th.sin()];
                    let w = phit.apply(&u);
                    let nw = geom::norm([w[0], w[1]]);
                    dirs.push(u);
                    vals.push(c[0] * u[0] + c[1] * u[1] + radius * nw);
                    let z = if nw > 0.0 {
                        phi.apply(&[radius * w[0] / nw, radius * w[1] / nw])
                    } else {
                        vec![0.0, 0.0]
                    };
                    touch.push([c[0] + z[0], c[1] + z[1]]);
                }
                ConvexBody::support_sampled(dirs, vals, Some(touch))
            }
            ConvexBody::Box { .. } => Err(Error::UnsupportedDimension {
                dim: n,
                what: "affine image of a box",
            }),
            ConvexBody::SupportSampled { .. } => {
                let poly = geom::convex_hull(&self.outer_polygon());
                ConvexBody::polygon(poly)?.affine_image(phi, shift, directions)
            }
        }
    }

    fn supported2(&self) -> Option<geom::SupportedBody2> {
        if let Some(p) = self.as_polygon() {
            return Some(geom::SupportedBody2::polygon(&p));
        }
        match self {
            ConvexBody::Ball { center, radius } if center.len() == 2 => {
                Some(geom::SupportedBody2::ball([center[0], center[1]], *radius))
            }
            _ => None,
        }
    }
}

/// Exact Hausdorff distance together with a sampling-gap bound (zero for
/// the exact pairs). Errors on empty inputs; use the extended variants for
/// those.
pub fn hausdorff_detailed(k: &ConvexBody, l: &ConvexBody) -> Result<(f64, f64)> {
    if k.is_empty() || l.is_empty() {
        return Err(Error::EmptyBody("Hausdorff distance"));
    }
    if let (Some((a1, b1)), Some((a2, b2))) = (k.as_interval(), l.as_interval()) {
        return Ok(((a1 - a2).abs().max((b1 - b2).abs()), 0.0));
    }
    // Polygon pairs: exact via vertex projections in both directions.
    if let (Some(pk), Some(pl)) = (k.as_polygon(), l.as_polygon()) {
        let mut d = 0.0_f64;
        for v in &pk {
            d = d.max(geom::distance_to_polygon(&pl, *v));
        }
        for v in &pl {
            d = d.max(geom::distance_to_polygon(&pk, *v));
        }
        return Ok((d, 0.0));
    }
    // Ball pairs in any dimension.
    if let (
        ConvexBody::Ball {
            center: c1,
            radius: r1,
        },
        ConvexBody::Ball {
            center: c2,
            radius: r2,
        },
    ) = (k, l)
    {
        let d: f64 = c1
            .iter()
            .zip(c2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        return Ok((d + (r1 - r2).abs(), 0.0));
    }
    // Mixed 2-d pairs with exact support structure: d_H = sup_{|u|=1} |h_K - h_L|.
    if let (Some(sa), Some(sb)) = (k.supported2(), l.supported2()) {
        let (lo, hi) = geom::support_diff_extrema(&sa, &sb);
        return Ok((lo.abs().max(hi.abs()), 0.0));
    }
    // Sampled fallback (SupportSampled operands): lower bound plus gap.
    if k.dim() == Some(2) && l.dim() == Some(2) {
        let m = 1440;
        let mut best = 0.0_f64;
        let mut prev: Option<f64> = None;
        let mut max_jump = 0.0_f64;
        for i in 0..=m {
            let th = std::f64::consts::TAU * i as f64 / m as f64;
            let u = [th.cos(), th.sin()];
            let d = (k.support(&u)? - l.support(&u)?).abs();
            best = best.max(d);
            if let Some(p) = prev {
                max_jump = max_jump.max((d - p).abs());
            }
            prev = Some(d);
        }
        return Ok((best, max_jump));
    }
    Err(Error::UnsupportedDimension {
        dim: k.dim().unwrap_or(0),
        what: "Hausdorff distance for this body pair",
    })
}

pub fn hausdorff(k: &ConvexBody, l: &ConvexBody) -> Result<f64> {
    hausdorff_detailed(k, l).map(|(d, _)| d)
}

/// The unique translation-invariant extension of d_H to the empty set:
/// +infinity between an empty and a non-empty body.
pub fn hausdorff_extended_tilde(k: &ConvexBody, l: &ConvexBody) -> Result<f64> {
    match (k.is_empty(), l.is_empty()) {
        (true, true) => Ok(0.0),
        (true, false) | (false, true) => Ok(f64::INFINITY),
        (false, false) => hausdorff(k, l),
    }
}

/// The bounded-penalty extension: max{1, d_H(K, {0})} against the empty set.
pub fn hausdorff_extended_hat(k: &ConvexBody, l: &ConvexBody) -> Result<f64> {
    match (k.is_empty(), l.is_empty()) {
        (true, true) => Ok(0.0),
        (false, true) => Ok(k.max_norm()?.max(1.0)),
        (true, false) => Ok(l.max_norm()?.max(1.0)),
        (false, false) => hausdorff(k, l),
    }
}

/// Volume of the intersection with an error bound: exact for interval,
/// polygon and concentric-structure pairs, Monte Carlo otherwise.
pub fn intersection_volume(
    k: &ConvexBody,
    l: &ConvexBody,
    mc_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if k.is_empty() || l.is_empty() {
        return Ok((0.0, 0.0));
    }
    if let (Some((a1, b1)), Some((a2, b2))) = (k.as_interval(), l.as_interval()) {
        let v = (b1.min(b2) - a1.max(a2)).max(0.0);
        return Ok((v, 0.0));
    }
    if let (Some(pk), Some(pl)) = (k.as_polygon(), l.as_polygon()) {
        let inter = geom::convex_intersection(&pk, &pl);
        return Ok((geom::polygon_area(&inter).max(0.0), 0.0));
    }
    if let (
        ConvexBody::Ball {
            center: c1,
            radius: r1,
        },
        ConvexBody::Ball {
            center: c2,
            radius: r2,
        },
    ) = (k, l)
    {
        if c1.len() == 2 {
            let d: f64 = c1
                .iter()
                .zip(c2)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            return Ok((circle_lens_area(*r1, *r2, d), 0.0));
        }
    }
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim().unwrap_or(0),
            got: l.dim().unwrap_or(0),
        });
    }
    monte_carlo_intersection(k, l, mc_samples, seed)
}

/// Area of the intersection of two discs at center distance `d`.
fn circle_lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    let (rs, rb) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if d <= rb - rs {
        return std::f64::consts::PI * rs * rs;
    }
    let alpha = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let beta = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let a = alpha.acos();
    let b = beta.acos();
    r1 * r1 * (a - a.sin() * a.cos()) + r2 * r2 * (b - b.sin() * b.cos())
}

fn monte_carlo_intersection(
    k: &ConvexBody,
    l: &ConvexBody,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let n = k.dim().unwrap();
    // Bounding box of K from support values along the axes.
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        hi[i] = k.support(&e)?;
        e[i] = -1.0;
        lo[i] = -k.support(&e)?;
    }
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return Ok((0.0, 0.0));
    }
    let hit = |x: &[f64]| -> f64 {
        if k.contains(x) && l.contains(x) {
            1.0
        } else {
            0.0
        }
    };
    Ok(crate::quad::monte_carlo_box(&hit, &lo, &hi, samples.max(1000), seed))
}

/// V_n(K Delta L) with an error bound, via inclusion-exclusion on the
/// intersection volume.
pub fn symmetric_difference_volume(
    k: &ConvexBody,
    l: &ConvexBody,
    mc_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if k.is_empty() && l.is_empty() {
        return Ok((0.0, 0.0));
    }
    if k.is_empty() {
        return Ok((l.volume(), bound_width(l)));
    }
    if l.is_empty() {
        return Ok((k.volume(), bound_width(k)));
    }
    let (inter, err) = intersection_volume(k, l, mc_samples, seed)?;
    let v = (k.volume() + l.volume() - 2.0 * inter).max(0.0);
    Ok((v, 2.0 * err + bound_width(k) + bound_width(l)))
}

fn bound_width(k: &ConvexBody) -> f64 {
    let (lo, hi) = k.volume_bounds();
    0.5 * (hi - lo)
}

/// Minkowski sum. Exact for interval, polygon and ball pairs; mixed 2-d
/// pairs become support samplings with exact values and touching points.
pub fn minkowski_sum(k: &ConvexBody, l: &ConvexBody, directions: usize) -> Result<ConvexBody> {
    if k.is_empty() || l.is_empty() {
        return Err(Error::EmptyBody("Minkowski sum"));
    }
    if let (Some((a1, b1)), Some((a2, b2))) = (k.as_interval(), l.as_interval()) {
        return ConvexBody::cuboid(vec![a1 + a2], vec![b1 + b2]);
    }
    if let (Some(pk), Some(pl)) = (k.as_polygon(), l.as_polygon()) {
        let s = geom::minkowski_sum(&pk, &pl);
        return ConvexBody::polygon(s);
    }
    if let (
        ConvexBody::Ball {
            center: c1,
            radius: r1,
        },
        ConvexBody::Ball {
            center: c2,
            radius: r2,
        },
    ) = (k, l)
    {
        return ConvexBody::ball(c1.iter().zip(c2).map(|(a, b)| a + b).collect(), r1 + r2);
    }
    if k.dim() == Some(2) && l.dim() == Some(2) {
        let m = directions.max(16);
        let mut angles: Vec<f64> = (0..m)
            .map(|i| std::f64::consts::TAU * i as f64 / m as f64)
            .collect();
        // Pin flat edges exactly: without the operands' edge normals in
        // the fan, the halfplane intersection overshoots near them by
        // O(edge length x angular gap).
        for body in [k, l] {
            if let Some(p) = body.as_polygon() {
                let n = p.len();
                for i in 0..n {
                    let e = geom::sub(p[(i + 1) % n], p[i]);
                    if geom::norm(e) > 1e-300 {
                        angles.push((-e[0]).atan2(e[1]).rem_euclid(std::f64::consts::TAU));
                    }
                }
            }
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut dirs = Vec::with_capacity(angles.len());
        let mut vals = Vec::with_capacity(angles.len());
        let mut touch = Vec::with_capacity(angles.len());
        for th in angles {
            let u = [th.cos(), th.sin()];
            dirs.push(u);
            vals.push(k.support(&u)? + l.support(&u)?);
            let a = k.support_point(&u)?;
            let b = l.support_point(&u)?;
            touch.push([a[0] + b[0], a[1] + b[1]]);
        }
        return ConvexBody::support_sampled(dirs, vals, Some(touch));
    }
    Err(Error::UnsupportedDimension {
        dim: k.dim().unwrap_or(0),
        what: "Minkowski sum for this body pair",
    })
}

/// Polar body t K^o used by sublevel sets of support functions: requires
/// the origin interior. 1-d intervals and 2-d polygons/balls are exact.
pub fn polar_scaled(k: &ConvexBody, t: f64) -> Result<ConvexBody> {
    if t < 0.0 {
        return Ok(ConvexBody::Empty);
    }
    if t == 0.0 {
        let n = k.dim().ok_or(Error::EmptyBody("polar"))?;
        return Ok(ConvexBody::point(vec![0.0; n]));
    }
    match k {
        ConvexBody::Ball { center, radius } if center.iter().all(|c| *c == 0.0) => {
            if *radius <= 0.0 {
                return Err(Error::InvalidBody("polar of a point is unbounded".into()));
            }
            ConvexBody::ball(vec![0.0; center.len()], t / radius)
        }
        _ => {
            if let Some((a, b)) = k.as_interval() {
                if !(a < 0.0 && b > 0.0) {
                    return Err(Error::InvalidBody("polar needs 0 in the interior".into()));
                }
                return ConvexBody::cuboid(vec![-t / (-a)], vec![t / b]);
            }
            if let Some(p) = k.as_polygon() {
                // {x : <x, v_i> <= t for every vertex v_i}.
                let offsets = vec![t; p.len()];
                let bound = p.iter().fold(1.0_f64, |m, v| m.max(geom::norm(*v)));
                let poly =
                    geom::halfplane_intersection(&p, &offsets, 4.0 * t / bound.min(1.0) + 4.0);
                if poly.len() < 3 {
                    return Err(Error::InvalidBody("polar needs 0 in the interior".into()));
                }
                return ConvexBody::polygon(geom::convex_hull(&poly));
            }
            Err(Error::UnsupportedDimension {
                dim: k.dim().unwrap_or(0),
                what: "polar body",
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(h: f64) -> ConvexBody {
        ConvexBody::polygon(vec![[-h, -h], [h, -h], [h, h], [-h, h]]).unwrap()
    }

    #[test]
    fn volumes_closed_forms() {
        assert!(
            (ConvexBody::cuboid(vec![-1.0, -1.0], vec![1.0, 1.0])
                .unwrap()
                .volume()
                - 4.0)
                .abs()
                < 1e-12
        );
        let b = ConvexBody::ball(vec![0.0, 0.0], 2.0).unwrap();
        assert!((b.volume() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let t = ConvexBody::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((t.volume() - 0.5).abs() < 1e-15);
        assert_eq!(ConvexBody::Empty.volume(), 0.0);
    }

    #[test]
    fn hausdorff_squares_derived() {
        // Brute-force oracle: max over vertices of the larger square of the
        // distance to the smaller one = |(2,2) - (1,1)| = sqrt 2.
        let inner = square(1.0);
        let outer = square(2.0);
        let mut oracle = 0.0_f64;
        for v in outer.as_polygon().unwrap() {
            oracle = oracle.max(inner.distance_to_point(&v).unwrap());
        }
        for v in inner.as_polygon().unwrap() {
            oracle = oracle.max(outer.distance_to_point(&v).unwrap());
        }
        assert!((oracle - 2f64.sqrt()).abs() < 1e-12);
        let d = hausdorff(&inner, &outer).unwrap();
        assert!((d - oracle).abs() < 1e-12);
        assert_eq!(hausdorff(&inner, &inner).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_point_vs_ball() {
        let p = ConvexBody::point(vec![0.0, 0.0]);
        let b = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!((hausdorff(&p, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_matches_support_extrema_on_mixed_pairs() {
        // Cross-check the vertex-projection route against the exact
        // support-difference route for a ball/polygon pair.
        let b = ConvexBody::ball(vec![0.25, -0.5], 1.5).unwrap();
        let p = square(1.0);
        let via_support = hausdorff(&b, &p).unwrap();
        // Dense sampled lower bound must come close from below.
        let mut sampled = 0.0_f64;
        for i in 0..20000 {
            let th = std::f64::consts::TAU * i as f64 / 20000.0;
            let u = [th.cos(), th.sin()];
            sampled = sampled.max((b.support(&u).unwrap() - p.support(&u).unwrap()).abs());
        }
        assert!(sampled <= via_support + 1e-12);
        assert!(via_support - sampled < 1e-6);
    }

    #[test]
    fn extended_hausdorff_cases() {
        let small = ConvexBody::ball(vec![0.0, 0.0], 0.2).unwrap();
        let big = ConvexBody::ball(vec![0.0, 0.0], 3.0).unwrap();
        assert_eq!(
            hausdorff_extended_tilde(&ConvexBody::Empty, &ConvexBody::Empty).unwrap(),
            0.0
        );
        assert!(hausdorff_extended_tilde(&small, &ConvexBody::Empty)
            .unwrap()
            .is_infinite());
        assert_eq!(
            hausdorff_extended_hat(&small, &ConvexBody::Empty).unwrap(),
            1.0
        );
        assert_eq!(
            hausdorff_extended_hat(&big, &ConvexBody::Empty).unwrap(),
            3.0
        );
        assert_eq!(
            hausdorff_extended_hat(&ConvexBody::Empty, &ConvexBody::Empty).unwrap(),
            0.0
        );
        let d = hausdorff_extended_hat(&small, &big).unwrap();
        assert!((d - 2.8).abs() < 1e-12);
    }

    #[test]
    fn symmetric_difference_offset_squares() {
        // Inclusion-exclusion by hand: 4 + 4 - 2*1 = 6.
        let k = square(1.0);
        let l = ConvexBody::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        let (v, e) = symmetric_difference_volume(&k, &l, 0, 0).unwrap();
        assert_eq!(e, 0.0);
        assert!((v - 6.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_difference_1d_intervals() {
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        let l = ConvexBody::interval(0.0, 2.0).unwrap();
        let (v, _) = symmetric_difference_volume(&k, &l, 0, 0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let (same, _) = symmetric_difference_volume(&k, &k, 0, 0).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn monte_carlo_symdiff_agrees_with_clipping() {
        // Independent route for the polygon formula: ball vs square by MC.
        let k = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let l = square(1.0);
        let (mc, err) = symmetric_difference_volume(&k, &l, 400_000, 7).unwrap();
        let exact = 4.0 - std::f64::consts::PI; // ball inside square
        assert!(
            (mc - exact).abs() < 3.0 * err.max(1e-3),
            "mc={mc} exact={exact} err={err}"
        );
    }

    #[test]
    fn minkowski_closed_forms() {
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        let l = ConvexBody::interval(0.0, 2.0).unwrap();
        let s = minkowski_sum(&k, &l, 0).unwrap();
        assert_eq!(s.as_interval().unwrap(), (0.0, 3.0));

        let sq = square(1.0);
        let pt = ConvexBody::point(vec![0.0, 0.0]);
        let s2 = minkowski_sum(&sq, &pt, 0).unwrap();
        assert!((s2.volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn minkowski_steiner_formula() {
        // 2-d Steiner oracle: V(P + eps B) = V(P) + perimeter * eps + pi eps^2.
        let sq = square(1.0);
        let eps = 0.25;
        let ball = ConvexBody::ball(vec![0.0, 0.0], eps).unwrap();
        let sum = minkowski_sum(&sq, &ball, 720).unwrap();
        let steiner = 4.0 + 8.0 * eps + std::f64::consts::PI * eps * eps;
        let (lo, hi) = sum.volume_bounds();
        assert!(
            lo <= steiner + 1e-9 && steiner <= hi + 1e-9,
            "lo={lo} hi={hi} steiner={steiner}"
        );
        assert!(hi - lo < 1e-3);
    }

    #[test]
    fn polar_of_ball_and_interval() {
        let b = ConvexBody::ball(vec![0.0, 0.0], 2.0).unwrap();
        let p = polar_scaled(&b, 3.0).unwrap();
        match p {
            ConvexBody::Ball { radius, .. } => assert!((radius - 1.5).abs() < 1e-12),
            _ => panic!("expected ball"),
        }
        let i = ConvexBody::interval(-2.0, 4.0).unwrap();
        let q = polar_scaled(&i, 1.0).unwrap();
        assert_eq!(q.as_interval().unwrap(), (-0.5, 0.25));
    }

    #[test]
    fn invalid_polygon_rejected() {
        // Clockwise square has negative orientation.
        assert!(
            ConvexBody::polygon(vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]).is_err()
        );
        // Non-convex chain.
        assert!(ConvexBody::polygon(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.1], [0.0, 2.0]]).is_err());
        assert!(ConvexBody::ball(vec![0.0], -1.0).is_err());
        assert!(ConvexBody::cuboid(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn body_json_round_trip() {
        let b = square(1.0);
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains("\"kind\":\"polygon2d\""));
        let back: ConvexBody = serde_json::from_str(&s).unwrap();
        assert!((back.volume() - 4.0).abs() < 1e-12);
    }
}
