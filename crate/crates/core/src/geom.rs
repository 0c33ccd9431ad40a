//! Planar convex geometry: hulls, clipping, Minkowski sums and exact
//! extrema of support-function differences over the circle.
//!
//! Everything here works on counterclockwise convex polygons given as
//! `[f64; 2]` vertex lists. The routines are exact up to floating point;
//! degeneracy thresholds are relative to the input scale.

pub type P2 = [f64; 2];

const EPS: f64 = 1e-12;

pub fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

fn scale_of(pts: &[P2]) -> f64 {
    pts.iter()
        .fold(1.0_f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
}

/// Monotone-chain convex hull, counterclockwise, no duplicate endpoints.
/// Collinear interior points are dropped.
pub fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < EPS && (a[1] - b[1]).abs() < EPS);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let eps = EPS * scale_of(&pts).powi(2);
    let mut hull: Vec<P2> = Vec::with_capacity(2 * n);
    for &p in pts.iter() {
        while hull.len() >= 2
            && cross(
                sub(hull[hull.len() - 1], hull[hull.len() - 2]),
                sub(p, hull[hull.len() - 2]),
            ) <= eps
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len
            && cross(
                sub(hull[hull.len() - 1], hull[hull.len() - 2]),
                sub(p, hull[hull.len() - 2]),
            ) <= eps
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Signed area by the shoelace formula; positive for counterclockwise input.
pub fn polygon_area(vs: &[P2]) -> f64 {
    if vs.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..vs.len() {
        let j = (i + 1) % vs.len();
        s += cross(vs[i], vs[j]);
    }
    0.5 * s
}

/// Vertices in convex position, counterclockwise, no duplicates.
pub fn is_convex_ccw(vs: &[P2]) -> bool {
    let n = vs.len();
    if n < 3 {
        return n > 0;
    }
    let eps = EPS * scale_of(vs).powi(2).max(1.0);
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let c = vs[(i + 2) % n];
        if cross(sub(b, a), sub(c, b)) < -eps {
            return false;
        }
        if norm(sub(b, a)) < EPS * scale_of(vs).max(1.0) {
            return false;
        }
    }
    true
}

pub fn contains_point(vs: &[P2], p: P2) -> bool {
    let n = vs.len();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return norm(sub(p, vs[0])) < 1e-9 * scale_of(vs).max(1.0);
    }
    let eps = 1e-9 * scale_of(vs).max(1.0).powi(2);
    if n == 2 {
        // Segment: p on the segment within tolerance.
        let d = sub(vs[1], vs[0]);
        let t = dot(sub(p, vs[0]), d) / dot(d, d).max(1e-300);
        let proj = add(vs[0], [d[0] * t.clamp(0.0, 1.0), d[1] * t.clamp(0.0, 1.0)]);
        return norm(sub(p, proj)) < eps;
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if cross(sub(vs[j], vs[i]), sub(p, vs[i])) < -eps {
            return false;
        }
    }
    true
}

/// Euclidean distance from `p` to the convex polygon (0 if inside).
pub fn distance_to_polygon(vs: &[P2], p: P2) -> f64 {
    match vs.len() {
        0 => f64::INFINITY,
        1 => norm(sub(p, vs[0])),
        _ => {
            if vs.len() >= 3 && contains_point(vs, p) {
                return 0.0;
            }
            let n = vs.len();
            let mut best = f64::INFINITY;
            for i in 0..n {
                let a = vs[i];
                let b = vs[(i + 1) % n];
                best = best.min(distance_to_segment(p, a, b));
                if n == 2 {
                    break;
                }
            }
            best
        }
    }
}

pub fn distance_to_segment(p: P2, a: P2, b: P2) -> f64 {
    let d = sub(b, a);
    let len2 = dot(d, d);
    if len2 < 1e-300 {
        return norm(sub(p, a));
    }
    let t = (dot(sub(p, a), d) / len2).clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * d[0], a[1] + t * d[1]]))
}

/// Support value max_{v in polygon} <v, u>.
pub fn polygon_support(vs: &[P2], u: P2) -> f64 {
    vs.iter().fold(f64::NEG_INFINITY, |m, v| m.max(dot(*v, u)))
}

pub fn polygon_support_argmax(vs: &[P2], u: P2) -> P2 {
    let mut best = vs[0];
    let mut bestv = dot(best, u);
    for &v in &vs[1..] {
        let s = dot(v, u);
        if s > bestv {
            bestv = s;
            best = v;
        }
    }
    best
}

/// Clip a convex polygon by the halfplane { x : <x, normal> <= offset }.
fn clip_halfplane(vs: &[P2], normal: P2, offset: f64) -> Vec<P2> {
    let n = vs.len();
    if n == 0 {
        return Vec::new();
    }
    let eps = 1e-12 * scale_of(vs).max(1.0) * norm(normal).max(1.0);
    let mut out: Vec<P2> = Vec::with_capacity(n + 2);
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let da = dot(a, normal) - offset;
        let db = dot(b, normal) - offset;
        if da <= eps {
            out.push(a);
        }
        if (da < -eps && db > eps) || (da > eps && db < -eps) {
            let t = da / (da - db);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    dedup_ring(out)
}

fn dedup_ring(mut vs: Vec<P2>) -> Vec<P2> {
    if vs.is_empty() {
        return vs;
    }
    let eps = 1e-11 * scale_of(&vs).max(1.0);
    let mut out: Vec<P2> = Vec::with_capacity(vs.len());
    for v in vs.drain(..) {
        if out.is_empty() || norm(sub(v, *out.last().unwrap())) > eps {
            out.push(v);
        }
    }
    if out.len() > 1 && norm(sub(out[0], *out.last().unwrap())) <= eps {
        out.pop();
    }
    out
}

/// Intersection of two convex polygons (Sutherland-Hodgman against each
/// edge of `clip`). Returns an empty list for an empty intersection.
pub fn convex_intersection(subject: &[P2], clip: &[P2]) -> Vec<P2> {
    if subject.is_empty() || clip.len() < 3 {
        return Vec::new();
    }
    let mut cur = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let edge = sub(b, a);
        // Interior lies to the left of each ccw edge: <x - a, normal> <= 0
        // with outward normal (edge.y, -edge.x).
        let normal = [edge[1], -edge[0]];
        cur = clip_halfplane(&cur, normal, dot(a, normal));
        if cur.is_empty() {
            return cur;
        }
    }
    cur
}

/// Intersection of halfplanes { <x, u_i> <= h_i } within a large bounding
/// box. Returns the (possibly empty) polygon.
pub fn halfplane_intersection(normals: &[P2], offsets: &[f64], bound: f64) -> Vec<P2> {
    let b = bound.max(1.0);
    let mut cur = vec![[-b, -b], [b, -b], [b, b], [-b, b]];
    for (u, &h) in normals.iter().zip(offsets) {
        cur = clip_halfplane(&cur, *u, h);
        if cur.is_empty() {
            return cur;
        }
    }
    cur
}

/// Minkowski sum of two convex ccw polygons by merging edge fans.
pub fn minkowski_sum(a: &[P2], b: &[P2]) -> Vec<P2> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len() == 1 {
        return b.iter().map(|v| add(*v, a[0])).collect();
    }
    if b.len() == 1 {
        return a.iter().map(|v| add(*v, b[0])).collect();
    }
    // Robust fallback covering segments and collinear edges: hull of
    // pairwise sums. Quadratic, but polygon sizes here are small.
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for &p in a {
        for &q in b {
            pts.push(add(p, q));
        }
    }
    convex_hull(&pts)
}

/// Exact minimum and maximum of u -> h_A(u) - h_B(u) over the unit circle,
/// where each side is the support function of a polygon (vertex list) plus
/// an optional ball term `center + radius`.
///
/// The difference restricted to an arc on which the active vertices are
/// fixed has the form A cos t + B sin t + C, so each arc is extremized in
/// closed form. Arc endpoints are the edge-normal angles of both bodies.
pub struct SupportedBody2 {
    pub vertices: Vec<P2>,
    pub ball_center: P2,
    pub ball_radius: f64,
}

impl SupportedBody2 {
    pub fn polygon(vs: &[P2]) -> Self {
        Self {
            vertices: vs.to_vec(),
            ball_center: [0.0, 0.0],
            ball_radius: 0.0,
        }
    }

    pub fn ball(center: P2, radius: f64) -> Self {
        Self {
            vertices: vec![[0.0, 0.0]],
            ball_center: center,
            ball_radius: radius,
        }
    }

    fn support_vertex(&self, u: P2) -> P2 {
        polygon_support_argmax(&self.vertices, u)
    }

    fn breakpoint_angles(&self, out: &mut Vec<f64>) {
        let n = self.vertices.len();
        if n < 2 {
            return;
        }
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = sub(b, a);
            if norm(e) < 1e-300 {
                continue;
            }
            // The active vertex switches where u is perpendicular to the
            // edge; push both antipodal angles so the arc decomposition is
            // independent of orientation conventions.
            let th = (-e[0]).atan2(e[1]);
            out.push(th.rem_euclid(std::f64::consts::TAU));
            out.push((th + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU));
            if n == 2 {
                break;
            }
        }
    }
}

pub fn support_diff_extrema(a: &SupportedBody2, b: &SupportedBody2) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let mut angles = Vec::new();
    a.breakpoint_angles(&mut angles);
    b.breakpoint_angles(&mut angles);
    angles.push(0.0);
    angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
    angles.dedup_by(|x, y| (*x - *y).abs() < 1e-14);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let m = angles.len();
    for i in 0..m {
        let t0 = angles[i];
        let t1 = if i + 1 < m {
            angles[i + 1]
        } else {
            angles[0] + tau
        };
        let mid = 0.5 * (t0 + t1);
        let umid = [mid.cos(), mid.sin()];
        let va = a.support_vertex(umid);
        let vb = b.support_vertex(umid);
        // h_A - h_B on this arc: <va - vb + ca - cb, u(t)> + (ra - rb).
        let d = [
            va[0] - vb[0] + a.ball_center[0] - b.ball_center[0],
            va[1] - vb[1] + a.ball_center[1] - b.ball_center[1],
        ];
        let c = a.ball_radius - b.ball_radius;
        let eval = |t: f64| d[0] * t.cos() + d[1] * t.sin() + c;
        for v in [eval(t0), eval(t1)] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let r = norm(d);
        if r > 0.0 {
            let peak = d[1].atan2(d[0]);
            for cand in [peak, peak + std::f64::consts::PI] {
                for k in [-1.0, 0.0, 1.0] {
                    let t = cand + k * tau;
                    if t >= t0 - 1e-14 && t <= t1 + 1e-14 {
                        let v = eval(t);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
        }
    }
    (lo, hi)
}
