//! Deterministic random corpora for tests, the acceptance suite and the
//! convergence lab: convex polygons, admissible function pairs and
//! volume-preserving linear maps. Everything draws from a caller-provided
//! ChaCha generator, so corpora are reproducible per seed.

use crate::body::ConvexBody;
use crate::func::ConvexFunction;
use crate::geom;
use crate::linalg::Matrix;
use rand::Rng;

/// Random convex polygon: hull of points in a disk, regenerated until it
/// has enough area to be a stable test subject.
pub fn random_polygon<R: Rng>(
    rng: &mut R,
    points: usize,
    radius: f64,
    center: [f64; 2],
) -> ConvexBody {
    loop {
        let pts: Vec<[f64; 2]> = (0..points.max(4))
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                let th = rng.gen::<f64>() * std::f64::consts::TAU;
                [center[0] + r * th.cos(), center[1] + r * th.sin()]
            })
            .collect();
        let hull = geom::convex_hull(&pts);
        if hull.len() >= 3 && geom::polygon_area(&hull) > 0.15 * radius * radius {
            return ConvexBody::polygon(hull).expect("hull is convex ccw");
        }
    }
}

/// Random full-dimensional indicator function I_K + offset in 2-d.
pub fn random_indicator_2d<R: Rng>(
    rng: &mut R,
    radius: f64,
    offset_range: (f64, f64),
) -> ConvexFunction {
    let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let body = random_polygon(rng, 8, radius, c);
    let t = rng.gen_range(offset_range.0..offset_range.1);
    ConvexFunction::indicator(body, t).expect("non-degenerate polygon")
}

/// Random 1-d interval indicator.
pub fn random_indicator_1d<R: Rng>(rng: &mut R, offset_range: (f64, f64)) -> ConvexFunction {
    let a = rng.gen_range(-2.0..1.0);
    let b = a + rng.gen_range(0.3..2.5);
    let t = rng.gen_range(offset_range.0..offset_range.1);
    ConvexFunction::indicator(ConvexBody::interval(a, b).unwrap(), t).unwrap()
}

/// Random coercive 1-d quadratic a x^2 + b x + c with a bounded away
/// from zero.
pub fn random_quadratic_1d<R: Rng>(rng: &mut R) -> ConvexFunction {
    let a = rng.gen_range(0.4..2.0);
    let b = rng.gen_range(-1.5..1.5);
    let c = rng.gen_range(-1.0..1.0);
    ConvexFunction::quadratic(Matrix::scaled_identity(1, a), vec![b], c).unwrap()
}

/// Random positive-definite 2-d quadratic form.
pub fn random_quadratic_2d<R: Rng>(rng: &mut R) -> ConvexFunction {
    let a: f64 = rng.gen_range(0.4..1.6);
    let d: f64 = rng.gen_range(0.4..1.6);
    let omax = (a * d).sqrt() * 0.8;
    let o = rng.gen_range(-omax..omax);
    let m = Matrix::from_rows(&[vec![a, o], vec![o, d]]).unwrap();
    let lin = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let c = rng.gen_range(-0.5..0.5);
    ConvexFunction::quadratic(m, lin, c).unwrap()
}

/// Random rotation composed with a unit-determinant shear: |det| = 1.
pub fn random_unimodular_2d<R: Rng>(rng: &mut R) -> Matrix {
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = rng.gen_range(-0.6..0.6);
    let rot = Matrix::from_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]).unwrap();
    let shear = Matrix::from_rows(&[vec![1.0, s], vec![0.0, 1.0]]).unwrap();
    rot.mul(&shear)
}

/// Random invertible map with determinant in the given magnitude range.
pub fn random_gl_2d<R: Rng>(rng: &mut R, det_range: (f64, f64)) -> Matrix {
    let det = rng.gen_range(det_range.0..det_range.1);
    let scale = det.abs().sqrt();
    random_unimodular_2d(rng).scale(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn polygons_are_valid_and_reproducible() {
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = random_polygon(&mut a, 8, 1.0, [0.0, 0.0]);
        let q = random_polygon(&mut b, 8, 1.0, [0.0, 0.0]);
        assert_eq!(p.volume().to_bits(), q.volume().to_bits());
        assert!(p.volume() > 0.1);
    }

    #[test]
    fn unimodular_has_unit_determinant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_unimodular_2d(&mut rng);
            assert!((m.det().abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gl_det_in_range() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let m = random_gl_2d(&mut rng, (0.5, 2.0));
            let d = m.det().abs();
            assert!((0.5..2.0).contains(&d), "det {d}");
        }
    }
}
