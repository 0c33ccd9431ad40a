//! Property tests for the structural invariants: convexity of evaluators,
//! envelope validity, sublevel monotonicity, metric axioms and positivity,
//! translation invariances, the empty-set extension of the Hausdorff
//! metric, and the Minkowski support identity.

use epimetrics::body::{self, ConvexBody};
use epimetrics::linalg::Matrix;
use epimetrics::metric::{delta_conjugate, delta_zeta_p};
use epimetrics::sampler;
use epimetrics::transform::{biconjugate, conjugate, inf_convolution};
use epimetrics::{ConvexFunction, NumericConfig, WeightFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> NumericConfig {
    NumericConfig::fast()
}

/// Deterministic corpus element from a proptest seed.
fn function_from_seed(seed: u64, dim: usize) -> ConvexFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (seed % 4, dim) {
        (0, 2) => sampler::random_indicator_2d(&mut rng, 1.3, (-0.5, 0.8)),
        (1, 2) => sampler::random_quadratic_2d(&mut rng),
        (2, 2) => ConvexFunction::norm_cone(2, 0.5 + (seed % 7) as f64 * 0.3).unwrap(),
        (_, 2) => sampler::random_indicator_2d(&mut rng, 0.9, (-0.2, 0.4)),
        (0, _) => sampler::random_indicator_1d(&mut rng, (-0.5, 0.8)),
        (1, _) => sampler::random_quadratic_1d(&mut rng),
        (2, _) => ConvexFunction::norm_cone(1, 0.5 + (seed % 7) as f64 * 0.3).unwrap(),
        _ => ConvexFunction::affine_norm(1, 0.4 + (seed % 5) as f64 * 0.2, -0.3).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// evaluate(theta x + (1-theta) y) <= theta u(x) + (1-theta) u(y) + eps.
    #[test]
    fn evaluate_is_convex(seed in 0u64..5000, theta in 0.0f64..1.0,
                          x0 in -2.0f64..2.0, y0 in -2.0f64..2.0,
                          x1 in -2.0f64..2.0, y1 in -2.0f64..2.0) {
        let u = function_from_seed(seed, 2);
        let a = [x0, y0];
        let b = [x1, y1];
        let m = [theta * a[0] + (1.0 - theta) * b[0], theta * a[1] + (1.0 - theta) * b[1]];
        let ua = u.evaluate(&a).unwrap();
        let ub = u.evaluate(&b).unwrap();
        let um = u.evaluate(&m).unwrap();
        if ua.is_finite() && ub.is_finite() {
            prop_assert!(um <= theta * ua + (1.0 - theta) * ub + 1e-7);
        }
    }

    /// u(x) >= a|x| + b for the stored envelope at sampled x.
    #[test]
    fn envelope_is_valid(seed in 0u64..5000, x in -6.0f64..6.0, y in -6.0f64..6.0) {
        let u = function_from_seed(seed, 2);
        let (a, b) = u.envelope().unwrap();
        let v = u.evaluate(&[x, y]).unwrap();
        let r = (x * x + y * y).sqrt();
        prop_assert!(v >= a * r + b - 1e-9, "envelope violated: {v} < {}", a * r + b);
    }

    /// The reported global minimum matches the infimum over a dense
    /// evaluation grid within the optimization tolerance.
    #[test]
    fn global_min_matches_dense_grid(seed in 0u64..5000) {
        let u = function_from_seed(seed, 2);
        let (argmin, value) = u.global_min().unwrap();
        prop_assert!((u.evaluate(&argmin).unwrap() - value).abs() < 1e-6);
        let r = 4.0;
        let mut grid_min = f64::INFINITY;
        for i in 0..=80 {
            for j in 0..=80 {
                let x = [-r + 2.0 * r * i as f64 / 80.0, -r + 2.0 * r * j as f64 / 80.0];
                grid_min = grid_min.min(u.evaluate(&x).unwrap());
            }
        }
        // The analytic minimum never exceeds any sampled value, and the
        // dense grid comes close from above.
        prop_assert!(value <= grid_min + 1e-8, "min {value} above grid {grid_min}");
    }

    /// Sublevel sets are nested: support dominance on sampled directions.
    #[test]
    fn sublevel_sets_nest(seed in 0u64..5000, t in -0.2f64..2.0, dt in 0.01f64..1.5) {
        let u = function_from_seed(seed, 2);
        let s1 = u.sublevel_set(t).unwrap();
        let s2 = u.sublevel_set(t + dt).unwrap();
        if !s1.is_empty() {
            prop_assert!(!s2.is_empty());
            for k in 0..32 {
                let th = std::f64::consts::TAU * k as f64 / 32.0;
                let dir = [th.cos(), th.sin()];
                prop_assert!(s1.support(&dir).unwrap() <= s2.support(&dir).unwrap() + 1e-7);
            }
        }
    }

    /// Minkowski sums add support functions on sampled directions.
    #[test]
    fn minkowski_support_additivity(sa in 1u64..4000, sb in 1u64..4000) {
        let mut ra = ChaCha8Rng::seed_from_u64(sa);
        let mut rb = ChaCha8Rng::seed_from_u64(sb);
        let k = sampler::random_polygon(&mut ra, 7, 1.2, [0.0, 0.0]);
        let l = sampler::random_polygon(&mut rb, 7, 0.8, [0.5, -0.1]);
        let s = body::minkowski_sum(&k, &l, 720).unwrap();
        for i in 0..64 {
            let th = std::f64::consts::TAU * i as f64 / 64.0;
            let u = [th.cos(), th.sin()];
            let expect = k.support(&u).unwrap() + l.support(&u).unwrap();
            prop_assert!((s.support(&u).unwrap() - expect).abs() < 1e-9);
        }
    }

    /// The bounded-penalty extension satisfies the triangle inequality in
    /// every empty/nonempty combination.
    #[test]
    fn hat_extension_triangle(sa in 1u64..3000, sb in 1u64..3000, sc in 1u64..3000,
                              mask in 0usize..8) {
        let mk = |seed: u64, empty: bool| -> ConvexBody {
            if empty {
                ConvexBody::Empty
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                sampler::random_polygon(&mut rng, 7, 1.3, [0.2, -0.4])
            }
        };
        let k = mk(sa, mask & 1 != 0);
        let l = mk(sb, mask & 2 != 0);
        let m = mk(sc, mask & 4 != 0);
        let dkl = body::hausdorff_extended_hat(&k, &l).unwrap();
        let dkm = body::hausdorff_extended_hat(&k, &m).unwrap();
        let dml = body::hausdorff_extended_hat(&m, &l).unwrap();
        prop_assert!(dkl <= dkm + dml + 1e-9, "{dkl} > {dkm} + {dml}");
        let dlk = body::hausdorff_extended_hat(&l, &k).unwrap();
        prop_assert!((dkl - dlk).abs() < 1e-12);
    }

    /// Positivity: distinct indicator pairs separate by more than three
    /// budgets under the weighted L^1 metric and the conjugate metric.
    #[test]
    fn metric_positivity(sa in 1u64..2000, sb in 2001u64..4000) {
        let mut ra = ChaCha8Rng::seed_from_u64(sa);
        let mut rb = ChaCha8Rng::seed_from_u64(sb);
        let u = sampler::random_indicator_2d(&mut ra, 1.2, (-0.2, 0.4));
        let v = sampler::random_indicator_2d(&mut rb, 1.2, (0.5, 0.9));
        let z = WeightFunction::exponential(1.0);
        let d1 = delta_zeta_p(&u, &v, &z, 1.0, &cfg()).unwrap();
        prop_assert!(d1.value > 3.0 * d1.budget(), "L^1 {} vs budget {}", d1.value, d1.budget());
        let dc = delta_conjugate(&u, &v, &cfg()).unwrap();
        prop_assert!(dc.value > 3.0 * dc.budget(), "conj {} vs budget {}", dc.value, dc.budget());
        let dh = epimetrics::metric::delta_zeta_h(&u, &v, &z, &cfg()).unwrap();
        prop_assert!(dh.value > 3.0 * dh.budget(), "level-set {} vs budget {}", dh.value, dh.budget());
    }

    /// Translation invariance in x of the weighted L^p metric.
    #[test]
    fn delta_zeta_p_translation_invariance(sa in 1u64..2000, sb in 2001u64..4000,
                                           tx in -1.5f64..1.5, ty in -1.5f64..1.5) {
        let mut ra = ChaCha8Rng::seed_from_u64(sa);
        let mut rb = ChaCha8Rng::seed_from_u64(sb);
        let u = sampler::random_indicator_2d(&mut ra, 1.2, (-0.3, 0.5));
        let v = sampler::random_indicator_2d(&mut rb, 1.2, (-0.3, 0.5));
        let z = WeightFunction::exponential(1.0);
        let d0 = delta_zeta_p(&u, &v, &z, 1.0, &cfg()).unwrap();
        let us = ConvexFunction::shifted(u, vec![tx, ty], 0.0).unwrap();
        let vs = ConvexFunction::shifted(v, vec![tx, ty], 0.0).unwrap();
        let d1 = delta_zeta_p(&us, &vs, &z, 1.0, &cfg()).unwrap();
        prop_assert!((d0.value - d1.value).abs() <= d0.budget() + d1.budget() + 1e-9);
    }

    /// Biconjugation is dominated by the function and matches it for the
    /// closed convex forms.
    #[test]
    fn biconjugate_round_trip(seed in 0u64..4000, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let u = function_from_seed(seed, 2);
        let b = biconjugate(&u, &cfg()).unwrap();
        let vu = u.evaluate(&[x, y]).unwrap();
        let vb = b.evaluate(&[x, y]).unwrap();
        if vu.is_finite() {
            prop_assert!(vb <= vu + 1e-7, "u** must not exceed u: {vb} > {vu}");
            prop_assert!((vb - vu).abs() < 1e-6, "u** != u at ({x},{y}): {vb} vs {vu}");
        }
    }

    /// Fenchel inequality on random sample pairs.
    #[test]
    fn fenchel_inequality(seed in 0u64..4000, x in -2.0f64..2.0, y in -2.0f64..2.0,
                          px in -2.0f64..2.0, py in -2.0f64..2.0) {
        let u = function_from_seed(seed, 2);
        let c = conjugate(&u, &cfg()).unwrap();
        let ux = u.evaluate(&[x, y]).unwrap();
        let cy = c.function.evaluate(&[px, py]).unwrap();
        if ux.is_finite() && cy.is_finite() {
            prop_assert!(ux + cy >= x * px + y * py - 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Hausdorff and symmetric-difference convergence agree on shrinking
    /// perturbation families of bodies with interior.
    #[test]
    fn hausdorff_symdiff_equivalence(seed in 1u64..3000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = sampler::random_polygon(&mut rng, 7, 1.3, [0.0, 0.0]);
        let mut prev_h = f64::INFINITY;
        let mut prev_s = f64::INFINITY;
        for j in [1u32, 2, 4, 8, 16] {
            let eps = 1.0 / j as f64;
            let ball = ConvexBody::ball(vec![0.0, 0.0], eps).unwrap();
            let kj = body::minkowski_sum(&k, &ball, 240).unwrap();
            let h = body::hausdorff(&k, &kj).unwrap();
            let (s, serr) = body::symmetric_difference_volume(&k, &kj, 20_000, seed).unwrap();
            prop_assert!((h - eps).abs() < 1e-3, "d_H of outer parallel body is eps, got {h}");
            prop_assert!(h <= prev_h + 1e-9 && s <= prev_s + serr + 1e-9);
            prev_h = h;
            prev_s = s;
        }
        // Both end small together.
        prop_assert!(prev_h < 0.07 && prev_s < 1.0);
    }
}

/// epi(I_K box I_L) = epi I_{K+L}: support functions of sublevel sets
/// agree on sampled directions.
#[test]
fn inf_convolution_adds_epigraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        let k = sampler::random_polygon(&mut rng, 7, 1.1, [0.0, 0.0]);
        let l = sampler::random_polygon(&mut rng, 7, 0.7, [0.3, 0.3]);
        let u = ConvexFunction::indicator(k.clone(), 0.0).unwrap();
        let v = ConvexFunction::indicator(l.clone(), 0.0).unwrap();
        let w = inf_convolution(&u, &v, &cfg()).unwrap();
        let sum = body::minkowski_sum(&k, &l, 720).unwrap();
        let sub = w.sublevel_set(0.0).unwrap();
        for i in 0..64 {
            let th = std::f64::consts::TAU * i as f64 / 64.0;
            let dir = [th.cos(), th.sin()];
            let a = sub.support(&dir).unwrap();
            let b = sum.support(&dir).unwrap();
            assert!((a - b).abs() < 1e-7, "support mismatch {a} vs {b}");
        }
    }
}

/// Thread count must not change a single bit of any result: reductions
/// are collected in input order and Monte Carlo strata own their streams.
#[cfg(feature = "parallel")]
#[test]
fn results_are_bit_identical_across_thread_counts() {
    let compute = || {
        let cfg = NumericConfig::default();
        let z = WeightFunction::exponential(1.0);
        let u = sampler::random_quadratic_2d(&mut ChaCha8Rng::seed_from_u64(21));
        let v = sampler::random_quadratic_2d(&mut ChaCha8Rng::seed_from_u64(22));
        let d = delta_zeta_p(&u, &v, &z, 1.0, &cfg).unwrap().value;
        let k = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let l = sampler::random_polygon(&mut ChaCha8Rng::seed_from_u64(23), 7, 1.2, [0.2, 0.0]);
        let (mc, _) = body::symmetric_difference_volume(&k, &l, 40_000, 5).unwrap();
        (d.to_bits(), mc.to_bits())
    };
    let run_in = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(compute)
    };
    let one = run_in(1);
    let many = run_in(4);
    assert_eq!(one, many, "thread count changed the bits");
}

/// Grid functions can be fed back through serde and keep their values.
#[test]
fn function_specs_round_trip_through_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fns = vec![
        sampler::random_indicator_2d(&mut rng, 1.0, (-0.2, 0.6)),
        sampler::random_quadratic_2d(&mut rng),
        ConvexFunction::norm_cone(2, 1.7).unwrap(),
        ConvexFunction::affine_norm(2, 0.8, -0.1).unwrap(),
        ConvexFunction::support_fn(ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap()).unwrap(),
        ConvexFunction::maximum(vec![
            ConvexFunction::norm_cone(2, 1.0).unwrap(),
            ConvexFunction::quadratic(Matrix::scaled_identity(2, 0.5), vec![0.0, 0.0], -0.3)
                .unwrap(),
        ])
        .unwrap(),
    ];
    for f in fns {
        let s = serde_json::to_string(&f).unwrap();
        let back: ConvexFunction = serde_json::from_str(&s).unwrap();
        for p in [[0.0, 0.0], [0.7, -0.4], [-1.3, 0.9]] {
            let a = f.evaluate(&p).unwrap();
            let b = back.evaluate(&p).unwrap();
            if a.is_finite() {
                assert!((a - b).abs() < 1e-12);
            } else {
                assert!(b.is_infinite());
            }
        }
    }
}
