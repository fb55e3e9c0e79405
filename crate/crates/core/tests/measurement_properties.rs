use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotlab_core::fit::line_fit;
use rotlab_core::integrability::{radial_exp_integral, NumericVerdict};
use rotlab_core::maps::MapSpec;
use rotlab_core::modulus::{
    crossing_bound_from_moduli, crossing_count, estimate_moduli, lemma_min_closed, lemma_min_oracle,
    partition_sum, ray_intersections, trace_image_curve, weighted_modulus_upper, Segment,
};
use rotlab_core::plane::Complex;
use rotlab_core::rotation::{gamma_estimate, winding_along_ray};

fn log_radii(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (from + (to - from) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[test]
fn rotation_only_winding_outgrows_log_modulus() {
    let h0 = MapSpec::rotation_only(1.0, 1.0).unwrap();
    let origin = Complex::new(0.0, 0.0);
    let ratio = |l: f64| {
        let r = (-l).exp();
        let w = winding_along_ray(&h0, origin, 0.0, r).unwrap().abs();
        let m = h0.evaluate(Complex::new(r, 0.0)).norm();
        assert!((m.ln() + l).abs() < 1e-9 * l);
        w / m.ln().abs()
    };
    // winding / |log|h0(r)|| = c2 sqrt(log(1/r))
    let (r10, r100) = (ratio(10.0), ratio(100.0));
    assert!((r100 / r10 - 10f64.sqrt()).abs() < 1e-6);
    assert!(ratio(400.0) > 2.0 * r100 * (1.0 - 1e-9));
}

#[test]
fn admissible_spirals_stay_below_the_sharpness_ceiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // deeper radii underflow |h| for c1 near 1
    let radii = log_radii(-2.0, -20.0, 12);
    let mut checked = 0;
    while checked < 25 {
        let c1 = rng.random_range(0.02..0.98);
        let c2 = rng.random_range(-0.5..0.5);
        let p = rng.random_range(0.5..3.0);
        let spec = MapSpec::spiral(c1, c2, p).unwrap();
        if !spec.integrability_predicate(p) {
            continue;
        }
        let g = gamma_estimate(&spec, Complex::new(0.0, 0.0), &radii).unwrap();
        assert!(p * g.value < 0.5, "{c1} {c2} {p}: {}", g.value);
        checked += 1;
    }
}

#[test]
fn winding_is_monotone_in_radius() {
    for spec in [
        MapSpec::spiral(0.2, 0.3, 1.0).unwrap(),
        MapSpec::rotation_only(0.4, 1.0).unwrap(),
        MapSpec::generalized_spiral(0.3, 0.3, 0.5, 1.0).unwrap(),
    ] {
        let mut prev = 0.0;
        for r in log_radii(-0.1, -25.0, 40) {
            let w = winding_along_ray(&spec, Complex::new(0.0, 0.0), 1.0, r).unwrap().abs();
            assert!(w >= prev - 1e-12, "{spec:?} at {r}");
            prev = w;
        }
    }
}

#[test]
fn moduli_inequality_chain_and_growth() {
    let h = MapSpec::spiral(0.2, 0.3, 1.0).unwrap();
    let mut xs = Vec::new();
    let mut ns = Vec::new();
    for k in 5..=14 {
        let z0 = 2f64.powi(-k);
        let est = estimate_moduli(&h, z0, 1.0, 16).unwrap();
        let upper = est.upper.total();
        assert!(est.lower <= upper, "k = {k}");
        let n = est.n_z0.max(0) as f64;
        if let Some(x1) = est.smallest_crossing() {
            assert!(est.lower >= 2.0 * PI * n * n / (1.0 / x1).ln() * (1.0 - 1e-9), "k = {k}");
            let n_bound = crossing_bound_from_moduli(upper, x1);
            assert!(n <= n_bound, "k = {k}");
            let l = 1.0 / z0;
            xs.push(l.ln().powi(2));
            ns.push(n_bound / l.ln().powi(2));
        }
    }
    // n(z0) <= C log^2(1/z0) with a finite C over the whole sweep
    assert!(xs.len() >= 6);
    assert!(ns.iter().all(|c| c.is_finite() && *c < 10.0));
}

#[test]
fn upper_bound_grows_like_log_squared() {
    let h = MapSpec::spiral(0.2, 0.3, 1.0).unwrap();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 5..=14 {
        let z0 = 2f64.powi(-k);
        xs.push((1.0 / z0).ln().powi(2));
        ys.push(weighted_modulus_upper(&h, z0, 1.0).unwrap().total());
    }
    let fit = line_fit(&xs, &ys).unwrap();
    assert!(fit.slope > 0.0);
    assert!(fit.r_squared > 0.99, "{fit:?}");
}

#[test]
fn spiral_crossings_on_a_ray() {
    let h = MapSpec::spiral(0.4, 0.45, 1.0).unwrap();
    let z0 = 2f64.powi(-14);
    let fe = trace_image_curve(&h, Segment::E { z0 }, 64).unwrap();
    let inner = h.evaluate(Complex::new(z0, 0.0)).norm();
    for theta in [0.0, 1.0, 2.5, -2.0] {
        for r in ray_intersections(&fe.points, theta) {
            assert!(r >= inner * (1.0 - 1e-9) && r <= 1.0 + 1e-12);
        }
    }
    let w = h.radial_argument(z0);
    let est = estimate_moduli(&h, z0, 1.0, 16).unwrap();
    let floor = (w / (2.0 * PI)).floor() - 1.0;
    assert_eq!(est.n_z0 as f64, floor);
    assert_eq!(crossing_count(&h, z0).unwrap() as f64, floor);
    for rec in &est.records {
        assert!(rec.pairs.len() as f64 >= floor, "theta {}", rec.theta);
        for p in &rec.pairs {
            assert!(0.0 < p.x && p.x < p.y && p.y < 1.0);
        }
        for w in rec.pairs.windows(2) {
            assert!(w[0].y <= w[1].x);
        }
    }
}

#[test]
fn identity_has_no_crossing_pairs() {
    let id = MapSpec::identity(1.0).unwrap();
    let est = estimate_moduli(&id, 2f64.powi(-10), 1.0, 16).unwrap();
    assert_eq!(est.lower, 0.0);
    assert_eq!(est.n_z0, -1);
}

#[test]
fn lemma_oracle_agrees_and_perturbations_never_win() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for a in [0.5, 0.1, 0.01] {
        for n in 2..=6 {
            let closed = lemma_min_closed(a, n).unwrap();
            let oracle = lemma_min_oracle(a, n).unwrap();
            assert!((oracle.value - closed).abs() / closed < 1e-9);
            for _ in 0..200 {
                let mut part = oracle.partition.clone();
                for j in 1..n {
                    let (lo, hi) = (part[j - 1], oracle.partition[j + 1]);
                    part[j] = (part[j] * (1.0 + rng.random_range(-0.2..0.2))).clamp(lo * 1.0001, hi * 0.9999);
                }
                assert!(partition_sum(&part).unwrap() >= closed * (1.0 - 1e-12));
            }
        }
    }
}

#[test]
fn trend_classifier_agrees_with_exponent_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 30 {
        let p = rng.random_range(0.5..2.5);
        let spec = match checked % 3 {
            0 => MapSpec::spiral(rng.random_range(0.05..1.5), rng.random_range(-1.0..1.0), p),
            1 => MapSpec::rotation_only(rng.random_range(-1.5..1.5), p),
            _ => MapSpec::generalized_spiral(
                rng.random_range(0.1..1.0),
                rng.random_range(-0.8..0.8),
                [-0.5, 0.0, 0.5][rng.random_range(0..3)],
                p,
            ),
        }
        .unwrap();
        // the exponent gap p beta - 2 equals 2 p (lhs - 1/p)
        if spec.criticality_margin(p).abs() * p < 0.05 {
            continue;
        }
        let beta = spec.asymptotic_distortion_coefficient().unwrap().value();
        let v = radial_exp_integral(&spec, p, 0.5).unwrap();
        let want = p * beta < 2.0;
        assert_eq!(v.numeric.decided(), Some(want), "{spec:?} p {p}: {v:?}");
        if let NumericVerdict::Converged { value, log_value } = v.numeric {
            assert!((value.ln() - log_value).abs() < 1e-12 * log_value.abs().max(1.0));
        }
        checked += 1;
    }
}
