use std::f64::consts::PI;

use ingham::kernels::{certify_constants, h_transform, KernelShape, Support, Variant};
use ingham_oracles::{convolve, integrate_panels, raised_cosine_transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn raised_cosine(w: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| if x.abs() <= w { (PI * x / (2.0 * w)).cos().powi(2) } else { 0.0 }
}

fn raised_cosine_slope(w: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        if x.abs() <= w {
            -(PI / (2.0 * w)) * (PI * x / w).sin()
        } else {
            0.0
        }
    }
}

#[test]
fn transform_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for gamma in [0.3, 1.0, 2.5] {
        for _ in 0..100 {
            let t = rng.gen_range(-20.0 * gamma..20.0 * gamma);
            let err = (h_transform(gamma, t) - raised_cosine_transform(gamma, t)).abs();
            assert!(err <= 1e-10, "gamma {gamma} t {t}: {err}");
        }
    }
}

#[test]
fn window_matches_numerical_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for support in [Support::Exact, Support::Truncated] {
        for gamma in [0.5, 1.0, 2.0] {
            let direct = KernelShape::direct(gamma).unwrap().with_support(support);
            let r = 1.5 * PI / gamma;
            let inverse = KernelShape::inverse(gamma, r).unwrap().with_support(support);
            let w = direct.half_width();
            for _ in 0..100 {
                let x = rng.gen_range(-gamma..gamma);
                let hh = convolve(raised_cosine(w), raised_cosine(w), w, x);
                let dd = convolve(raised_cosine_slope(w), raised_cosine_slope(w), w, x);
                assert!((direct.window(x) - hh).abs() <= 1e-10, "{support:?} {gamma} {x}");
                assert!((inverse.window(x) - (r * r * hh + dd)).abs() <= 1e-10 * r * r, "{support:?} {gamma} {x}");
            }
        }
    }
}

#[test]
fn transform_pair_inverts() {
    // (2π)^{-1}∫ g(t) e^{itx} dt = G(x) inside the support.
    for shape in [
        KernelShape::direct(2.0).unwrap(),
        KernelShape::inverse(2.0, 4.0).unwrap(),
        KernelShape::direct(1.0).unwrap().with_support(Support::Truncated),
    ] {
        let t_max = match shape.variant() {
            Variant::Direct => 200.0,
            Variant::Inverse { .. } => 4000.0,
        };
        for i in 0..10 {
            let x = shape.gamma() * (i as f64 / 10.0 - 0.45);
            let pieces = (t_max * shape.half_width()) as usize;
            let val = integrate_panels(|t| shape.transform(t) * (t * x).cos(), 0.0, t_max, pieces, 1e-9) / PI;
            assert!((val - shape.window(x)).abs() <= 1e-6, "{shape:?} x {x}: {val} vs {}", shape.window(x));
        }
    }
}

#[test]
fn certification_is_deterministic() {
    for shape in [
        KernelShape::direct(0.8).unwrap(),
        KernelShape::inverse(1.0, 1.5 * PI).unwrap().with_support(Support::Truncated),
    ] {
        let a = certify_constants(&shape).unwrap();
        let b = certify_constants(&shape).unwrap();
        assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
        assert_eq!(a.beta.to_bits(), b.beta.to_bits());
    }
}
