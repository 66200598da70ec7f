//! Compactly supported window kernels G built from the raised cosine
//! H(x) = cos²(πx/2w) on |x| ≤ w, together with their Fourier transforms
//! g(t) = ∫ G(x) e^{−itx} dx and certified constants α, β.
//!
//! Two kernels are provided. The direct kernel is G = H*H with g = h². The inverse kernel
//! is G = R²·H*H + H′*H′ with g = (R² − t²)·h².
//!
//! `gamma` is always the radius beyond which G is zero. How that radius relates to the
//! half-width w of H is the [`Support`] convention:
//!
//! * [`Support::Exact`]: w = γ/2, so the convolution vanishes for |x| ≥ γ on its own and
//!   (G, g) is an exact Fourier pair. This is the kernel for the Poisson identity.
//! * [`Support::Truncated`]: w = γ as the raised cosine is usually written. The true
//!   convolution then lives on [−2γ, 2γ] and G is cut to zero at |x| ≥ γ, so G and g agree
//!   as a transform pair only inside |x| < γ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::sinc;

/// Relation between the support radius γ of G and the half-width of H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    #[default]
    Exact,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    Direct,
    Inverse { r: f64 },
}

/// A kernel before its constants are certified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelShape {
    variant: Variant,
    gamma: f64,
    support: Support,
}

const SINGULAR_WINDOW: f64 = 1e-4;
const SAMPLE_RESYNC: usize = 256;

/// Closed-form transform of the raised cosine of half-width `gamma`:
/// h(t) = π² sin(γt) / (t(π² − γ²t²)).
///
/// Near t = 0 and t = ±π/γ the removable singularities are filled by writing
/// h(t) = γ[sinc(γt) + ½sinc(γt + π) + ½sinc(γt − π)] and evaluating the singular
/// sinc term by its Taylor series.
pub fn h_transform(gamma: f64, t: f64) -> f64 {
    let u = gamma * t;
    let near = u.abs() < SINGULAR_WINDOW || (u.abs() - PI).abs() < SINGULAR_WINDOW;
    if near {
        gamma * (sinc(u) + 0.5 * sinc(u + PI) + 0.5 * sinc(u - PI))
    } else {
        PI * PI * u.sin() / (t * (PI * PI - u * u))
    }
}

impl KernelShape {
    pub fn new(variant: Variant, gamma: f64, support: Support) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be positive and finite",
            });
        }
        if let Variant::Inverse { r } = variant {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "R",
                    value: r,
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(Self {
            variant,
            gamma,
            support,
        })
    }

    pub fn direct(gamma: f64) -> Result<Self> {
        Self::new(Variant::Direct, gamma, Support::Exact)
    }

    pub fn inverse(gamma: f64, r: f64) -> Result<Self> {
        Self::new(Variant::Inverse { r }, gamma, Support::Exact)
    }

    pub fn with_support(self, support: Support) -> Self {
        Self { support, ..self }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Half-width w of the raised cosine H.
    pub fn half_width(&self) -> f64 {
        match self.support {
            Support::Exact => 0.5 * self.gamma,
            Support::Truncated => self.gamma,
        }
    }

    /// h(t), the transform of H.
    pub fn h(&self, t: f64) -> f64 {
        h_transform(self.half_width(), t)
    }

    /// G(x). Exactly zero for |x| ≥ γ.
    pub fn window(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= self.gamma {
            return 0.0;
        }
        let w = self.half_width();
        let k = PI / w;
        let len = 2.0 * w - x;
        let (s, c) = (k * x).sin_cos();
        let hh = 0.25 * (len * (1.0 + 0.5 * c) + 1.5 * s / k);
        match self.variant {
            Variant::Direct => hh,
            Variant::Inverse { r } => {
                let dd = -(k / 8.0) * s - (k * k / 8.0) * len * c;
                r * r * hh + dd
            }
        }
    }

    /// g(t), the transform of the untruncated convolution.
    pub fn transform(&self, t: f64) -> f64 {
        let h = self.h(t);
        match self.variant {
            Variant::Direct => h * h,
            Variant::Inverse { r } => (r * r - t * t) * h * h,
        }
    }

    /// g(jδ) for j = 0..=j_max.
    ///
    /// Away from the removable singularities sin(wjδ) comes from a stepped phasor, re-anchored
    /// every few hundred steps, so long tails cost no transcendental calls.
    pub fn transform_samples(&self, delta: f64, j_max: usize) -> Vec<f64> {
        let w = self.half_width();
        let step = Complex64::from_polar(1.0, w * delta);
        let mut phasor = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(j_max + 1);
        for j in 0..=j_max {
            if j % SAMPLE_RESYNC == 0 {
                phasor = Complex64::from_polar(1.0, w * delta * j as f64);
            } else {
                phasor *= step;
            }
            let t = j as f64 * delta;
            let u = w * t;
            if u < 1.0 || (u - PI).abs() < 1.0 {
                out.push(self.transform(t));
                continue;
            }
            let h = PI * PI * phasor.im / (t * (PI * PI - u * u));
            out.push(match self.variant {
                Variant::Direct => h * h,
                Variant::Inverse { r } => (r * r - t * t) * h * h,
            });
        }
        out
    }

    /// The 2π/δ-periodic extension of G restricted to (−π/δ, π/δ).
    pub fn periodize(&self, delta: f64, x: f64) -> Result<f64> {
        let half = PI / delta;
        if !(delta > 0.0) || half < self.gamma {
            return Err(Error::WindowExceedsPeriod {
                gamma: self.gamma,
                half_period: half,
            });
        }
        let period = 2.0 * half;
        let m0 = (x / period).round() as i64;
        let mut total = 0.0;
        for m in [m0 - 1, m0, m0 + 1] {
            let y = x - m as f64 * period;
            if y.abs() < half {
                total += self.window(y);
            }
        }
        Ok(total)
    }

    /// Upper bound on ∫_T^∞ |g(t)| dt from the decay of h.
    ///
    /// For wt > π, |h(t)| ≤ π² / (t(w²t² − π²)). With c = 1 − π²/(w²T²) this gives
    /// |g| ≤ π⁴/(c²w⁴t⁶) for the direct kernel and, once t ≥ R, |g| ≤ π⁴/(c²w⁴t⁴) for the
    /// inverse kernel. Returns `None` when T is too small for the bound to apply.
    pub fn transform_tail_bound(&self, t_start: f64) -> Option<f64> {
        let w = self.half_width();
        let wt = w * t_start;
        if wt <= PI {
            return None;
        }
        let c = 1.0 - (PI / wt).powi(2);
        let base = PI.powi(4) / (c * c * w.powi(4));
        match self.variant {
            Variant::Direct => Some(base / (5.0 * t_start.powi(5))),
            Variant::Inverse { r } => {
                if t_start < r {
                    None
                } else {
                    Some(base / (3.0 * t_start.powi(3)))
                }
            }
        }
    }

    /// Smallest T ≥ `floor` with [`transform_tail_bound`](Self::transform_tail_bound)(T) ≤ `budget`.
    pub fn tail_cutoff(&self, budget: f64, floor: f64) -> f64 {
        let w = self.half_width();
        let mut t = floor.max(2.0 * PI / w);
        if let Variant::Inverse { r } = self.variant {
            t = t.max(r);
        }
        if budget <= 0.0 {
            return f64::INFINITY;
        }
        // The bound is decreasing in T; grow geometrically then bisect.
        let fits = |t: f64| self.transform_tail_bound(t).is_some_and(|b| b <= budget);
        if fits(t) {
            return t;
        }
        let mut hi = t * 2.0;
        while !fits(hi) {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Grid resolution used for certification and verification.
pub const CERTIFICATION_GRID: usize = 10_000;
/// Relative safety margin applied to the grid extrema.
pub const SAFETY_MARGIN: f64 = 0.01;

/// A kernel together with certified constants α and β.
///
/// Direct: 0 ≤ G(0) − G(x) ≤ αx², g ≥ 0, g(t) ≥ β for |t| ≤ π/(2γ), α ≥ 1.
/// Inverse: G(0) − G(x) ≥ αx² on |x| ≤ γ, G(0) > G(x) for x ≠ 0, g(t) ≤ 0 for |t| ≥ R,
/// g ≤ β, α ≤ G(0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowKernel {
    pub shape: KernelShape,
    pub alpha: f64,
    pub beta: f64,
    pub margin: f64,
}

impl std::ops::Deref for WindowKernel {
    type Target = KernelShape;
    fn deref(&self) -> &KernelShape {
        &self.shape
    }
}

fn fail(inequality: &str, point: f64) -> Error {
    Error::CertificationFailed {
        inequality: inequality.to_string(),
        point,
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

fn midpoints(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

/// Certifies α and β for `shape` on grids of [`CERTIFICATION_GRID`] points, then re-checks
/// every inequality on an interleaved grid.
pub fn certify_constants(shape: &KernelShape) -> Result<WindowKernel> {
    let n = CERTIFICATION_GRID;
    let gamma = shape.gamma;
    let g0 = shape.window(0.0);
    let slack = 64.0 * f64::EPSILON * g0.abs().max(1.0);
    let ratio = |x: f64| (g0 - shape.window(x)) / (x * x);
    let x_grid = || grid(0.0, gamma, n).skip(1);
    let far_t = (50.0 * gamma).max(50.0 * PI / gamma);

    let kernel = match shape.variant {
        Variant::Direct => {
            let alpha_grid = x_grid().map(ratio).fold(f64::NEG_INFINITY, f64::max);
            let alpha = (alpha_grid * (1.0 + SAFETY_MARGIN)).max(1.0);
            let t_max = PI / (2.0 * gamma);
            let beta_grid = grid(0.0, t_max, n)
                .map(|t| shape.transform(t))
                .fold(f64::INFINITY, f64::min);
            if !(beta_grid > 0.0) {
                return Err(fail("g(t) >= beta > 0 on |t| <= pi/(2 gamma)", t_max));
            }
            let beta = beta_grid * (1.0 - SAFETY_MARGIN);

            for x in midpoints(0.0, 2.0 * gamma, n) {
                let d = g0 - shape.window(x);
                if d < -slack {
                    return Err(fail("0 <= G(0) - G(x)", x));
                }
                if d > alpha * x * x {
                    return Err(fail("G(0) - G(x) <= alpha x^2", x));
                }
            }
            for t in midpoints(0.0, t_max, n) {
                if shape.transform(t) < beta {
                    return Err(fail("g(t) >= beta", t));
                }
            }
            for t in midpoints(0.0, far_t, n) {
                if shape.transform(t) < 0.0 {
                    return Err(fail("g(t) >= 0", t));
                }
            }
            WindowKernel {
                shape: *shape,
                alpha,
                beta,
                margin: SAFETY_MARGIN,
            }
        }
        Variant::Inverse { r } => {
            if !(g0 > 0.0) {
                return Err(fail("G(0) > 0", 0.0));
            }
            let (arg_min, ratio_min) = x_grid()
                .map(|x| (x, ratio(x)))
                .fold((0.0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
            if !(ratio_min > 0.0) {
                return Err(fail("G(0) - G(x) >= alpha x^2 with alpha > 0", arg_min));
            }
            let alpha = (ratio_min * (1.0 - SAFETY_MARGIN)).min(g0);
            let beta_grid = grid(0.0, r, n)
                .map(|t| shape.transform(t))
                .fold(f64::NEG_INFINITY, f64::max);
            let beta = beta_grid * (1.0 + SAFETY_MARGIN);

            for x in midpoints(0.0, gamma, n) {
                let d = g0 - shape.window(x);
                if !(d > 0.0) {
                    return Err(fail("G(0) - G(x) > 0", x));
                }
                if d < alpha * x * x {
                    return Err(fail("G(0) - G(x) >= alpha x^2", x));
                }
            }
            for x in midpoints(gamma, 2.0 * gamma, n) {
                if shape.window(x) != 0.0 {
                    return Err(fail("G(x) = 0 for |x| >= gamma", x));
                }
            }
            for t in midpoints(0.0, r, n) {
                if shape.transform(t) > beta {
                    return Err(fail("g(t) <= beta", t));
                }
            }
            for t in midpoints(r, r + far_t, n) {
                if shape.transform(t) > 0.0 {
                    return Err(fail("g(t) <= 0 for |t| >= R", t));
                }
            }
            WindowKernel {
                shape: *shape,
                alpha,
                beta,
                margin: SAFETY_MARGIN,
            }
        }
    };
    Ok(kernel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Direct,
    Inverse,
}

/// JSON form `{"variant", "gamma", "R"?, "support"?, "alpha"?, "beta"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDescriptor {
    pub variant: VariantName,
    pub gamma: f64,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default)]
    pub support: Support,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl KernelDescriptor {
    pub fn shape(&self) -> Result<KernelShape> {
        let variant = match self.variant {
            VariantName::Direct => Variant::Direct,
            VariantName::Inverse => Variant::Inverse {
                r: self.r.ok_or(Error::InvalidParameter {
                    name: "R",
                    value: f64::NAN,
                    reason: "required for the inverse kernel",
                })?,
            },
        };
        KernelShape::new(variant, self.gamma, self.support)
    }
}

impl From<&KernelShape> for KernelDescriptor {
    fn from(s: &KernelShape) -> Self {
        let (variant, r) = match s.variant {
            Variant::Direct => (VariantName::Direct, None),
            Variant::Inverse { r } => (VariantName::Inverse, Some(r)),
        };
        KernelDescriptor {
            variant,
            gamma: s.gamma,
            r,
            support: s.support,
            alpha: None,
            beta: None,
        }
    }
}

impl From<&WindowKernel> for KernelDescriptor {
    fn from(k: &WindowKernel) -> Self {
        KernelDescriptor {
            alpha: Some(k.alpha),
            beta: Some(k.beta),
            ..KernelDescriptor::from(&k.shape)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_samples_match_pointwise() {
        for shape in [KernelShape::direct(1.3).unwrap(), KernelShape::inverse(0.7, 9.0).unwrap()] {
            let delta = 0.37;
            let samples = shape.transform_samples(delta, 5000);
            let w = shape.half_width();
            for (j, g) in samples.iter().enumerate() {
                let t = j as f64 * delta;
                let exact = shape.transform(t);
                // Size of g with |sin(wt)| = 1; the phasor error is relative to this.
                let u = w * t;
                let env = match shape.variant() {
                    Variant::Direct => 1.0,
                    Variant::Inverse { r } => (r * r - t * t).abs().max(1.0),
                } * (PI * PI / (t * (PI * PI - u * u))).powi(2);
                let scale = if u < 1.0 || (u - PI).abs() < 1.0 { exact.abs() } else { env };
                assert!((g - exact).abs() <= 1e-12 * scale, "{j}: {g} {exact}");
            }
        }
    }

    fn truncated_direct(g: f64) -> KernelShape {
        KernelShape::direct(g).unwrap().with_support(Support::Truncated)
    }

    fn truncated_inverse(g: f64, r: f64) -> KernelShape {
        KernelShape::inverse(g, r).unwrap().with_support(Support::Truncated)
    }

    #[test]
    fn h_at_removable_singularities() {
        for g in [0.5, 1.0, 2.0] {
            assert!((h_transform(g, 0.0) - g).abs() < 1e-15);
            assert!((h_transform(g, PI / g) - g / 2.0).abs() < 1e-14);
            assert!((h_transform(g, -PI / g) - g / 2.0).abs() < 1e-14);
            assert_eq!(h_transform(g, 3.7), h_transform(g, -3.7));
        }
    }

    #[test]
    fn h_continuous_across_series_window() {
        let g = 1.3;
        for centre in [0.0, PI / g] {
            let edge = SINGULAR_WINDOW / g;
            let inside = h_transform(g, centre + edge * (1.0 - 1e-9));
            let outside = h_transform(g, centre + edge * (1.0 + 1e-9));
            assert!((inside - outside).abs() < 1e-12, "{inside} vs {outside}");
        }
    }

    #[test]
    fn window_at_zero() {
        for g in [0.5, 1.0, 2.0] {
            assert!((truncated_direct(g).window(0.0) - 0.75 * g).abs() < 1e-15);
            let r = 4.0;
            let expected = 0.75 * g * r * r - PI * PI / (4.0 * g);
            assert!((truncated_inverse(g, r).window(0.0) - expected).abs() < 1e-12);
            // Exact support halves the raised-cosine width.
            assert!((KernelShape::direct(g).unwrap().window(0.0) - 0.375 * g).abs() < 1e-15);
        }
    }

    #[test]
    fn window_vanishes_at_and_beyond_gamma() {
        for shape in [
            truncated_direct(1.5),
            truncated_inverse(1.5, 4.0),
            KernelShape::direct(1.5).unwrap(),
            KernelShape::inverse(1.5, 9.0).unwrap(),
        ] {
            assert_eq!(shape.window(1.5), 0.0);
            assert_eq!(shape.window(3.0), 0.0);
            assert_eq!(shape.window(-1.5), 0.0);
        }
        // The exact convention reaches zero continuously.
        assert!(KernelShape::direct(1.0).unwrap().window(1.0 - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn transform_signs() {
        let d = truncated_direct(1.0);
        assert!((d.transform(0.0) - 1.0).abs() < 1e-15);
        for i in 0..=10_000 {
            let t = -50.0 + 100.0 * i as f64 / 10_000.0;
            assert!(d.transform(t) >= 0.0);
        }
        let r = 4.0;
        let inv = truncated_inverse(1.0, r);
        assert_eq!(inv.transform(r), 0.0);
        for t in [1.5 * r, 2.0 * r, 3.0 * r] {
            assert!(inv.transform(t) < 0.0);
        }
        assert!((inv.transform(0.0) - r * r).abs() < 1e-13);
    }

    #[test]
    fn certify_direct_unit_gamma() {
        let k = certify_constants(&truncated_direct(1.0)).unwrap();
        let bound = (8.0 / (3.0 * PI)).powi(2);
        assert!(k.beta <= bound);
        assert!(k.beta >= 0.95 * bound);
        assert!(k.alpha >= 1.0);
    }

    #[test]
    fn certify_direct_alpha_covers_endpoint() {
        let g = 2.0;
        let k = certify_constants(&truncated_direct(g)).unwrap();
        assert!(k.alpha * g * g >= k.window(0.0) - k.window(g));
        assert!(k.alpha >= 3.0 / (4.0 * g));
    }

    #[test]
    fn certify_inverse_beta_dominates_origin() {
        let k = certify_constants(&truncated_inverse(1.0, 4.0)).unwrap();
        assert!(k.beta >= 16.0);
        assert!(k.alpha <= k.window(0.0));
        assert!(k.alpha > 0.0);
    }

    #[test]
    fn certify_inverse_rejects_small_r() {
        // R below π/w makes G(0) a local minimum.
        let err = certify_constants(&truncated_inverse(1.0, 3.0)).unwrap_err();
        assert!(matches!(err, Error::CertificationFailed { .. }));
    }

    #[test]
    fn certification_is_deterministic() {
        let a = certify_constants(&truncated_direct(0.7)).unwrap();
        let b = certify_constants(&truncated_direct(0.7)).unwrap();
        assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
        assert_eq!(a.beta.to_bits(), b.beta.to_bits());
    }

    #[test]
    fn periodize_matches_window_inside_band() {
        let k = truncated_direct(1.0);
        let delta = PI / 2.0; // period 4
        for x in [-2.9, -1.0, -0.3, 0.0, 0.5, 2.5, 3.0] {
            assert_eq!(k.periodize(delta, x).unwrap(), k.window(x));
        }
        assert_eq!(k.periodize(delta, 4.0).unwrap(), k.window(0.0));
    }

    #[test]
    fn periodize_shifts_by_period() {
        let k = truncated_direct(1.0);
        assert_eq!(k.periodize(PI, 1.5).unwrap(), k.window(-0.5));
        assert!(matches!(k.periodize(4.0, 0.0), Err(Error::WindowExceedsPeriod { .. })));
    }

    #[test]
    fn tail_bound_dominates_transform() {
        for shape in [KernelShape::direct(1.0).unwrap(), KernelShape::inverse(1.0, 12.0).unwrap()] {
            let t0 = shape.tail_cutoff(1e-6, 0.0);
            let bound = shape.transform_tail_bound(t0).unwrap();
            assert!(bound <= 1e-6);
            // Crude Riemann check of the integral the bound covers.
            let step = 0.01;
            let approx: f64 = (0..200_000).map(|i| shape.transform(t0 + step * i as f64).abs() * step).sum();
            assert!(approx <= bound * 1.01, "{approx} > {bound}");
        }
    }

    #[test]
    fn descriptor_json() {
        let k = certify_constants(&KernelShape::inverse(1.0, 20.0).unwrap()).unwrap();
        let d = KernelDescriptor::from(&k);
        let j = serde_json::to_string(&d).unwrap();
        assert!(j.contains(r#""variant":"inverse""#) && j.contains(r#""R":20.0"#));
        let back: KernelDescriptor = serde_json::from_str(&j).unwrap();
        assert_eq!(back.shape().unwrap(), k.shape);
        let missing_r: KernelDescriptor = serde_json::from_str(r#"{"variant":"inverse","gamma":1}"#).unwrap();
        assert!(missing_r.shape().is_err());
    }
}
