//! Finite exponential sums x(t) = Σ x_k e^{iω_k t}, their sampled and continuous energies,
//! and the two sides of the Poisson summatory identity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{band_threshold, ExponentSequence};
use crate::kernels::KernelShape;
use crate::numeric::{compensated_sum, sinc, NeumaierSum};

/// Anything that is a finite list of (frequency, coefficient) terms.
pub trait Signal {
    fn terms(&self) -> Vec<(f64, Complex64)>;

    fn eval(&self, t: f64) -> Complex64 {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for (w, c) in self.terms() {
            let z = c * Complex64::from_polar(1.0, w * t);
            re += z.re;
            im += z.im;
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Coefficients x_k over a list of frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    omegas: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl ExpSum {
    pub fn new(omegas: Vec<f64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if omegas.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: omegas.len(),
                found: coeffs.len(),
            });
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("omegas"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("coeffs"));
        }
        Ok(Self { omegas, coeffs })
    }

    pub fn over(seq: &ExponentSequence, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(seq.omegas().to_vec(), coeffs)
    }

    pub fn empty() -> Self {
        Self {
            omegas: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// t ↦ x(t + s), i.e. coefficients rotated by e^{iω_k s}.
    pub fn shifted(&self, s: f64) -> Self {
        Self {
            omegas: self.omegas.clone(),
            coeffs: self
                .omegas
                .iter()
                .zip(&self.coeffs)
                .map(|(w, c)| c * Complex64::from_polar(1.0, w * s))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            omegas: self.omegas.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

impl Signal for ExpSum {
    fn terms(&self) -> Vec<(f64, Complex64)> {
        self.omegas.iter().copied().zip(self.coeffs.iter().copied()).collect()
    }
}

/// A plain sum with one extra term x′e^{iω′t}, ω′ not among the base frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedExpSum {
    base: ExpSum,
    omega_prime: f64,
    x_prime: Complex64,
    gamma_prime: f64,
}

impl AugmentedExpSum {
    pub fn new(base: ExpSum, omega_prime: f64, x_prime: Complex64) -> Result<Self> {
        if !omega_prime.is_finite() {
            return Err(Error::NonFinite("omega_prime"));
        }
        let gamma_prime = base
            .omegas
            .iter()
            .map(|w| (w - omega_prime).abs())
            .fold(f64::INFINITY, f64::min);
        if gamma_prime == 0.0 {
            return Err(Error::ZeroDistance { omega_prime });
        }
        Ok(Self {
            base,
            omega_prime,
            x_prime,
            gamma_prime,
        })
    }

    pub fn base(&self) -> &ExpSum {
        &self.base
    }

    pub fn omega_prime(&self) -> f64 {
        self.omega_prime
    }

    pub fn x_prime(&self) -> Complex64 {
        self.x_prime
    }

    /// min_k |ω_k − ω′| over the stored frequencies (+∞ for an empty base).
    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }
}

impl Signal for AugmentedExpSum {
    fn terms(&self) -> Vec<(f64, Complex64)> {
        let mut t = self.base.terms();
        t.push((self.omega_prime, self.x_prime));
        t
    }
}

/// Sampling instants t′ + jδ for j = −J..=J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    pub delta: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(default)]
    pub t_shift: f64,
}

impl SamplingGrid {
    pub fn new(delta: f64, j: usize, t_shift: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "must be positive and finite",
            });
        }
        if j == 0 {
            return Err(Error::InvalidParameter {
                name: "J",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        if !t_shift.is_finite() {
            return Err(Error::NonFinite("t_shift"));
        }
        Ok(Self { delta, j, t_shift })
    }

    pub fn centered(delta: f64, j: usize) -> Result<Self> {
        Self::new(delta, j, 0.0)
    }

    pub fn sample_count(&self) -> usize {
        2 * self.j + 1
    }

    /// J·δ, the half-length of the observation window.
    pub fn horizon(&self) -> f64 {
        self.j as f64 * self.delta
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let j = self.j as i64;
        -j..=j
    }

    pub fn time(&self, j: i64) -> f64 {
        self.t_shift + j as f64 * self.delta
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.indices().map(|j| self.time(j))
    }
}

/// δ·Σ_{j=−J}^{J} |x(t′ + jδ)|².
pub fn sampled_energy<S: Signal + ?Sized>(sum: &S, grid: &SamplingGrid) -> f64 {
    grid.delta * compensated_sum(grid.times().map(|t| sum.eval(t).norm_sqr()))
}

/// ∫_{−R}^{R} |x(t)|² dt = Σ_{k,n} x_k x̄_n κ(ω_k − ω_n), κ(ω) = 2R·sinc(ωR).
pub fn continuous_energy<S: Signal + ?Sized>(sum: &S, r: f64) -> f64 {
    let terms = sum.terms();
    let mut acc = NeumaierSum::new();
    for (wk, xk) in &terms {
        for (wn, xn) in &terms {
            let kappa = 2.0 * r * sinc((wk - wn) * r);
            acc += (xk * xn.conj()).re * kappa;
        }
    }
    acc.value().max(0.0)
}

/// Both sides of δΣ_j g(jδ)|x(jδ)|² = 2πΣ_{k,n} G(ω_k − ω_n)x_k x̄_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonSides {
    pub lhs: f64,
    pub rhs: f64,
    /// Certified bound on the part of the j-sum beyond `j_tail`.
    pub tail_bound: f64,
    pub j_tail: usize,
}

impl PoissonSides {
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Poisson summatory identity for a plain sum.
///
/// Requires π/δ ≥ γ (the kernel radius) and every nonzero coefficient inside the band
/// |ω_k| ≤ π/δ − γ/2. The infinite j-sum is truncated where the analytic decay bound on g
/// drops below `tail_tol`.
pub fn poisson_sides(sum: &ExpSum, kernel: &KernelShape, delta: f64, tail_tol: f64) -> Result<PoissonSides> {
    check_period(kernel, delta)?;
    let threshold = band_threshold(kernel.gamma(), delta);
    let offending: Vec<usize> = sum
        .omegas
        .iter()
        .zip(&sum.coeffs)
        .enumerate()
        .filter(|(_, (w, c))| **c != Complex64::new(0.0, 0.0) && w.abs() > threshold)
        .map(|(k, _)| k)
        .collect();
    if !offending.is_empty() {
        return Err(Error::BandViolation { indices: offending });
    }
    poisson_sides_unchecked(sum, kernel, delta, tail_tol)
}

fn check_period(kernel: &KernelShape, delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must be positive and finite",
        });
    }
    if PI / delta < kernel.gamma() {
        return Err(Error::WindowExceedsPeriod {
            gamma: kernel.gamma(),
            half_period: PI / delta,
        });
    }
    Ok(())
}

/// Both sides without the band check, for studying aliasing when the band condition fails.
pub fn poisson_sides_unchecked(
    sum: &ExpSum,
    kernel: &KernelShape,
    delta: f64,
    tail_tol: f64,
) -> Result<PoissonSides> {
    check_period(kernel, delta)?;
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: tail_tol,
            reason: "must be positive",
        });
    }
    let nonzero: Vec<(f64, Complex64)> = sum
        .terms()
        .into_iter()
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .collect();
    if nonzero.is_empty() {
        return Ok(PoissonSides {
            lhs: 0.0,
            rhs: 0.0,
            tail_bound: 0.0,
            j_tail: 0,
        });
    }

    let mut rhs = NeumaierSum::new();
    for (wk, xk) in &nonzero {
        for (wn, xn) in &nonzero {
            rhs += kernel.window(wk - wn) * (xk * xn.conj()).re;
        }
    }
    let rhs = 2.0 * PI * rhs.value();

    // |x(t)|² ≤ (Σ|x_k|)², and Σ_{j>J} f(jδ) ≤ δ⁻¹∫_{Jδ}^∞ f for decreasing f.
    let l1: f64 = nonzero.iter().map(|(_, c)| c.norm()).sum();
    let budget = tail_tol / (2.0 * l1 * l1);
    let cutoff = kernel.tail_cutoff(budget, delta);
    let j_tail = (cutoff / delta).ceil() as usize;
    let tail_bound = 2.0 * l1 * l1 * kernel.transform_tail_bound(j_tail as f64 * delta).unwrap_or(f64::INFINITY);

    let weights = kernel.transform_samples(delta, j_tail);
    let lhs = delta * weighted_sample_sum(&nonzero, &weights, delta);
    Ok(PoissonSides {
        lhs,
        rhs,
        tail_bound,
        j_tail,
    })
}

const PHASOR_RESYNC: i64 = 256;

/// Σ_{j=−J}^{J} weights[|j|]·|x(jδ)|², J = weights.len() − 1.
///
/// Keeps the unit phasors p_k = e^{iω_k jδ} in split real/imaginary arrays, stepped by
/// multiplication and re-anchored every few hundred steps. With A = Σ Re c·Re p,
/// B = Σ Im c·Im p, C = Σ Re c·Im p, D = Σ Im c·Re p one has
/// |x(jδ)|² + |x(−jδ)|² = 2(A² + B² + C² + D²).
fn weighted_sample_sum(terms: &[(f64, Complex64)], weights: &[f64], delta: f64) -> f64 {
    let j_max = weights.len() - 1;
    let n = terms.len();
    let cr: Vec<f64> = terms.iter().map(|(_, c)| c.re).collect();
    let ci: Vec<f64> = terms.iter().map(|(_, c)| c.im).collect();
    let (mut sr, mut si) = (vec![0.0; n], vec![0.0; n]);
    for (k, (w, _)) in terms.iter().enumerate() {
        (si[k], sr[k]) = (w * delta).sin_cos();
    }
    let (mut pr, mut pi) = (vec![1.0; n], vec![0.0; n]);
    let mut acc = NeumaierSum::new();
    let x0: Complex64 = terms.iter().map(|(_, c)| c).sum();
    acc += weights[0] * x0.norm_sqr();
    for j in 1..=j_max as i64 {
        if j % PHASOR_RESYNC == 0 {
            for (k, (w, _)) in terms.iter().enumerate() {
                (pi[k], pr[k]) = (w * delta * j as f64).sin_cos();
            }
        } else {
            for k in 0..n {
                let (a, b) = (pr[k], pi[k]);
                pr[k] = a * sr[k] - b * si[k];
                pi[k] = a * si[k] + b * sr[k];
            }
        }
        let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            a += cr[k] * pr[k];
            b += ci[k] * pi[k];
            c += cr[k] * pi[k];
            d += ci[k] * pr[k];
        }
        acc += 2.0 * weights[j as usize] * (a * a + b * b + c * c + d * d);
    }
    acc.value()
}

/// JSON form `{"omegas", "coeffs": [[re, im], ...], "omega_prime"?, "x_prime"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDescriptor {
    pub omegas: Vec<f64>,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_prime: Option<[f64; 2]>,
}

/// Either kind of sum, as read from a [`SumDescriptor`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnySum {
    Plain(ExpSum),
    Augmented(AugmentedExpSum),
}

fn to_complex(v: &[f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl SumDescriptor {
    pub fn build(&self) -> Result<AnySum> {
        let base = ExpSum::new(self.omegas.clone(), self.coeffs.iter().map(to_complex).collect())?;
        match (self.omega_prime, self.x_prime) {
            (None, None) => Ok(AnySum::Plain(base)),
            (Some(w), x) => Ok(AnySum::Augmented(AugmentedExpSum::new(
                base,
                w,
                x.as_ref().map(to_complex).unwrap_or_default(),
            )?)),
            (None, Some(_)) => Err(Error::InvalidParameter {
                name: "x_prime",
                value: f64::NAN,
                reason: "given without omega_prime",
            }),
        }
    }
}

impl From<&ExpSum> for SumDescriptor {
    fn from(s: &ExpSum) -> Self {
        SumDescriptor {
            omegas: s.omegas.clone(),
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            omega_prime: None,
            x_prime: None,
        }
    }
}

impl From<&AugmentedExpSum> for SumDescriptor {
    fn from(s: &AugmentedExpSum) -> Self {
        SumDescriptor {
            omega_prime: Some(s.omega_prime),
            x_prime: Some([s.x_prime.re, s.x_prime.im]),
            ..SumDescriptor::from(&s.base)
        }
    }
}
