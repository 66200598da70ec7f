//! Haraux augmentation: the averaging filter that removes one extra exponent ω′, its
//! per-index contraction factors ε_k, and the frame constants of the augmented system.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{frame_constants, gram_for, FrameBoundReport};
use crate::error::{Error, Result};
use crate::exponents::{BandMask, ExponentSequence, GapClassification};
use crate::linalg::hermitian_pencil_eig;
use crate::numeric::{compensated_sum, sinc};
use crate::quadforms::q_matrix;
use crate::sums::{AugmentedExpSum, ExpSum, SamplingGrid, Signal};

/// Distance of (ω_k − ω′)δ/2 from a nonzero multiple of π below which ε_k is rejected.
pub const RESONANCE_GUARD: f64 = 1e-10;

const ROOT_BRACKET: f64 = 1e-12;
const FACTOR_DIRECT_BELOW: f64 = 1e-8;

/// ε_k = |sinc((ω_k − ω′)J′δ)| / |sinc((ω_k − ω′)δ/2)|, the modulus of the filter factor.
pub fn epsilon_k(omega_k: f64, omega_prime: f64, j_prime: usize, delta: f64) -> Result<f64> {
    check_filter_params(j_prime, delta)?;
    let d = omega_k - omega_prime;
    if d == 0.0 {
        return Err(Error::ZeroDistance { omega_prime });
    }
    let half = 0.5 * d * delta;
    let m = (half / PI).round();
    if m != 0.0 && (half - m * PI).abs() < RESONANCE_GUARD {
        return Err(Error::SamplingResonance { half_angle: half });
    }
    Ok((sinc(d * j_prime as f64 * delta) / sinc(half)).abs())
}

fn check_filter_params(j_prime: usize, delta: f64) -> Result<()> {
    if j_prime == 0 {
        return Err(Error::InvalidParameter {
            name: "J_prime",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must be positive and finite",
        });
    }
    Ok(())
}

/// f(ω) = (1/2J′)Σ_{n=−J′}^{J′−1} e^{i(ω−ω′)nδ} = i·sin((ω−ω′)J′δ) / (J′(e^{i(ω−ω′)δ} − 1)).
pub fn filter_factor(omega: f64, omega_prime: f64, j_prime: usize, delta: f64) -> Complex64 {
    let d = omega - omega_prime;
    let jp = j_prime as f64;
    let denom = Complex64::from_polar(1.0, d * delta) - 1.0;
    if denom.norm() < FACTOR_DIRECT_BELOW {
        let jp_i = j_prime as i64;
        let re = compensated_sum((-jp_i..jp_i).map(|n| (d * n as f64 * delta).cos()));
        let im = compensated_sum((-jp_i..jp_i).map(|n| (d * n as f64 * delta).sin()));
        return Complex64::new(re, im) / (2.0 * jp);
    }
    Complex64::new(0.0, (d * jp * delta).sin()) / (jp * denom)
}

/// Largest c in (0, π) with sinc(x) > `level` on (0, c), to within the bisection bracket.
pub fn sinc_level_root(level: f64) -> f64 {
    if level >= 1.0 {
        return 0.0;
    }
    if level <= 0.0 {
        return PI;
    }
    let (mut lo, mut hi) = (0.0, PI);
    while hi - lo > ROOT_BRACKET {
        let mid = 0.5 * (lo + hi);
        if sinc(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Everything the filter needs, for one choice of ω′, J′ and δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarauxPlan {
    #[serde(rename = "J_prime")]
    pub j_prime: usize,
    pub delta: f64,
    pub omega_prime: f64,
    /// Sequence indices the plan covers (band-admissible).
    pub active: Vec<usize>,
    pub eps_k: Vec<f64>,
    pub eps_sup: f64,
    /// ε′ = sup_k |sinc((ω_k − ω′)J′δ)|.
    pub eps_prime: f64,
    pub c_prime: f64,
    pub lipschitz_l: f64,
    pub gamma_prime: f64,
}

/// Builds the filter plan and checks |ω_k − ω′| < 2c′/δ and ε < 1 on every active index.
pub fn plan_haraux(
    seq: &ExponentSequence,
    mask: &BandMask,
    omega_prime: f64,
    j_prime: usize,
    delta: f64,
) -> Result<HarauxPlan> {
    check_filter_params(j_prime, delta)?;
    if !omega_prime.is_finite() {
        return Err(Error::NonFinite("omega_prime"));
    }
    if mask.admissible.len() != seq.len() {
        return Err(Error::DimensionMismatch {
            expected: seq.len(),
            found: mask.admissible.len(),
        });
    }
    let active = mask.active_indices();
    if active.is_empty() {
        return Err(Error::EmptySequence);
    }
    let dists: Vec<f64> = active.iter().map(|&k| seq.omegas()[k] - omega_prime).collect();
    let gamma_prime = dists.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    if gamma_prime == 0.0 {
        return Err(Error::ZeroDistance { omega_prime });
    }
    let jd = j_prime as f64 * delta;
    let eps_prime = dists.iter().map(|d| sinc(d * jd).abs()).fold(0.0, f64::max);
    let c_prime = sinc_level_root(eps_prime);
    let eg = eps_prime * gamma_prime;
    let lipschitz_l = 1.0 / eg + 1.0 / (jd * eg * eg);

    let reach = 2.0 * c_prime / delta;
    let outside: Vec<usize> = active
        .iter()
        .zip(&dists)
        .filter(|(_, d)| d.abs() >= reach)
        .map(|(&k, _)| k)
        .collect();
    if !outside.is_empty() {
        return Err(Error::FilterRange { indices: outside });
    }
    let eps_k = active
        .iter()
        .map(|&k| epsilon_k(seq.omegas()[k], omega_prime, j_prime, delta))
        .collect::<Result<Vec<f64>>>()?;
    let eps_sup = eps_k.iter().copied().fold(0.0, f64::max);
    if eps_sup >= 1.0 {
        return Err(Error::HarauxContractionFails { eps_sup });
    }
    Ok(HarauxPlan {
        j_prime,
        delta,
        omega_prime,
        active,
        eps_k,
        eps_sup,
        eps_prime,
        c_prime,
        lipschitz_l,
        gamma_prime,
    })
}

/// y(t) = x(t) − (1/2J′)Σ_{n=−J′}^{J′−1} e^{−iω′nδ}x(t + nδ), built in the coefficient domain.
///
/// The ω′ term is removed exactly; base terms become (1 − f(ω_k))·x_k.
pub fn haraux_filter(aug: &AugmentedExpSum, plan: &HarauxPlan) -> Result<ExpSum> {
    if !(plan.eps_sup < 1.0) {
        return Err(Error::HarauxContractionFails { eps_sup: plan.eps_sup });
    }
    if aug.omega_prime() != plan.omega_prime {
        return Err(Error::InvalidParameter {
            name: "omega_prime",
            value: aug.omega_prime(),
            reason: "differs from the plan",
        });
    }
    let base = aug.base();
    let coeffs = base
        .omegas()
        .iter()
        .zip(base.coeffs())
        .map(|(&w, &x)| (1.0 - filter_factor(w, plan.omega_prime, plan.j_prime, plan.delta)) * x)
        .collect();
    ExpSum::new(base.omegas().to_vec(), coeffs)
}

/// Both sides of Σ_{j=−J}^{J}|y(t′+jδ)|² ≤ 4Σ_{m=−J−J′}^{J+J′−1}|x(t′+mδ)|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarauxEnergySides {
    pub filtered: f64,
    pub bound: f64,
}

impl HarauxEnergySides {
    pub fn holds(&self) -> bool {
        self.filtered <= self.bound
    }
}

pub fn haraux_energy_sides(aug: &AugmentedExpSum, plan: &HarauxPlan, grid: &SamplingGrid) -> Result<HarauxEnergySides> {
    let y = haraux_filter(aug, plan)?;
    let j = grid.j as i64;
    let jp = plan.j_prime as i64;
    let filtered = compensated_sum((-j..=j).map(|m| y.eval(grid.time(m)).norm_sqr()));
    let bound = 4.0 * compensated_sum((-j - jp..j + jp).map(|m| aug.eval(grid.time(m)).norm_sqr()));
    Ok(HarauxEnergySides { filtered, bound })
}

/// Frame constants c3, c4 of the system augmented by ω′, with the explicit upper companion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtendedFrameReport {
    /// c_lower = c3 and c_upper = c4 over j ∈ [−J−J′, J+J′]; ω′ is the last pencil coordinate.
    pub extended: FrameBoundReport,
    pub base: FrameBoundReport,
    pub plan: HarauxPlan,
    /// (1 + (2J+2J′+1)/(2J+1))·max{4c2, 12Jδ}·(1 + (J′δ)²).
    pub c4_formula: f64,
}

pub fn extended_frame_constants(
    seq: &ExponentSequence,
    mask: &BandMask,
    omega_prime: f64,
    grid: &SamplingGrid,
    j_prime: usize,
    cls: &GapClassification,
) -> Result<ExtendedFrameReport> {
    if mask.delta != grid.delta {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: grid.delta,
            reason: "band mask was built for a different step",
        });
    }
    let plan = plan_haraux(seq, mask, omega_prime, j_prime, grid.delta)?;
    let base = frame_constants(seq, grid, cls)?;
    if base.singular {
        return Err(Error::SingularPencil {
            min_eig: base.min_eig,
            max_eig: base.max_eig,
        });
    }

    let ext_grid = SamplingGrid::new(grid.delta, grid.j + j_prime, grid.t_shift)?;
    let mut freqs: Vec<f64> = plan.active.iter().map(|&k| seq.omegas()[k]).collect();
    freqs.push(omega_prime);
    let s = gram_for(&freqs, &ext_grid);
    let q = q_matrix(cls, seq)?.restrict(&plan.active)?.augmented_dense();
    let eigen = hermitian_pencil_eig(&s, &q)?;
    let mut active = plan.active.clone();
    active.push(seq.len());
    let diagnostics = vec![
        format!("augmented exponent omega' = {omega_prime} at pencil index {}", freqs.len() - 1),
        format!("{} samples, {} exponents", ext_grid.sample_count(), freqs.len()),
    ];
    let extended = FrameBoundReport::from_pencil(eigen, active, diagnostics);

    let j = grid.j as f64;
    let jd = grid.horizon();
    let jpd = j_prime as f64 * grid.delta;
    let c4_formula = (1.0 + (2.0 * j + 2.0 * j_prime as f64 + 1.0) / (2.0 * j + 1.0))
        * (4.0 * base.c_upper).max(12.0 * jd)
        * (1.0 + jpd * jpd);
    if extended.c_upper > c4_formula {
        return Err(Error::FormulaBoundViolated {
            empirical: extended.c_upper,
            formula: c4_formula,
        });
    }
    Ok(ExtendedFrameReport {
        extended,
        base,
        plan,
        c4_formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{band_mask, classify};

    #[test]
    fn epsilon_examples() {
        let e = epsilon_k(1.0, 0.0, 10, 0.1).unwrap();
        assert!((e - 0.841_821_7).abs() < 1e-6, "{e}");
        // (ω−ω′)J′δ = π.
        assert!(epsilon_k(PI, 0.0, 10, 0.1).unwrap() < 1e-15);
        // Small δ: second factor → 1.
        let e = epsilon_k(1.0, 0.0, 1_000_000, 1e-6).unwrap();
        assert!((e - 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn epsilon_errors() {
        assert!(matches!(epsilon_k(2.0, 2.0, 4, 0.1), Err(Error::ZeroDistance { .. })));
        assert!(matches!(
            epsilon_k(2.0 * PI / 0.1, 0.0, 4, 0.1),
            Err(Error::SamplingResonance { .. })
        ));
    }

    #[test]
    fn factor_modulus_is_epsilon() {
        for (w, jp, d) in [(0.7, 3usize, 0.2), (-2.5, 8, 0.05), (1e-10, 5, 0.3)] {
            let f = filter_factor(w, 0.0, jp, d);
            let avg: Complex64 = (-(jp as i64)..jp as i64)
                .map(|n| Complex64::from_polar(1.0, w * n as f64 * d))
                .sum::<Complex64>()
                / (2.0 * jp as f64);
            assert!((f - avg).norm() < 1e-13);
            if w.abs() > 1e-6 {
                assert!((f.norm() - epsilon_k(w, 0.0, jp, d).unwrap()).abs() < 1e-13);
            }
        }
        assert_eq!(filter_factor(0.4, 0.4, 3, 0.1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn level_root() {
        assert!((sinc_level_root(2.0 / PI) - PI / 2.0).abs() < 1e-11);
        assert!((sinc(sinc_level_root(0.5)) - 0.5).abs() < 1e-11);
        assert_eq!(sinc_level_root(0.0), PI);
    }

    #[test]
    fn single_exponent_plan() {
        // (ω − ω′)J′δ = π/2 gives ε′ = 2/π.
        let seq = ExponentSequence::with_gap(vec![0.0], 1.0).unwrap();
        let delta = 0.1;
        let jp = 10;
        let wp = -(PI / 2.0) / (jp as f64 * delta);
        let mask = band_mask(&seq, delta).unwrap();
        let plan = plan_haraux(&seq, &mask, wp, jp, delta).unwrap();
        assert!((plan.eps_prime - 2.0 / PI).abs() < 1e-14);
        assert!((plan.c_prime - PI / 2.0).abs() < 1e-11);
        assert!(plan.eps_sup < 1.0);
        assert!(matches!(
            plan_haraux(&seq, &mask, 0.0, jp, delta),
            Err(Error::ZeroDistance { .. })
        ));
    }

    #[test]
    fn far_exponents_give_small_eps() {
        let seq = ExponentSequence::with_gap(vec![-4.0, 4.0], 1.0).unwrap();
        let mask = band_mask(&seq, 0.2).unwrap();
        let plan = plan_haraux(&seq, &mask, 0.0, 40, 0.2).unwrap();
        assert!(plan.eps_prime < 0.05);
        assert!(plan.c_prime > 3.0);
        assert!(plan.eps_sup < 1.0);
    }

    #[test]
    fn filter_kills_pure_prime_term_and_contracts() {
        let seq = ExponentSequence::with_gap(vec![-2.0, 1.5], 1.0).unwrap();
        let mask = band_mask(&seq, 0.25).unwrap();
        let plan = plan_haraux(&seq, &mask, 0.3, 12, 0.25).unwrap();
        let zero = ExpSum::over(&seq, vec![Complex64::new(0.0, 0.0); 2]).unwrap();
        let pure = AugmentedExpSum::new(zero, 0.3, Complex64::new(1.5, -0.5)).unwrap();
        let y = haraux_filter(&pure, &plan).unwrap();
        assert!(y.coeffs().iter().all(|c| c.norm() == 0.0));

        let x = ExpSum::over(&seq, vec![Complex64::new(1.0, 0.5), Complex64::new(-0.2, 0.9)]).unwrap();
        let aug = AugmentedExpSum::new(x.clone(), 0.3, Complex64::new(0.7, 0.0)).unwrap();
        let y = haraux_filter(&aug, &plan).unwrap();
        for k in 0..2 {
            let diff = (x.coeffs()[k] - y.coeffs()[k]).norm();
            assert!(diff <= plan.eps_k[k] * x.coeffs()[k].norm() * (1.0 + 1e-14));
        }
        let grid = SamplingGrid::centered(0.25, 20).unwrap();
        assert!(haraux_energy_sides(&aug, &plan, &grid).unwrap().holds());
    }

    #[test]
    fn extended_constants_and_formula() {
        let seq = ExponentSequence::new(vec![-3.0, -1.0, -0.7, 2.0], 1.0, 0.5).unwrap();
        let cls = classify(&seq).unwrap();
        let grid = SamplingGrid::centered(0.2, 24).unwrap();
        let mask = band_mask(&seq, grid.delta).unwrap();
        let r = extended_frame_constants(&seq, &mask, 0.6, &grid, 12, &cls).unwrap();
        assert!(r.extended.c_lower > 0.0);
        assert!(r.extended.c_upper <= r.c4_formula);
        assert_eq!(r.extended.pencil_dim, 5);
    }
}
