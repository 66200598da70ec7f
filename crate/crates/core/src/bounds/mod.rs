//! Sharp frame constants as extreme eigenvalues of the pencil (sampled Gram, Q matrix),
//! the Haraux augmentation by one exponent, and the continuum-limit scan.

mod continuum;
mod haraux;

pub use continuum::{continuum_limit_scan, ContinuumRow, ContinuumScan};
pub use haraux::{
    epsilon_k, extended_frame_constants, filter_factor, haraux_energy_sides, haraux_filter, plan_haraux,
    sinc_level_root, ExtendedFrameReport, HarauxEnergySides, HarauxPlan,
};

pub use crate::linalg::hermitian_pencil_eig;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{band_mask, BandMask, ExponentSequence, GapClassification};
use crate::linalg::{Eigen, Matrix};
use crate::numeric::NeumaierSum;
use crate::quadforms::q_matrix;
use crate::sums::SamplingGrid;

/// A pencil with min_eig ≤ this times max_eig is reported singular.
pub const SINGULAR_RATIO: f64 = 1e-10;

const DIRICHLET_DIRECT_BELOW: f64 = 1e-8;

/// Σ_{j=−J}^{J} e^{iθj}.
pub fn dirichlet(theta: f64, j: usize) -> f64 {
    let half = 0.5 * theta;
    let s = half.sin();
    if s.abs() < DIRICHLET_DIRECT_BELOW {
        // θ ≡ 0 mod 2π up to rounding: the sum is real, Σ cos(θj).
        let mut acc = NeumaierSum::new();
        acc += 1.0;
        for m in 1..=j {
            acc += 2.0 * (theta * m as f64).cos();
        }
        return acc.value();
    }
    ((2 * j + 1) as f64 * half).sin() / s
}

/// Gram matrix of the sampled energy over the active frequencies `freqs`.
///
/// S_kn = δΣ_j e^{i(ω_n − ω_k)t_j}, so that v^H·S·v = δΣ_j|Σ_k v_k e^{iω_k t_j}|².
pub fn gram_for(freqs: &[f64], grid: &SamplingGrid) -> Matrix {
    let n = freqs.len();
    let diag = grid.delta * grid.sample_count() as f64;
    Matrix::from_fn(n, |k, m| {
        if k == m {
            return Complex64::new(diag, 0.0);
        }
        let d = freqs[m] - freqs[k];
        grid.delta * dirichlet(d * grid.delta, grid.j) * Complex64::from_polar(1.0, d * grid.t_shift)
    })
}

/// Sampled Gram over the indices the band mask admits.
pub fn sampled_gram(seq: &ExponentSequence, grid: &SamplingGrid, mask: &BandMask) -> Matrix {
    let freqs: Vec<f64> = mask.active_indices().into_iter().map(|k| seq.omegas()[k]).collect();
    gram_for(&freqs, grid)
}

/// Extreme pencil eigenvalues as frame constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameBoundReport {
    pub c_lower: f64,
    pub c_upper: f64,
    pub pencil_dim: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    pub singular: bool,
    /// Sequence indices the pencil runs over.
    pub active: Vec<usize>,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    eigen: Option<Eigen>,
}

impl FrameBoundReport {
    /// Builds a report from pencil eigenpairs.
    pub fn from_pencil(eigen: Eigen, active: Vec<usize>, diagnostics: Vec<String>) -> Self {
        let min_eig = eigen.values.first().copied().unwrap_or(0.0);
        let max_eig = eigen.values.last().copied().unwrap_or(0.0);
        let singular = min_eig <= SINGULAR_RATIO * max_eig;
        FrameBoundReport {
            c_lower: if singular { 0.0 } else { min_eig },
            c_upper: max_eig,
            pencil_dim: eigen.values.len(),
            min_eig,
            max_eig,
            singular,
            active,
            diagnostics,
            eigen: Some(eigen),
        }
    }

    /// Pencil eigenpairs (absent after deserialization).
    pub fn pencil(&self) -> Option<&Eigen> {
        self.eigen.as_ref()
    }
}

/// Sharp c1, c2 with c1·Q(x) ≤ δΣ_j|x(t′ + jδ)|² ≤ c2·Q(x) over band-admissible coefficients.
///
/// The report is returned even when the pencil is singular (`singular = true`, `c_lower = 0`).
pub fn frame_constants(seq: &ExponentSequence, grid: &SamplingGrid, cls: &GapClassification) -> Result<FrameBoundReport> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let qm = q_matrix(cls, seq)?;
    let mask = band_mask(seq, grid.delta)?;
    let active = mask.active_indices();
    if active.is_empty() {
        return Err(Error::BandViolation {
            indices: mask.inactive_indices(),
        });
    }
    let s = sampled_gram(seq, grid, &mask);
    let q = qm.restrict(&active)?.to_dense();
    let eigen = hermitian_pencil_eig(&s, &q)?;
    let diagnostics = frame_diagnostics(seq, grid, &mask, active.len());
    Ok(FrameBoundReport::from_pencil(eigen, active, diagnostics))
}

fn frame_diagnostics(seq: &ExponentSequence, grid: &SamplingGrid, mask: &BandMask, active: usize) -> Vec<String> {
    let mut notes = Vec::new();
    let inactive = mask.inactive_indices();
    if !inactive.is_empty() {
        notes.push(format!(
            "band mask |omega| <= {:.6} excludes indices {:?}",
            mask.threshold, inactive
        ));
    }
    notes.push(format!("{} samples, {} active exponents", grid.sample_count(), active));
    if grid.sample_count() < active {
        notes.push("fewer samples than active exponents: pencil rank deficient".to_string());
    }
    let horizon = PI / seq.gamma();
    if grid.horizon() <= horizon {
        notes.push(format!(
            "horizon J*delta = {:.6} does not exceed pi/gamma = {:.6}",
            grid.horizon(),
            horizon
        ));
    }
    notes
}
