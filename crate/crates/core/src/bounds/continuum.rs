//! Discrete frame constants at δ = R/J against the continuous ones on [−R, R].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frame_constants;
use crate::error::{Error, Result};
use crate::exponents::{ExponentSequence, GapClassification};
use crate::linalg::{hermitian_pencil_eig, Matrix};
use crate::numeric::sinc;
use crate::quadforms::q_matrix;
use crate::sums::SamplingGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumRow {
    #[serde(rename = "J")]
    pub j: usize,
    pub delta: f64,
    pub active_count: usize,
    /// Active set differs from the previous row.
    pub active_changed: bool,
    pub discrete_min: f64,
    pub discrete_max: f64,
    pub continuous_min: f64,
    pub continuous_max: f64,
    pub gap_min: f64,
    pub gap_max: f64,
    /// max of the two relative gaps.
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumScan {
    #[serde(rename = "R")]
    pub r: f64,
    pub rows: Vec<ContinuumRow>,
}

/// Continuous Gram K_kn = ∫_{−R}^{R} e^{i(ω_n − ω_k)t} dt = 2R·sinc((ω_n − ω_k)R).
pub fn continuous_gram(freqs: &[f64], r: f64) -> Matrix {
    Matrix::from_fn(freqs.len(), |k, n| Complex64::new(2.0 * r * sinc((freqs[n] - freqs[k]) * r), 0.0))
}

/// For each J: δ = R/J, centred grid, discrete pencil versus the continuous pencil on the
/// same active indices.
pub fn continuum_limit_scan(
    seq: &ExponentSequence,
    cls: &GapClassification,
    r: f64,
    j_list: &[usize],
) -> Result<ContinuumScan> {
    if !(r > PI / seq.gamma()) || !r.is_finite() {
        return Err(Error::HorizonViolated {
            j_delta: r,
            required: PI / seq.gamma(),
        });
    }
    let qm = q_matrix(cls, seq)?;
    let mut rows = Vec::with_capacity(j_list.len());
    let mut previous: Option<Vec<usize>> = None;
    for &j in j_list {
        let grid = SamplingGrid::centered(r / j as f64, j)?;
        let report = frame_constants(seq, &grid, cls)?;
        let freqs: Vec<f64> = report.active.iter().map(|&k| seq.omegas()[k]).collect();
        let q = qm.restrict(&report.active)?.to_dense();
        let cont = hermitian_pencil_eig(&continuous_gram(&freqs, r), &q)?;
        let continuous_min = cont.values[0];
        let continuous_max = *cont.values.last().expect("nonempty pencil");
        let gap_min = (report.min_eig - continuous_min).abs();
        let gap_max = (report.max_eig - continuous_max).abs();
        let rel_gap = (gap_min / continuous_min.abs()).max(gap_max / continuous_max.abs());
        let active_changed = previous.as_ref().is_some_and(|p| *p != report.active);
        previous = Some(report.active.clone());
        rows.push(ContinuumRow {
            j,
            delta: grid.delta,
            active_count: report.active.len(),
            active_changed,
            discrete_min: report.min_eig,
            discrete_max: report.max_eig,
            continuous_min,
            continuous_max,
            gap_min,
            gap_max,
            rel_gap,
        });
    }
    Ok(ContinuumScan { r, rows })
}
