//! Exponent sequences, the weakened gap condition, the A1/A2 classification and the
//! band (Nyquist) mask.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite window of a strictly increasing frequency sequence together with the weak-gap
/// parameter `gamma` and the classification threshold `gamma0`.
///
/// Construction checks only the scalar parameters; monotonicity and the gap condition
/// are reported by [`validate_weak_gap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceRepr", into = "SequenceRepr")]
pub struct ExponentSequence {
    omegas: Vec<f64>,
    gamma: f64,
    gamma0: f64,
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    omegas: Vec<f64>,
    gamma: f64,
    #[serde(default)]
    gamma0: Option<f64>,
}

impl TryFrom<SequenceRepr> for ExponentSequence {
    type Error = Error;
    fn try_from(r: SequenceRepr) -> Result<Self> {
        ExponentSequence::new(r.omegas, r.gamma, r.gamma0.unwrap_or(r.gamma))
    }
}

impl From<ExponentSequence> for SequenceRepr {
    fn from(s: ExponentSequence) -> Self {
        SequenceRepr {
            omegas: s.omegas,
            gamma: s.gamma,
            gamma0: Some(s.gamma0),
        }
    }
}

impl ExponentSequence {
    pub fn new(omegas: Vec<f64>, gamma: f64, gamma0: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be positive and finite",
            });
        }
        if !gamma0.is_finite() || gamma0 <= 0.0 || gamma0 > gamma {
            return Err(Error::InvalidParameter {
                name: "gamma0",
                value: gamma0,
                reason: "must satisfy 0 < gamma0 <= gamma",
            });
        }
        Ok(Self {
            omegas,
            gamma,
            gamma0,
        })
    }

    /// Convenience constructor with `gamma0 = gamma`.
    pub fn with_gap(omegas: Vec<f64>, gamma: f64) -> Result<Self> {
        Self::new(omegas, gamma, gamma)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Same frequencies with a different classification threshold.
    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        Self::new(self.omegas.clone(), self.gamma, gamma0)
    }

    /// Every frequency shifted by `s`.
    pub fn translated(&self, s: f64) -> Self {
        Self {
            omegas: self.omegas.iter().map(|w| w + s).collect(),
            ..self.clone()
        }
    }
}

/// One failed check in a [`GapReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapViolation {
    /// ω_{k+1} ≤ ω_k.
    NotIncreasing { k: usize, left: f64, right: f64 },
    /// ω_{k+2} − ω_k < 2γ.
    WeakGap { k: usize, spread: f64, required: f64 },
}

/// Outcome of [`validate_weak_gap`]; empty when the sequence is valid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GapReport {
    pub violations: Vec<GapViolation>,
}

impl GapReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// The (k, k+2) index pairs violating the weak gap.
    pub fn weak_gap_pairs(&self) -> Vec<(usize, usize)> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                GapViolation::WeakGap { k, .. } => Some((*k, k + 2)),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for GapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            match v {
                GapViolation::NotIncreasing { k, left, right } => {
                    write!(f, "; not increasing at ({k}, {}): {left} >= {right}", k + 1)?
                }
                GapViolation::WeakGap { k, spread, required } => {
                    write!(f, "; weak gap at ({k}, {}): {spread} < {required}", k + 2)?
                }
            }
        }
        Ok(())
    }
}

/// Relative slack on the weak gap, so that sequences meeting it with equality in exact
/// arithmetic are not rejected for rounding.
pub const GAP_ROUNDING: f64 = 1e-12;

/// Checks strict monotonicity and ω_{k+2} − ω_k ≥ 2γ, reporting every violation.
pub fn validate_weak_gap(seq: &ExponentSequence) -> Result<GapReport> {
    if seq.omegas.is_empty() {
        return Err(Error::EmptySequence);
    }
    if seq.omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("omegas"));
    }
    let w = &seq.omegas;
    let mut violations = Vec::new();
    for k in 0..w.len().saturating_sub(1) {
        if w[k + 1] <= w[k] {
            violations.push(GapViolation::NotIncreasing {
                k,
                left: w[k],
                right: w[k + 1],
            });
        }
    }
    let required = 2.0 * seq.gamma;
    for k in 0..w.len().saturating_sub(2) {
        let spread = w[k + 2] - w[k];
        let scale = required.max(w[k].abs()).max(w[k + 2].abs());
        if spread < required - GAP_ROUNDING * scale {
            violations.push(GapViolation::WeakGap { k, spread, required });
        }
    }
    Ok(GapReport { violations })
}

/// How the first and last index of a finite window are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// A missing neighbour gap counts as +∞ (so it is ≥ γ0).
    InfiniteGap,
}

/// Partition of indices into A1 singletons, A2 chain leads and their partners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapClassification {
    pub len: usize,
    pub gamma0: f64,
    pub a1: Vec<usize>,
    pub a2_leads: Vec<usize>,
    /// Lead k ↦ partner k+1.
    pub partners: BTreeMap<usize, usize>,
    pub boundary_policy: BoundaryPolicy,
}

/// Role of a single index in a [`GapClassification`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexRole {
    Single,
    Lead,
    Partner,
}

impl GapClassification {
    pub fn role(&self, k: usize) -> Option<IndexRole> {
        if self.a1.binary_search(&k).is_ok() {
            Some(IndexRole::Single)
        } else if self.partners.contains_key(&k) {
            Some(IndexRole::Lead)
        } else if k > 0 && self.partners.get(&(k - 1)) == Some(&k) {
            Some(IndexRole::Partner)
        } else {
            None
        }
    }

    /// Partner indices in ascending order.
    pub fn partner_indices(&self) -> Vec<usize> {
        self.partners.values().copied().collect()
    }
}

/// Splits indices by the two adjacent gaps compared against γ0.
///
/// k ∈ A1 iff both adjacent gaps are ≥ γ0; k is an A2 lead iff its left gap is ≥ γ0 and its
/// right gap is < γ0, and then k+1 is its partner. Under the weak gap with γ0 ≤ γ two
/// consecutive short gaps cannot occur, so every index receives exactly one role.
pub fn classify(seq: &ExponentSequence) -> Result<GapClassification> {
    let report = validate_weak_gap(seq)?;
    if !report.is_ok() {
        return Err(Error::GapViolation(report));
    }
    let w = &seq.omegas;
    let n = w.len();
    let g0 = seq.gamma0;
    let left_gap = |k: usize| if k == 0 { f64::INFINITY } else { w[k] - w[k - 1] };
    let right_gap = |k: usize| if k + 1 == n { f64::INFINITY } else { w[k + 1] - w[k] };

    let mut a1 = Vec::new();
    let mut a2_leads = Vec::new();
    let mut partners = BTreeMap::new();
    for k in 0..n {
        if left_gap(k) >= g0 {
            if right_gap(k) >= g0 {
                a1.push(k);
            } else {
                a2_leads.push(k);
                partners.insert(k, k + 1);
            }
        }
    }
    Ok(GapClassification {
        len: n,
        gamma0: g0,
        a1,
        a2_leads,
        partners,
        boundary_policy: BoundaryPolicy::InfiniteGap,
    })
}

/// Per-index admissibility |ω_k| ≤ π/δ − γ/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandMask {
    pub delta: f64,
    pub threshold: f64,
    pub admissible: Vec<bool>,
}

impl BandMask {
    pub fn active_indices(&self) -> Vec<usize> {
        self.admissible
            .iter()
            .enumerate()
            .filter_map(|(k, &a)| a.then_some(k))
            .collect()
    }

    pub fn inactive_indices(&self) -> Vec<usize> {
        self.admissible
            .iter()
            .enumerate()
            .filter_map(|(k, &a)| (!a).then_some(k))
            .collect()
    }

    pub fn active_count(&self) -> usize {
        self.admissible.iter().filter(|&&a| a).count()
    }
}

pub fn band_threshold(gamma: f64, delta: f64) -> f64 {
    PI / delta - gamma / 2.0
}

pub fn band_mask(seq: &ExponentSequence, delta: f64) -> Result<BandMask> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must be positive and finite",
        });
    }
    let threshold = band_threshold(seq.gamma, delta);
    if threshold <= 0.0 {
        return Err(Error::NoAdmissibleBand { threshold });
    }
    Ok(BandMask {
        delta,
        threshold,
        admissible: seq.omegas.iter().map(|w| w.abs() <= threshold).collect(),
    })
}
