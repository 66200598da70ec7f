//! Two strings or two beams joined at x = a: modal solutions, the sampled jump of u_x at the
//! junction, Sobolev norms of the initial data, observability constants and reconstruction.
//!
//! Left modes are sin(nπx/a) on (0, a); right modes are sin(mπ(x − a)/(1 − a)) on (a, 1),
//! the shifted form being the one that vanishes at both ends of the right interval. A mode
//! with amplitudes (p, q) evolves as p·e^{iωt} + q·e^{−iωt}, with ω = nπ/ℓ for strings and
//! (nπ/ℓ)² for beams, ℓ the interval length.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{frame_constants, gram_for, FrameBoundReport, SINGULAR_RATIO};
use crate::error::{Error, Result};
use crate::exponents::{classify, validate_weak_gap, ExponentSequence};
use crate::linalg::{hermitian_eig, hermitian_pencil_eig, Cholesky, Matrix};
use crate::numeric::compensated_sum;
use crate::random::unit_disc;
use crate::sums::{sampled_energy, ExpSum, SamplingGrid, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    String,
    Beam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// One spatial mode with the amplitudes of e^{+iωt} and e^{−iωt}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub n: usize,
    #[serde(with = "pair")]
    pub plus: Complex64,
    #[serde(with = "pair")]
    pub minus: Complex64,
}

mod pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledSystem {
    pub kind: SystemKind,
    pub a: f64,
    #[serde(default)]
    pub left: Vec<Mode>,
    #[serde(default)]
    pub right: Vec<Mode>,
    /// Gap parameter; strings default to (π/2)·min{1/a, 1/(1−a)}, beams require it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Classification threshold; defaults to γ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
}

/// Where an exponent comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTag {
    pub side: Side,
    pub n: usize,
    /// +1 for e^{iωt}, −1 for e^{−iωt}.
    pub sign: i8,
    /// Factor turning the amplitude into the coefficient of the jump sum.
    pub weight: f64,
}

/// Sorted exponents of a system with one tag per exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedExponents {
    pub sequence: ExponentSequence,
    pub tags: Vec<ModeTag>,
}

const COLLISION_TOL: f64 = 1e-9;

impl CoupledSystem {
    pub fn new(kind: SystemKind, a: f64, left: Vec<Mode>, right: Vec<Mode>) -> Result<Self> {
        let sys = CoupledSystem {
            kind,
            a,
            left,
            right,
            gamma: None,
            gamma0: None,
        };
        sys.check()?;
        Ok(sys)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    /// Same modes with every amplitude replaced.
    pub fn with_amplitudes(&self, amps: &[(Complex64, Complex64)]) -> Result<Self> {
        let total = self.left.len() + self.right.len();
        if amps.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amps.len(),
            });
        }
        let mut out = self.clone();
        for (m, &(p, q)) in out.left.iter_mut().chain(out.right.iter_mut()).zip(amps) {
            m.plus = p;
            m.minus = q;
        }
        Ok(out)
    }

    fn check(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: self.a,
                reason: "junction must lie in (0, 1)",
            });
        }
        for side in [&self.left, &self.right] {
            let mut ns: Vec<usize> = side.iter().map(|m| m.n).collect();
            if ns.contains(&0) {
                return Err(Error::InvalidParameter {
                    name: "n",
                    value: 0.0,
                    reason: "mode indices start at 1",
                });
            }
            ns.sort_unstable();
            if let Some(w) = ns.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter {
                    name: "n",
                    value: w[0] as f64,
                    reason: "mode indices must be distinct per side",
                });
            }
        }
        for m in self.left.iter().chain(&self.right) {
            if ![m.plus.re, m.plus.im, m.minus.re, m.minus.im].iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("amplitudes"));
            }
        }
        Ok(())
    }

    fn length(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.a,
            Side::Right => 1.0 - self.a,
        }
    }

    /// Spatial wavenumber nπ/ℓ.
    pub fn wavenumber(&self, side: Side, n: usize) -> f64 {
        n as f64 * PI / self.length(side)
    }

    /// Temporal frequency of a mode.
    pub fn frequency(&self, side: Side, n: usize) -> f64 {
        let k = self.wavenumber(side, n);
        match self.kind {
            SystemKind::String => k,
            SystemKind::Beam => k * k,
        }
    }

    /// u_x(a−0) − u_x(a+0) contribution per unit modal value.
    pub fn jump_weight(&self, side: Side, n: usize) -> f64 {
        let k = self.wavenumber(side, n);
        match side {
            Side::Left => {
                if n % 2 == 0 {
                    k
                } else {
                    -k
                }
            }
            Side::Right => -k,
        }
    }

    pub fn gamma(&self) -> Result<f64> {
        match (self.gamma, self.kind) {
            (Some(g), _) => {
                if g > 0.0 && g.is_finite() {
                    Ok(g)
                } else {
                    Err(Error::InvalidParameter {
                        name: "gamma",
                        value: g,
                        reason: "must be positive and finite",
                    })
                }
            }
            (None, SystemKind::String) => Ok(string_gamma(self.a)),
            (None, SystemKind::Beam) => Err(Error::InvalidParameter {
                name: "gamma",
                value: f64::NAN,
                reason: "beam systems need an explicit gamma",
            }),
        }
    }

    /// (side, mode) pairs in storage order: left modes, then right modes.
    pub fn modes(&self) -> impl Iterator<Item = (Side, &Mode)> {
        self.left
            .iter()
            .map(|m| (Side::Left, m))
            .chain(self.right.iter().map(|m| (Side::Right, m)))
    }

    /// Largest admissible mode index on a side for step δ: the band condition
    /// ω ≤ π/δ − γ/2 solved for n.
    pub fn mode_cap(&self, side: Side, delta: f64) -> Result<f64> {
        let gamma = self.gamma()?;
        let l = self.length(side);
        Ok(match self.kind {
            SystemKind::String => {
                let other = 1.0 - l;
                l / delta - 0.25 * (1.0f64).min(l / other)
            }
            SystemKind::Beam => {
                let band = PI / delta - gamma / 2.0;
                if band <= 0.0 {
                    0.0
                } else {
                    l / PI * band.sqrt()
                }
            }
        })
    }

    /// Errors with every mode above its cap for step δ, and when δ > π/γ.
    pub fn check_caps(&self, delta: f64) -> Result<()> {
        let gamma = self.gamma()?;
        if PI / delta < gamma {
            return Err(Error::WindowExceedsPeriod {
                gamma,
                half_period: PI / delta,
            });
        }
        let mut over = Vec::new();
        for side in [Side::Left, Side::Right] {
            let cap = self.mode_cap(side, delta)?;
            let modes = match side {
                Side::Left => &self.left,
                Side::Right => &self.right,
            };
            for m in modes {
                if m.n as f64 > cap * (1.0 + 1e-12) {
                    over.push(format!("{:?} n={} (cap {:.4})", side, m.n, cap).to_lowercase());
                }
            }
        }
        if over.is_empty() {
            Ok(())
        } else {
            Err(Error::ModeCapExceeded { modes: over })
        }
    }

    /// Time horizon the theorems require of J·δ.
    pub fn required_horizon(&self) -> Result<f64> {
        Ok(match self.kind {
            SystemKind::String => 2.0 * self.a.max(1.0 - self.a),
            SystemKind::Beam => PI / self.gamma()?,
        })
    }

    /// u(x, t) from the modal expansion, for checking the jump sum.
    pub fn displacement(&self, x: f64, t: f64) -> Complex64 {
        let mut u = Complex64::new(0.0, 0.0);
        for (side, m) in self.modes() {
            let (inside, xi) = match side {
                Side::Left => (x > 0.0 && x < self.a, x),
                Side::Right => (x > self.a && x < 1.0, x - self.a),
            };
            if !inside {
                continue;
            }
            let w = self.frequency(side, m.n);
            let shape = (self.wavenumber(side, m.n) * xi).sin();
            u += shape * (m.plus * Complex64::from_polar(1.0, w * t) + m.minus * Complex64::from_polar(1.0, -w * t));
        }
        u
    }
}

/// (π/2)·min{1/a, 1/(1−a)}.
pub fn string_gamma(a: f64) -> f64 {
    FRAC_PI_2 * (1.0 / a).min(1.0 / (1.0 - a))
}

/// Merges ±ω of all modes into one sorted sequence and validates the weak gap.
pub fn assemble_exponents(sys: &CoupledSystem) -> Result<TaggedExponents> {
    sys.check()?;
    let gamma = sys.gamma()?;
    let mut entries: Vec<(f64, ModeTag)> = Vec::new();
    for (side, m) in sys.modes() {
        let w = sys.frequency(side, m.n);
        let weight = sys.jump_weight(side, m.n);
        for sign in [1i8, -1] {
            entries.push((
                sign as f64 * w,
                ModeTag {
                    side,
                    n: m.n,
                    sign,
                    weight,
                },
            ));
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptySequence);
    }
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in entries.windows(2) {
        if (w[1].0 - w[0].0).abs() <= COLLISION_TOL * w[0].0.abs().max(1.0) {
            return Err(Error::JunctionResonant { frequency: w[0].0 });
        }
    }
    let gamma0 = sys.gamma0.unwrap_or(gamma);
    let sequence = ExponentSequence::new(entries.iter().map(|e| e.0).collect(), gamma, gamma0)?;
    let report = validate_weak_gap(&sequence)?;
    if !report.is_ok() {
        return Err(Error::GapViolation(report));
    }
    Ok(TaggedExponents {
        sequence,
        tags: entries.into_iter().map(|e| e.1).collect(),
    })
}

impl TaggedExponents {
    /// Position of each system mode's (+, −) exponents, in [`CoupledSystem::modes`] order.
    fn positions(&self, sys: &CoupledSystem) -> Vec<(usize, usize)> {
        sys.modes()
            .map(|(side, m)| {
                let find = |sign: i8| {
                    self.tags
                        .iter()
                        .position(|t| t.side == side && t.n == m.n && t.sign == sign)
                        .expect("tag for every mode")
                };
                (find(1), find(-1))
            })
            .collect()
    }
}

/// The observed jump u_x(a−0, t) − u_x(a+0, t) as an exponential sum over the tagged exponents.
pub fn trace_jump_sum(sys: &CoupledSystem) -> Result<ExpSum> {
    let tagged = assemble_exponents(sys)?;
    jump_sum_on(sys, &tagged)
}

fn jump_sum_on(sys: &CoupledSystem, tagged: &TaggedExponents) -> Result<ExpSum> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); tagged.tags.len()];
    for ((_, m), (ip, im)) in sys.modes().zip(tagged.positions(sys)) {
        coeffs[ip] = tagged.tags[ip].weight * m.plus;
        coeffs[im] = tagged.tags[im].weight * m.minus;
    }
    ExpSum::over(&tagged.sequence, coeffs)
}

/// Jump samples on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTrace {
    pub grid: SamplingGrid,
    pub samples: Vec<[f64; 2]>,
}

impl ObservationTrace {
    pub fn values(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| Complex64::new(s[0], s[1])).collect()
    }

    /// δΣ_j|sample_j|².
    pub fn energy(&self) -> f64 {
        self.grid.delta * compensated_sum(self.samples.iter().map(|s| s[0] * s[0] + s[1] * s[1]))
    }

    /// (j, t, re, im) rows.
    pub fn rows(&self) -> impl Iterator<Item = (i64, f64, f64, f64)> + '_ {
        self.grid
            .indices()
            .zip(&self.samples)
            .map(|(j, s)| (j, self.grid.time(j), s[0], s[1]))
    }
}

pub fn observe(sys: &CoupledSystem, grid: &SamplingGrid) -> Result<ObservationTrace> {
    sys.check_caps(grid.delta)?;
    let sum = trace_jump_sum(sys)?;
    Ok(ObservationTrace {
        grid: *grid,
        samples: grid
            .times()
            .map(|t| {
                let z = sum.eval(t);
                [z.re, z.im]
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Datum {
    U0,
    U1,
}

/// Spectral H^s norm on the combined modal basis: Σ (nπ/ℓ)^{2s}·(ℓ/2)·|coefficient|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevSpec {
    pub s: f64,
}

/// Squared H^s norm of u0 (coefficients p + q) or u1 (coefficients iω(p − q)).
pub fn sobolev_norm(sys: &CoupledSystem, spec: SobolevSpec, which: Datum) -> f64 {
    compensated_sum(sys.modes().map(|(side, m)| {
        let k = sys.wavenumber(side, m.n);
        let weight = k.powf(2.0 * spec.s) * sys.length(side) / 2.0;
        let coeff = match which {
            Datum::U0 => (m.plus + m.minus).norm_sqr(),
            Datum::U1 => sys.frequency(side, m.n).powi(2) * (m.plus - m.minus).norm_sqr(),
        };
        weight * coeff
    }))
}

/// Sobolev exponents of the two data in the observability estimate.
pub fn observed_norms(kind: SystemKind, epsilon: f64) -> (SobolevSpec, SobolevSpec) {
    let s0 = match kind {
        SystemKind::String => -epsilon,
        SystemKind::Beam => 1.0 - epsilon,
    };
    (SobolevSpec { s: s0 }, SobolevSpec { s: -1.0 - epsilon })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    /// Fail instead of noting a violated horizon.
    pub strict_horizon: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            epsilon: 0.1,
            trials: 100,
            seed: 0,
            strict_horizon: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservabilityReport {
    pub kind: SystemKind,
    pub a: f64,
    pub gamma: f64,
    pub exponent_count: usize,
    pub horizon: f64,
    pub required_horizon: f64,
    pub horizon_ok: bool,
    /// 1/λ_min of (trace energy, data norm); bounds every ratio.
    pub c_pencil: f64,
    pub pencil_min_eig: f64,
    pub pencil_max_eig: f64,
    pub singular: bool,
    pub trials: usize,
    pub seed: u64,
    /// Largest observed ratio (data norm)/(trace energy), the empirical C.
    pub c_empirical: Option<f64>,
    pub ratio_median: Option<f64>,
    pub frame: FrameBoundReport,
    pub notes: Vec<String>,
}

/// Estimates C in ‖u0‖² + ‖u1‖² ≤ C·δΣ_j|jump(t′ + jδ)|² over the system's modes.
pub fn verify_observability(sys: &CoupledSystem, grid: &SamplingGrid, opts: &VerifyOptions) -> Result<ObservabilityReport> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: opts.epsilon,
            reason: "must be positive",
        });
    }
    sys.check_caps(grid.delta)?;
    let tagged = assemble_exponents(sys)?;
    let gamma = sys.gamma()?;
    let required = sys.required_horizon()?;
    let horizon_ok = grid.horizon() > required;
    let mut notes = Vec::new();
    if !horizon_ok {
        if opts.strict_horizon {
            return Err(Error::HorizonViolated {
                j_delta: grid.horizon(),
                required,
            });
        }
        notes.push(format!(
            "horizon J*delta = {:.6} does not exceed {:.6}",
            grid.horizon(),
            required
        ));
    }

    let (s0, s1) = observed_norms(sys.kind, opts.epsilon);
    let (t, n) = energy_and_norm_matrices(sys, &tagged, grid, s0, s1);
    let eig = hermitian_pencil_eig(&t, &n)?;
    let pencil_min_eig = eig.values[0];
    let pencil_max_eig = *eig.values.last().expect("nonempty");
    let singular = pencil_min_eig <= SINGULAR_RATIO * pencil_max_eig;
    let c_pencil = if singular { f64::INFINITY } else { 1.0 / pencil_min_eig };
    if singular {
        notes.push("trace energy pencil numerically singular".to_string());
    }

    let frame = frame_constants(&tagged.sequence, grid, &classify(&tagged.sequence)?)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let total = sys.left.len() + sys.right.len();
    let mut ratios = Vec::with_capacity(opts.trials);
    for _ in 0..opts.trials {
        let amps: Vec<(Complex64, Complex64)> = (0..total).map(|_| (unit_disc(&mut rng), unit_disc(&mut rng))).collect();
        let trial = sys.with_amplitudes(&amps)?;
        let num = sobolev_norm(&trial, s0, Datum::U0) + sobolev_norm(&trial, s1, Datum::U1);
        let den = sampled_energy(&jump_sum_on(&trial, &tagged)?, grid);
        ratios.push(num / den);
    }
    let (c_empirical, ratio_median) = if ratios.is_empty() {
        (None, None)
    } else {
        let mut sorted = ratios.clone();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        (sorted.last().copied(), Some(median))
    };

    Ok(ObservabilityReport {
        kind: sys.kind,
        a: sys.a,
        gamma,
        exponent_count: tagged.tags.len(),
        horizon: grid.horizon(),
        required_horizon: required,
        horizon_ok,
        c_pencil,
        pencil_min_eig,
        pencil_max_eig,
        singular,
        trials: opts.trials,
        seed: opts.seed,
        c_empirical,
        ratio_median,
        frame,
        notes,
    })
}

/// Matrices of the trace energy and the data norm in the amplitude vector ordered like the
/// exponents.
fn energy_and_norm_matrices(
    sys: &CoupledSystem,
    tagged: &TaggedExponents,
    grid: &SamplingGrid,
    s0: SobolevSpec,
    s1: SobolevSpec,
) -> (Matrix, Matrix) {
    let gram = gram_for(tagged.sequence.omegas(), grid);
    let wts: Vec<f64> = tagged.tags.iter().map(|t| t.weight).collect();
    let t = Matrix::from_fn(wts.len(), |k, m| gram[(k, m)] * wts[k] * wts[m]);
    let mut n = Matrix::zeros(wts.len());
    for ((side, m), (ip, im)) in sys.modes().zip(tagged.positions(sys)) {
        let k = sys.wavenumber(side, m.n);
        let half = sys.length(side) / 2.0;
        let w0 = k.powf(2.0 * s0.s) * half;
        let w1 = k.powf(2.0 * s1.s) * half * sys.frequency(side, m.n).powi(2);
        n[(ip, ip)] = Complex64::new(w0 + w1, 0.0);
        n[(im, im)] = Complex64::new(w0 + w1, 0.0);
        n[(ip, im)] = Complex64::new(w0 - w1, 0.0);
        n[(im, ip)] = Complex64::new(w0 - w1, 0.0);
    }
    (t, n)
}

/// Least-squares fit of trace samples to the tagged exponents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Coefficients of the jump sum, one per exponent.
    pub coeffs: Vec<[f64; 2]>,
    /// Modal amplitudes (coefficient / jump weight), one per tag.
    pub amplitudes: Vec<[f64; 2]>,
    pub tags: Vec<ModeTag>,
    /// ‖A·c − samples‖ / ‖samples‖.
    pub residual: f64,
    pub min_eig: f64,
    pub max_eig: f64,
}

impl Reconstruction {
    /// Recovered amplitudes as a system with the given layout.
    pub fn into_system(&self, layout: &CoupledSystem) -> Result<CoupledSystem> {
        let mut amps = Vec::new();
        for (side, m) in layout.modes() {
            let get = |sign: i8| {
                self.tags
                    .iter()
                    .position(|t| t.side == side && t.n == m.n && t.sign == sign)
                    .map(|i| Complex64::new(self.amplitudes[i][0], self.amplitudes[i][1]))
                    .ok_or(Error::DimensionMismatch {
                        expected: layout.left.len() + layout.right.len(),
                        found: self.tags.len() / 2,
                    })
            };
            amps.push((get(1)?, get(-1)?));
        }
        layout.with_amplitudes(&amps)
    }
}

/// Solves sample_j = Σ_k c_k e^{iω_k t_j} in the least-squares sense.
///
/// Uses the normal equations with the (unscaled) sampled Gram, one step of iterative
/// refinement, and rejects systems whose Gram has min eigenvalue ≤ 1e−10·max.
pub fn reconstruct(trace: &ObservationTrace, tagged: &TaggedExponents) -> Result<Reconstruction> {
    let grid = &trace.grid;
    let freqs = tagged.sequence.omegas();
    let k = freqs.len();
    if trace.samples.len() != grid.sample_count() {
        return Err(Error::DimensionMismatch {
            expected: grid.sample_count(),
            found: trace.samples.len(),
        });
    }
    if tagged.tags.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: tagged.tags.len(),
        });
    }
    let samples = trace.values();
    let unscaled = SamplingGrid::new(1.0, grid.j, 0.0)?;
    // Gram with t_j = t′ + jδ: entries Σ_j e^{i(ω_n − ω_k)t_j}.
    let scaled: Vec<f64> = freqs.iter().map(|w| w * grid.delta).collect();
    let mut g = gram_for(&scaled, &unscaled);
    for r in 0..k {
        for c in 0..k {
            g[(r, c)] *= Complex64::from_polar(1.0, (freqs[c] - freqs[r]) * grid.t_shift);
        }
    }
    let eig = hermitian_eig(&g).values;
    let (min_eig, max_eig) = (eig[0], eig[k - 1]);
    if k > grid.sample_count() || min_eig <= SINGULAR_RATIO * max_eig {
        return Err(Error::RankDeficient {
            samples: grid.sample_count(),
            exponents: k,
            min_eig,
        });
    }
    let design = |t: f64| -> Vec<Complex64> { freqs.iter().map(|w| Complex64::from_polar(1.0, w * t)).collect() };
    let rows: Vec<Vec<Complex64>> = grid.times().map(design).collect();
    let adjoint_apply = |r: &[Complex64]| -> Vec<Complex64> {
        (0..k)
            .map(|c| rows.iter().zip(r).map(|(row, v)| row[c].conj() * v).sum())
            .collect()
    };
    let apply = |c: &[Complex64]| -> Vec<Complex64> {
        rows.iter()
            .map(|row| row.iter().zip(c).map(|(a, x)| a * x).sum())
            .collect()
    };
    let chol = Cholesky::factor(&g)?;
    let b = adjoint_apply(&samples);
    let mut c = chol.solve(&b);
    let gc = g.mul_vec(&c);
    let corr = chol.solve(&b.iter().zip(&gc).map(|(x, y)| x - y).collect::<Vec<_>>());
    c.iter_mut().zip(corr).for_each(|(x, d)| *x += d);

    let fit = apply(&c);
    let res_norm = compensated_sum(fit.iter().zip(&samples).map(|(f, s)| (f - s).norm_sqr())).sqrt();
    let data_norm = compensated_sum(samples.iter().map(|s| s.norm_sqr())).sqrt();
    let residual = if data_norm > 0.0 { res_norm / data_norm } else { res_norm };
    let amplitudes = c
        .iter()
        .zip(&tagged.tags)
        .map(|(x, t)| {
            let a = x / t.weight;
            [a.re, a.im]
        })
        .collect();
    Ok(Reconstruction {
        coeffs: c.iter().map(|x| [x.re, x.im]).collect(),
        amplitudes,
        tags: tagged.tags.clone(),
        residual,
        min_eig,
        max_eig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Mode {
        Mode {
            n,
            plus: Complex64::new(1.0, 0.0),
            minus: Complex64::new(1.0, 0.0),
        }
    }

    fn a_irr() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn string_exponents_are_distinct() {
        let modes: Vec<Mode> = (1..=3).map(unit).collect();
        let sys = CoupledSystem::new(SystemKind::String, a_irr(), modes.clone(), modes).unwrap();
        let t = assemble_exponents(&sys).unwrap();
        assert_eq!(t.sequence.len(), 12);
        assert!(t.sequence.omegas().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rational_junction_is_resonant() {
        let sys = CoupledSystem::new(SystemKind::String, 0.5, vec![unit(1)], vec![unit(1)]).unwrap();
        assert!(matches!(assemble_exponents(&sys), Err(Error::JunctionResonant { .. })));
    }

    #[test]
    fn beam_exponents_are_squares() {
        let modes: Vec<Mode> = (1..=2).map(unit).collect();
        let sys = CoupledSystem::new(SystemKind::Beam, a_irr(), modes.clone(), modes)
            .unwrap()
            .with_gamma(1.0);
        let t = assemble_exponents(&sys).unwrap();
        assert_eq!(t.sequence.len(), 8);
        let w = (PI / a_irr()).powi(2);
        assert!(t.sequence.omegas().iter().any(|&x| (x - w).abs() < 1e-12));
        let sys = CoupledSystem { gamma: None, ..sys };
        assert!(assemble_exponents(&sys).is_err());
    }

    #[test]
    fn single_left_mode_jump() {
        let m = Mode {
            n: 1,
            plus: Complex64::new(1.0, 0.0),
            minus: Complex64::new(0.0, 0.0),
        };
        let sys = CoupledSystem::new(SystemKind::String, 0.5, vec![m], vec![]).unwrap();
        let s = trace_jump_sum(&sys).unwrap();
        assert_eq!(s.omegas(), &[-2.0 * PI, 2.0 * PI]);
        assert!((s.coeffs()[1].re + 2.0 * PI).abs() < 1e-14);
        assert_eq!(s.coeffs()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn right_mode_weight() {
        let sys = CoupledSystem::new(SystemKind::String, 0.3, vec![], vec![unit(2)]).unwrap();
        let s = trace_jump_sum(&sys).unwrap();
        let expected = -2.0 * PI / 0.7;
        assert!(s.coeffs().iter().all(|c| (c.re - expected).abs() < 1e-13));
    }

    #[test]
    fn sobolev_examples() {
        let m = Mode {
            n: 1,
            plus: Complex64::new(0.5, 0.0),
            minus: Complex64::new(0.5, 0.0),
        };
        let sys = CoupledSystem::new(SystemKind::String, 0.4, vec![m], vec![]).unwrap();
        let s0 = sobolev_norm(&sys, SobolevSpec { s: 0.0 }, Datum::U0);
        assert!((s0 - 0.2).abs() < 1e-15);
        let w = PI / 0.4;
        let s1 = sobolev_norm(&sys, SobolevSpec { s: -1.0 }, Datum::U0);
        assert!((s1 - 0.2 / (w * w)).abs() < 1e-15);
        assert_eq!(sobolev_norm(&sys, SobolevSpec { s: 0.0 }, Datum::U1), 0.0);
    }

    #[test]
    fn caps_follow_the_band() {
        let sys = CoupledSystem::new(SystemKind::String, a_irr(), vec![unit(7)], vec![unit(1)]).unwrap();
        let err = sys.check_caps(0.1).unwrap_err();
        assert!(matches!(err, Error::ModeCapExceeded { ref modes } if modes.len() == 1));
        assert!(sys.check_caps(0.09).is_ok());
    }

    #[test]
    fn observe_and_reconstruct_roundtrip() {
        let modes: Vec<Mode> = (1..=3)
            .map(|n| Mode {
                n,
                plus: Complex64::new(0.3 * n as f64, -0.2),
                minus: Complex64::new(-0.1, 0.4 / n as f64),
            })
            .collect();
        let sys = CoupledSystem::new(SystemKind::String, a_irr(), modes.clone(), modes).unwrap();
        let grid = SamplingGrid::new(0.09, 20, 0.3).unwrap();
        let trace = observe(&sys, &grid).unwrap();
        let sum = trace_jump_sum(&sys).unwrap();
        assert!((trace.energy() - sampled_energy(&sum, &grid)).abs() <= 1e-14 * trace.energy());
        let tagged = assemble_exponents(&sys).unwrap();
        let rec = reconstruct(&trace, &tagged).unwrap();
        assert!(rec.residual < 1e-8);
        let back = rec.into_system(&sys).unwrap();
        for ((_, x), (_, y)) in sys.modes().zip(back.modes()) {
            assert!((x.plus - y.plus).norm() < 1e-9 && (x.minus - y.minus).norm() < 1e-9);
        }
    }

    #[test]
    fn too_few_samples_is_rank_deficient() {
        let modes: Vec<Mode> = (1..=3).map(unit).collect();
        let sys = CoupledSystem::new(SystemKind::String, a_irr(), modes.clone(), modes).unwrap();
        let grid = SamplingGrid::centered(0.09, 4).unwrap();
        let trace = observe(&sys, &grid).unwrap();
        let tagged = assemble_exponents(&sys).unwrap();
        assert!(matches!(reconstruct(&trace, &tagged), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn verification_is_finite() {
        let modes: Vec<Mode> = (1..=3).map(unit).collect();
        let sys = CoupledSystem::new(SystemKind::String, a_irr(), modes.clone(), modes).unwrap();
        let grid = SamplingGrid::centered(0.09, 20).unwrap();
        let r = verify_observability(&sys, &grid, &VerifyOptions { trials: 50, ..Default::default() }).unwrap();
        assert!(r.horizon_ok && !r.singular);
        assert!(r.c_empirical.unwrap() <= r.c_pencil * (1.0 + 1e-9));
        let short = SamplingGrid::centered(0.09, 10).unwrap();
        assert!(matches!(
            verify_observability(&sys, &short, &VerifyOptions::default()),
            Err(Error::HorizonViolated { .. })
        ));
    }
}
