//! Config schemas, report schemas and the library call behind each command.

use std::f64::consts::PI;

use ingham::bounds::{
    continuum_limit_scan, extended_frame_constants, frame_constants, haraux_energy_sides, ContinuumRow,
    ExtendedFrameReport, FrameBoundReport, HarauxEnergySides,
};
use ingham::exponents::{band_mask, classify, BandMask, ExponentSequence, GapClassification};
use ingham::kernels::{certify_constants, KernelDescriptor};
use ingham::observability::{
    assemble_exponents, observe, reconstruct, CoupledSystem, Mode, ObservabilityReport, ObservationTrace, Side,
    SystemKind, VerifyOptions,
};
use ingham::random::{unit_disc, unit_disc_vec, weak_gap_sequence};
use ingham::sums::{poisson_sides, AnySum, AugmentedExpSum, ExpSum, SamplingGrid, SumDescriptor};
use num_complex::Complex64;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{CommandOutput, RunContext, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Gaps,
    Kernel,
    Poisson,
    Frame,
    Haraux,
    String,
    Beam,
    Scan,
}

impl Command {
    pub const ALL: &'static [Command] = &[
        Command::Gaps,
        Command::Kernel,
        Command::Poisson,
        Command::Frame,
        Command::Haraux,
        Command::String,
        Command::Beam,
        Command::Scan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Gaps => "gaps",
            Command::Kernel => "kernel",
            Command::Poisson => "poisson",
            Command::Frame => "frame",
            Command::Haraux => "haraux",
            Command::String => "string",
            Command::Beam => "beam",
            Command::Scan => "scan",
        }
    }
}

impl clap::ValueEnum for Command {
    fn value_variants<'a>() -> &'a [Self] {
        Command::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

/// Anything a scan row can run. `continuum` exists only as a scan target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Gaps,
    Kernel,
    Poisson,
    Frame,
    Haraux,
    String,
    Beam,
    Continuum,
}

pub fn dispatch(cmd: Command, config: Value, ctx: &mut RunContext) -> Result<CommandOutput, CliError> {
    let target = match cmd {
        Command::Gaps => Target::Gaps,
        Command::Kernel => Target::Kernel,
        Command::Poisson => Target::Poisson,
        Command::Frame => Target::Frame,
        Command::Haraux => Target::Haraux,
        Command::String => Target::String,
        Command::Beam => Target::Beam,
        Command::Scan => return crate::scan::run(config, ctx),
    };
    run_target(target, config, ctx)
}

pub fn run_target(target: Target, config: Value, ctx: &mut RunContext) -> Result<CommandOutput, CliError> {
    match target {
        Target::Gaps => gaps(parse(config)?),
        Target::Kernel => kernel(parse(config)?),
        Target::Poisson => poisson(parse(config)?, ctx),
        Target::Frame => frame(parse(config)?),
        Target::Haraux => haraux(parse(config)?, ctx),
        Target::String => observability(SystemKind::String, parse(config)?, ctx),
        Target::Beam => observability(SystemKind::Beam, parse(config)?, ctx),
        Target::Continuum => continuum(parse(config)?),
    }
}

fn parse<T: DeserializeOwned>(config: Value) -> Result<T, CliError> {
    Ok(serde_json::from_value(config)?)
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

// ---------------------------------------------------------------- gaps

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapsConfig {
    pub sequence: ExponentSequence,
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapsReport {
    pub len: usize,
    pub gamma: f64,
    pub gamma0: f64,
    pub a2_count: usize,
    pub classification: GapClassification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<BandMask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_count: Option<usize>,
}

fn gaps(cfg: GapsConfig) -> Result<CommandOutput, CliError> {
    let seq = cfg.sequence;
    let classification = classify(&seq)?;
    let band = cfg.delta.map(|d| band_mask(&seq, d)).transpose()?;
    let report = GapsReport {
        len: seq.len(),
        gamma: seq.gamma(),
        gamma0: seq.gamma0(),
        a2_count: classification.a2_leads.len(),
        active_count: band.as_ref().map(BandMask::active_count),
        classification,
        band,
    };
    CommandOutput::new(&report)
}

// ---------------------------------------------------------------- kernel

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kernel: KernelDescriptor,
    /// Sample count of the plot table; 0 for none.
    #[serde(default)]
    pub points: usize,
    /// Range of the transform samples; defaults to 4π/γ.
    #[serde(default)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub x: f64,
    pub window: f64,
    pub t: f64,
    pub transform: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    /// The input descriptor with the certified α and β filled in.
    pub kernel: KernelDescriptor,
    pub half_width: f64,
    pub window_at_zero: f64,
    pub transform_at_zero: f64,
    pub margin: f64,
    #[serde(default)]
    pub samples: Vec<KernelSample>,
}

fn kernel(cfg: KernelConfig) -> Result<CommandOutput, CliError> {
    if cfg.points == 1 {
        return Err(CliError::Usage("points must be 0 or at least 2".into()));
    }
    let shape = cfg.kernel.shape()?;
    let certified = certify_constants(&shape)?;
    let gamma = shape.gamma();
    let t_max = cfg.t_max.unwrap_or(4.0 * PI / gamma);
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(CliError::Usage(format!("t_max must be positive and finite, got {t_max}")));
    }
    let n = cfg.points;
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let samples: Vec<KernelSample> = (0..n)
        .map(|i| {
            let x = at(-gamma, gamma, i);
            let t = at(-t_max, t_max, i);
            KernelSample {
                x,
                window: shape.window(x),
                t,
                transform: shape.transform(t),
            }
        })
        .collect();
    let mut descriptor = KernelDescriptor::from(&shape);
    descriptor.alpha = Some(certified.alpha);
    descriptor.beta = Some(certified.beta);
    let report = KernelReport {
        kernel: descriptor,
        half_width: shape.half_width(),
        window_at_zero: shape.window(0.0),
        transform_at_zero: shape.transform(0.0),
        margin: certified.margin,
        samples,
    };
    let out = CommandOutput::new(&report)?;
    if n == 0 {
        return Ok(out);
    }
    let mut table = Table::new(&["x", "window", "t", "transform"]);
    for s in &report.samples {
        table.push(vec![json!(s.x), json!(s.window), json!(s.t), json!(s.transform)]);
    }
    Ok(out.with_table(table))
}

// ---------------------------------------------------------------- poisson

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSum {
    pub terms: usize,
    /// Defaults to γ.
    #[serde(default)]
    pub gamma0: Option<f64>,
    #[serde(default = "default_pair_prob")]
    pub pair_prob: f64,
}

fn default_pair_prob() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonConfig {
    pub kernel: KernelDescriptor,
    /// Required with `sum`; with `random` defaults to the largest admissible step.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub sum: Option<SumDescriptor>,
    #[serde(default)]
    pub random: Option<RandomSum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub kernel: KernelDescriptor,
    pub delta: f64,
    pub sum: SumDescriptor,
    pub lhs: f64,
    pub rhs: f64,
    pub tail_bound: f64,
    pub j_tail: usize,
    pub discrepancy: f64,
    /// tol + tol·(1 + |rhs|), with the tail truncated at tol.
    pub allowed: f64,
    pub consistent: bool,
}

fn poisson(cfg: PoissonConfig, ctx: &mut RunContext) -> Result<CommandOutput, CliError> {
    let shape = cfg.kernel.shape()?;
    let gamma = shape.gamma();
    let (sum, delta) = match (cfg.sum, cfg.random) {
        (Some(desc), None) => {
            let delta = cfg
                .delta
                .ok_or_else(|| CliError::Usage("delta is required with an explicit sum".into()))?;
            match desc.build()? {
                AnySum::Plain(s) => (s, delta),
                AnySum::Augmented(_) => {
                    return Err(CliError::Usage("poisson takes a plain sum; drop omega_prime".into()))
                }
            }
        }
        (None, Some(r)) => {
            let seq = weak_gap_sequence(&mut ctx.rng, r.terms, gamma, r.gamma0.unwrap_or(gamma), r.pair_prob)?;
            let reach = seq.omegas().iter().fold(0.0f64, |m, w| m.max(w.abs()));
            let delta = cfg
                .delta
                .unwrap_or_else(|| (PI / (reach + 0.5 * gamma) * (1.0 - 1e-12)).min(PI / gamma));
            let coeffs = unit_disc_vec(&mut ctx.rng, seq.len());
            (ExpSum::over(&seq, coeffs)?, delta)
        }
        _ => return Err(CliError::Usage("give exactly one of `sum` and `random`".into())),
    };
    let sides = poisson_sides(&sum, &shape, delta, ctx.tol)?;
    let allowed = ctx.tol + ctx.tol * (1.0 + sides.rhs.abs());
    let report = PoissonReport {
        kernel: KernelDescriptor::from(&shape),
        delta,
        sum: SumDescriptor::from(&sum),
        lhs: sides.lhs,
        rhs: sides.rhs,
        tail_bound: sides.tail_bound,
        j_tail: sides.j_tail,
        discrepancy: sides.discrepancy(),
        allowed,
        consistent: sides.discrepancy() <= allowed,
    };
    CommandOutput::new(&report)
}

// ---------------------------------------------------------------- frame

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub sequence: ExponentSequence,
    pub delta: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(default)]
    pub t_shift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    pub grid: SamplingGrid,
    pub sample_count: usize,
    pub horizon: f64,
    pub classification: GapClassification,
    pub frame: FrameBoundReport,
}

fn frame(cfg: FrameConfig) -> Result<CommandOutput, CliError> {
    let grid = SamplingGrid::new(cfg.delta, cfg.j, cfg.t_shift)?;
    let classification = classify(&cfg.sequence)?;
    let frame = frame_constants(&cfg.sequence, &grid, &classification)?;
    if frame.singular {
        return Err(ingham::Error::SingularPencil {
            min_eig: frame.min_eig,
            max_eig: frame.max_eig,
        }
        .into());
    }
    CommandOutput::new(&FrameReport {
        grid,
        sample_count: grid.sample_count(),
        horizon: grid.horizon(),
        classification,
        frame,
    })
}

// ---------------------------------------------------------------- haraux

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarauxConfig {
    pub sequence: ExponentSequence,
    pub omega_prime: f64,
    pub delta: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "J_prime")]
    pub j_prime: usize,
    #[serde(default)]
    pub t_shift: f64,
    /// Coefficients of the test sum; drawn from the run generator when absent.
    #[serde(default)]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub x_prime: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarauxReport {
    pub grid: SamplingGrid,
    pub extended: ExtendedFrameReport,
    pub sum: SumDescriptor,
    pub energy: HarauxEnergySides,
    pub energy_holds: bool,
}

fn haraux(cfg: HarauxConfig, ctx: &mut RunContext) -> Result<CommandOutput, CliError> {
    let seq = cfg.sequence;
    let grid = SamplingGrid::new(cfg.delta, cfg.j, cfg.t_shift)?;
    let classification = classify(&seq)?;
    let mask = band_mask(&seq, cfg.delta)?;
    let extended = extended_frame_constants(&seq, &mask, cfg.omega_prime, &grid, cfg.j_prime, &classification)?;
    let coeffs = match cfg.coeffs {
        Some(c) => c.into_iter().map(complex).collect(),
        None => unit_disc_vec(&mut ctx.rng, seq.len()),
    };
    let x_prime = cfg.x_prime.map(complex).unwrap_or_else(|| unit_disc(&mut ctx.rng));
    let aug = AugmentedExpSum::new(ExpSum::over(&seq, coeffs)?, cfg.omega_prime, x_prime)?;
    let energy = haraux_energy_sides(&aug, &extended.plan, &grid)?;
    CommandOutput::new(&HarauxReport {
        grid,
        sum: SumDescriptor::from(&aug),
        energy_holds: energy.holds(),
        energy,
        extended,
    })
}

// ---------------------------------------------------------------- string / beam

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub a: f64,
    /// Modes of the left interval; every mode up to the cap, with random amplitudes, when absent.
    #[serde(default)]
    pub left: Option<Vec<Mode>>,
    #[serde(default)]
    pub right: Option<Vec<Mode>>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub gamma0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservabilityConfig {
    pub system: SystemConfig,
    pub delta: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(default)]
    pub t_shift: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_true")]
    pub strict_horizon: bool,
    /// Include the sampled jump trace (and emit it as the CSV table).
    #[serde(default)]
    pub trace: bool,
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_trials() -> usize {
    100
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub residual: f64,
    pub max_amplitude_error: f64,
    pub min_eig: f64,
    pub max_eig: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservabilityCliReport {
    pub system: CoupledSystem,
    pub grid: SamplingGrid,
    pub observability: ObservabilityReport,
    pub trace_energy: f64,
    /// Amplitudes recovered from the noiseless trace.
    #[serde(default)]
    pub recovery: Option<Recovery>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery_error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<ObservationTrace>,
}

fn build_system(kind: SystemKind, cfg: SystemConfig, delta: f64, ctx: &mut RunContext) -> Result<CoupledSystem, CliError> {
    let mut proto = CoupledSystem::new(kind, cfg.a, vec![], vec![])?;
    proto.gamma = cfg.gamma;
    proto.gamma0 = cfg.gamma0;
    let mut fill = |side: Side, given: Option<Vec<Mode>>| -> Result<Vec<Mode>, CliError> {
        if let Some(modes) = given {
            return Ok(modes);
        }
        let cap = proto.mode_cap(side, delta)?.floor().max(0.0) as usize;
        Ok((1..=cap)
            .map(|n| Mode {
                n,
                plus: unit_disc(&mut ctx.rng),
                minus: unit_disc(&mut ctx.rng),
            })
            .collect())
    };
    let left = fill(Side::Left, cfg.left)?;
    let right = fill(Side::Right, cfg.right)?;
    let mut sys = CoupledSystem::new(kind, cfg.a, left, right)?;
    sys.gamma = cfg.gamma;
    sys.gamma0 = cfg.gamma0;
    Ok(sys)
}

fn observability(kind: SystemKind, cfg: ObservabilityConfig, ctx: &mut RunContext) -> Result<CommandOutput, CliError> {
    let grid = SamplingGrid::new(cfg.delta, cfg.j, cfg.t_shift)?;
    let sys = build_system(kind, cfg.system, cfg.delta, ctx)?;
    let opts = VerifyOptions {
        epsilon: cfg.epsilon,
        trials: cfg.trials,
        seed: ctx.rng.gen(),
        strict_horizon: cfg.strict_horizon,
    };
    let report = ingham::observability::verify_observability(&sys, &grid, &opts)?;
    let trace = observe(&sys, &grid)?;
    let (recovery, recovery_error) = match recover(&sys, &trace) {
        Ok(r) => (Some(r), None),
        Err(e) if e.is_validation() => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut table = None;
    if cfg.trace {
        let mut t = Table::new(&["j", "t", "re", "im"]);
        for (j, time, re, im) in trace.rows() {
            t.push(vec![json!(j), json!(time), json!(re), json!(im)]);
        }
        table = Some(t);
    }
    let out = CommandOutput::new(&ObservabilityCliReport {
        trace_energy: trace.energy(),
        system: sys,
        grid,
        observability: report,
        recovery,
        recovery_error,
        trace: cfg.trace.then_some(trace),
    })?;
    Ok(match table {
        Some(t) => out.with_table(t),
        None => out,
    })
}

fn recover(sys: &CoupledSystem, trace: &ObservationTrace) -> ingham::Result<Recovery> {
    let tagged = assemble_exponents(sys)?;
    let rec = reconstruct(trace, &tagged)?;
    let back = rec.into_system(sys)?;
    let max_amplitude_error = sys
        .modes()
        .zip(back.modes())
        .map(|((_, x), (_, y))| (x.plus - y.plus).norm().max((x.minus - y.minus).norm()))
        .fold(0.0, f64::max);
    Ok(Recovery {
        residual: rec.residual,
        max_amplitude_error,
        min_eig: rec.min_eig,
        max_eig: rec.max_eig,
    })
}

// ---------------------------------------------------------------- continuum (scan only)

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumConfig {
    pub sequence: ExponentSequence,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "J")]
    pub j: usize,
}

fn continuum(cfg: ContinuumConfig) -> Result<CommandOutput, CliError> {
    let classification = classify(&cfg.sequence)?;
    let scan = continuum_limit_scan(&cfg.sequence, &classification, cfg.r, &[cfg.j])?;
    let row: &ContinuumRow = &scan.rows[0];
    CommandOutput::new(row)
}
