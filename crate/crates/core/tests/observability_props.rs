use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ingham::bounds::frame_constants;
use ingham::exponents::{classify, validate_weak_gap};
use ingham::observability::{
    assemble_exponents, observe, reconstruct, string_gamma, trace_jump_sum, CoupledSystem, Mode, Side, SystemKind,
};
use ingham::random::unit_disc;
use ingham::sums::{sampled_energy, SamplingGrid, Signal};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn modes_to_cap(kind: SystemKind, a: f64, delta: f64, gamma: Option<f64>, rng: &mut ChaCha8Rng) -> CoupledSystem {
    let mut proto = CoupledSystem::new(kind, a, vec![], vec![]).unwrap();
    proto.gamma = gamma;
    let mut make = |side| {
        let cap = proto.mode_cap(side, delta).unwrap().floor() as usize;
        (1..=cap)
            .map(|n| Mode {
                n,
                plus: unit_disc(rng),
                minus: unit_disc(rng),
            })
            .collect::<Vec<_>>()
    };
    let left = make(Side::Left);
    let right = make(Side::Right);
    let mut sys = CoupledSystem::new(kind, a, left, right).unwrap();
    sys.gamma = gamma;
    sys
}

#[test]
fn jump_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for kind in [SystemKind::String, SystemKind::Beam] {
        let gamma = (kind == SystemKind::Beam).then_some(1.0);
        let delta = if kind == SystemKind::String { 0.09 } else { 0.01 };
        let sys = modes_to_cap(kind, FRAC_1_SQRT_2, delta, gamma, &mut rng);
        let sum = trace_jump_sum(&sys).unwrap();
        let h = 1e-7;
        let a = sys.a;
        for _ in 0..20 {
            let t = rng.gen_range(-3.0..3.0);
            // One-sided differences, each side from its own interior.
            let left = (sys.displacement(a - h, t) - sys.displacement(a - 2.0 * h, t)) / h;
            let right = (sys.displacement(a + 2.0 * h, t) - sys.displacement(a + h, t)) / h;
            let fd = left - right;
            let exact = sum.eval(t);
            assert!((fd - exact).norm() <= 1e-4 * exact.norm().max(1.0), "{kind:?} t={t}: {fd} vs {exact}");
        }
    }
}

#[test]
fn string_sequences_pass_the_weak_gap_at_the_caps() {
    for a in [FRAC_1_SQRT_2, 1.0 / 3f64.sqrt(), (5f64.sqrt() - 1.0) / 2.0] {
        for delta in [0.2, 0.1, 0.05, 0.02] {
            let mut rng = ChaCha8Rng::seed_from_u64(41);
            let sys = modes_to_cap(SystemKind::String, a, delta, None, &mut rng);
            let tagged = assemble_exponents(&sys).unwrap();
            assert!(validate_weak_gap(&tagged.sequence).unwrap().is_ok());
            assert!((tagged.sequence.gamma() - string_gamma(a)).abs() < 1e-15);
        }
    }
}

#[test]
fn trace_energy_is_sampled_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let sys = modes_to_cap(SystemKind::String, FRAC_1_SQRT_2, 0.09, None, &mut rng);
        let grid = SamplingGrid::new(0.09, rng.gen_range(16..40), rng.gen_range(-2.0..2.0)).unwrap();
        let trace = observe(&sys, &grid).unwrap();
        let e = sampled_energy(&trace_jump_sum(&sys).unwrap(), &grid);
        assert!((trace.energy() - e).abs() <= 1e-14 * e);
    }
}

#[test]
fn zero_data_gives_zero_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let sys = modes_to_cap(SystemKind::String, FRAC_1_SQRT_2, 0.09, None, &mut rng);
    let zero = sys
        .with_amplitudes(&vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); sys.left.len() + sys.right.len()])
        .unwrap();
    let trace = observe(&zero, &SamplingGrid::centered(0.09, 20).unwrap()).unwrap();
    assert!(trace.samples.iter().all(|s| s[0] == 0.0 && s[1] == 0.0));
}

#[test]
fn shrinking_the_horizon_lowers_min_eig() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let sys = modes_to_cap(SystemKind::String, FRAC_1_SQRT_2, 0.09, None, &mut rng);
    let tagged = assemble_exponents(&sys).unwrap();
    let cls = classify(&tagged.sequence).unwrap();
    let mut prev = f64::INFINITY;
    for j in (10..=24).rev() {
        let r = frame_constants(&tagged.sequence, &SamplingGrid::centered(0.09, j).unwrap(), &cls).unwrap();
        assert!(r.min_eig < prev, "J = {j}");
        prev = r.min_eig;
    }
}

#[test]
fn beam_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..20 {
        let sys = modes_to_cap(SystemKind::Beam, FRAC_1_SQRT_2, 0.005, Some(2.0), &mut rng);
        let j = (PI / 2.0 / 0.005) as usize + 5;
        let grid = SamplingGrid::new(0.005, j, rng.gen_range(-1.0..1.0)).unwrap();
        let trace = observe(&sys, &grid).unwrap();
        let tagged = assemble_exponents(&sys).unwrap();
        let rec = reconstruct(&trace, &tagged).unwrap();
        let back = rec.into_system(&sys).unwrap();
        for ((_, x), (_, y)) in sys.modes().zip(back.modes()) {
            assert!((x.plus - y.plus).norm() <= 1e-8 && (x.minus - y.minus).norm() <= 1e-8);
        }
    }
}

#[test]
fn noise_reconstructs_without_panicking() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let sys = modes_to_cap(SystemKind::String, FRAC_1_SQRT_2, 0.09, None, &mut rng);
    let grid = SamplingGrid::centered(0.09, 30).unwrap();
    let mut trace = observe(&sys, &grid).unwrap();
    for s in &mut trace.samples {
        *s = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    }
    let rec = reconstruct(&trace, &assemble_exponents(&sys).unwrap()).unwrap();
    assert!(rec.residual > 0.0 && rec.residual <= 1.0);
}
