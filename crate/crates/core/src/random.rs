//! Seeded generators for test instances: weak-gap sequences with close pairs and
//! unit-disc coefficients.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::exponents::ExponentSequence;

/// Uniform sample from the closed unit disc.
pub fn unit_disc<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..TAU))
}

pub fn unit_disc_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| unit_disc(rng)).collect()
}

/// `n` increasing frequencies centred on 0 satisfying ω_{k+2} − ω_k ≥ 2γ.
///
/// Each new cluster is a close pair (gap in [0.05γ0, 0.9γ0)) with probability `pair_prob`,
/// otherwise a single point. Gaps next to a pair are drawn from [2γ, 3γ], gaps between
/// singles from [γ, 2γ].
pub fn weak_gap_sequence<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    gamma: f64,
    gamma0: f64,
    pair_prob: f64,
) -> Result<ExponentSequence> {
    let mut omegas = Vec::with_capacity(n);
    let mut last_was_pair = false;
    while omegas.len() < n {
        let pair = omegas.len() + 2 <= n && rng.gen_bool(pair_prob.clamp(0.0, 1.0));
        let start = match omegas.last() {
            None => 0.0,
            Some(&prev) => {
                let gap = if pair || last_was_pair {
                    rng.gen_range(2.0 * gamma..=3.0 * gamma)
                } else {
                    rng.gen_range(gamma..=2.0 * gamma)
                };
                prev + gap
            }
        };
        omegas.push(start);
        if pair {
            omegas.push(start + rng.gen_range(0.05 * gamma0..0.9 * gamma0));
        }
        last_was_pair = pair;
    }
    if let (Some(&lo), Some(&hi)) = (omegas.first(), omegas.last()) {
        let mid = 0.5 * (lo + hi);
        omegas.iter_mut().for_each(|w| *w -= mid);
    }
    ExponentSequence::new(omegas, gamma, gamma0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{classify, validate_weak_gap};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sequences_satisfy_the_weak_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..20 {
            let s = weak_gap_sequence(&mut rng, n, 1.0, 0.6, 0.4).unwrap();
            assert_eq!(s.len(), n);
            assert!(validate_weak_gap(&s).unwrap().is_ok());
            classify(&s).unwrap();
            let (lo, hi) = (s.omegas()[0], s.omegas()[n - 1]);
            assert!((lo + hi).abs() < 1e-12);
        }
    }

    #[test]
    fn pairs_appear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = weak_gap_sequence(&mut rng, 30, 1.0, 0.5, 0.5).unwrap();
        assert!(!classify(&s).unwrap().a2_leads.is_empty());
    }

    #[test]
    fn disc_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(unit_disc_vec(&mut rng, 1000).iter().all(|z| z.norm() <= 1.0));
    }
}
