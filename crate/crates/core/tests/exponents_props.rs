use ingham::exponents::{band_mask, classify, validate_weak_gap, ExponentSequence, IndexRole};
use ingham::random::weak_gap_sequence;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sequence(seed: u64, n: usize, gamma: f64, ratio: f64) -> ExponentSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    weak_gap_sequence(&mut rng, n, gamma, gamma * ratio, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_index_gets_exactly_one_role(seed in any::<u64>(), n in 1usize..25, gamma in 0.2f64..3.0, ratio in 0.1f64..1.0) {
        let seq = sequence(seed, n, gamma, ratio);
        prop_assert!(validate_weak_gap(&seq).unwrap().is_ok());
        let cls = classify(&seq).unwrap();
        let mut seen = vec![0usize; n];
        for &k in &cls.a1 { seen[k] += 1; }
        for (&lead, &partner) in &cls.partners {
            prop_assert_eq!(partner, lead + 1);
            seen[lead] += 1;
            seen[partner] += 1;
        }
        prop_assert!(seen.iter().all(|&c| c == 1), "{:?}", seen);
        for k in 0..n {
            prop_assert!(cls.role(k).is_some());
        }
        for &k in &cls.a2_leads {
            prop_assert_eq!(cls.role(k), Some(IndexRole::Lead));
        }
    }

    #[test]
    fn classification_is_translation_invariant(seed in any::<u64>(), n in 1usize..20, s in -50.0f64..50.0) {
        let seq = sequence(seed, n, 1.0, 0.6);
        // Shift by a dyadic amount so gaps are preserved exactly.
        let shift = (s * 8.0).round() / 8.0;
        let a = classify(&seq).unwrap();
        let b = classify(&seq.translated(shift)).unwrap();
        prop_assert_eq!(a.a1, b.a1);
        prop_assert_eq!(a.partners, b.partners);
    }

    #[test]
    fn band_mask_is_symmetric(n in 1usize..10, spacing in 1.0f64..3.0, delta in 0.05f64..0.8) {
        let half: Vec<f64> = (1..=n).map(|k| k as f64 * spacing).collect();
        let mut omegas: Vec<f64> = half.iter().rev().map(|w| -w).collect();
        omegas.extend(&half);
        let seq = ExponentSequence::with_gap(omegas, 0.5).unwrap();
        if let Ok(mask) = band_mask(&seq, delta) {
            let m = mask.admissible;
            let len = m.len();
            for k in 0..len {
                prop_assert_eq!(m[k], m[len - 1 - k]);
            }
        }
    }
}
