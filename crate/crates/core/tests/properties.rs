//! Randomized invariants across modules.

mod common;

use proptest::prelude::*;
use qdim_core::dimension::{d0_dimension, similarity_dimension, solve_kappa};
use qdim_core::{DiscreteMeasure, Word};

fn word(max_symbol: u16, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=max_symbol, 0..=max_len).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratios_and_weights_multiply_along_words(seed in any::<u64>(), u in word(3, 4), v in word(3, 4)) {
        let wifs = common::random_line_wifs(&mut common::rng(seed), 3, 0.1..0.9);
        let uv = u.concat(&v);
        let ratio = wifs.ratio(&u).unwrap() * wifs.ratio(&v).unwrap();
        let weight = wifs.weight(&u).unwrap() * wifs.weight(&v).unwrap();
        prop_assert!((wifs.ratio(&uv).unwrap() - ratio).abs() <= 1e-15 * ratio.max(1e-300) * 8.0);
        prop_assert!((wifs.weight(&uv).unwrap() - weight).abs() <= 1e-15 * weight * 8.0);
        // the composed map scales distances by the word ratio
        let f = wifs.compose_word(&uv).unwrap();
        let d = (f.apply(&[1.0])[0] - f.apply(&[0.0])[0]).abs();
        prop_assert!((d - wifs.ratio(&uv).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn hutchinson_push_keeps_total_mass(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let wifs = common::random_plane_wifs(&mut r);
        let mu = common::random_measure(&mut r, 2, 6);
        let pushed = wifs.hutchinson_iterate(&mu, 2).unwrap();
        prop_assert!(pushed.is_probability());
        prop_assert!(pushed.len() <= mu.len() * wifs.len() * wifs.len());
    }

    #[test]
    fn dl_is_a_metric(seed in any::<u64>(), dim in 1_usize..=2) {
        let mut r = common::rng(seed);
        let a = common::random_measure(&mut r, dim, 5);
        let b = common::random_measure(&mut r, dim, 5);
        let c = common::random_measure(&mut r, dim, 5);
        let ab = a.dl(&b).unwrap();
        prop_assert!(a.dl(&a).unwrap().abs() < 1e-12);
        prop_assert!((ab - b.dl(&a).unwrap()).abs() < 1e-9);
        prop_assert!(ab <= a.dl(&c).unwrap() + c.dl(&b).unwrap() + 1e-9);
    }

    #[test]
    fn dl_of_a_translate_is_the_shift(seed in any::<u64>(), shift in -3.0_f64..3.0) {
        let mu = common::random_measure(&mut common::rng(seed), 1, 6);
        let moved = mu.translate(&[shift]).unwrap();
        prop_assert!((mu.dl(&moved).unwrap() - shift.abs()).abs() < 1e-9);
    }

    #[test]
    fn tv_is_bounded_and_symmetric(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = common::random_dyadic_measure(&mut r, 6);
        let b = common::random_dyadic_measure(&mut r, 6);
        let tv = a.tv(&b).unwrap();
        prop_assert!((0.0..=1.0).contains(&tv));
        prop_assert_eq!(tv, b.tv(&a).unwrap());
        // moving mass across the lattice costs at most its diameter
        prop_assert!(a.dl(&b).unwrap() <= 4.5 * tv + 1e-12);
    }

    #[test]
    fn convolution_and_mixture_keep_probability(seed in any::<u64>(), alpha in 0.0_f64..=1.0) {
        let mut r = common::rng(seed);
        let a = common::random_measure(&mut r, 1, 5);
        let b = common::random_measure(&mut r, 1, 5);
        prop_assert!(a.convolve(&b).unwrap().is_probability());
        if alpha > 0.0 && alpha < 1.0 {
            prop_assert!(a.mix(&b, alpha).unwrap().is_probability());
        }
    }

    #[test]
    fn kappa_lies_between_d0_and_similarity_dimension(seed in any::<u64>(), r in 0.01_f64..20.0) {
        let mut rng = common::rng(seed);
        let wifs = common::random_ssc_line_wifs(&mut rng);
        let res = solve_kappa(&wifs, r).unwrap();
        prop_assert!(res.theta > 0.0 && res.theta < 1.0);
        prop_assert!(res.residual.abs() < 1e-12);
        prop_assert!(res.kappa_r >= d0_dimension(&wifs) - 1e-9);
        prop_assert!(res.kappa_r <= similarity_dimension(&wifs) + 1e-9);
    }
}

#[test]
fn dyadic_measures_are_exact_probabilities() {
    let mut r = common::rng(5);
    for _ in 0..20 {
        let m: DiscreteMeasure = common::random_dyadic_measure(&mut r, 6);
        assert_eq!(m.total(), 1.0);
    }
}
