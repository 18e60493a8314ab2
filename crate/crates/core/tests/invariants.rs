use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;

use mixlab::cfrac::{
    cf_digits, cf_value, convergent_matrix, extended_shift, CosetPoint, Digits, Endpoint, ExtendedPoint, QuadraticSurd,
};
use mixlab::markov::{bowen_franks, build_an, words, KmsModel};
use mixlab::mixmaster::{delta_from_v, era_transition, evolve_universe, kasner_exponents, GeodesicData};
use mixlab::transfer::{build_operator, leading_eigen, sample_en, DigitBound, GibbsChain, OperatorSpec};

fn sheet() -> impl Strategy<Value = CosetPoint> {
    (0usize..3).prop_map(CosetPoint::from_index)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncations_approximate_within_inverse_square(x in 1e-9f64..1.0, n in 1usize..40) {
        let e = cf_digits(x, n).unwrap();
        prop_assert!(e.digits.as_slice().iter().all(|&k| k >= 1));
        let v = cf_value(&e.digits).unwrap();
        let q = v.denom().to_f64().unwrap();
        let err = (x - v.to_f64().unwrap()).abs();
        prop_assert!(err <= 1.0 / (q * q) + 4.0 * f64::EPSILON, "x {x}, q {q}, err {err}");
    }

    #[test]
    fn convergent_matrices_are_unimodular(digits in prop::collection::vec(1u64..1000, 1..30)) {
        let g = convergent_matrix(&Digits::new(digits.clone()).unwrap()).unwrap();
        prop_assert_eq!(g.det().abs(), BigInt::one());
        if digits.len() > 1 {
            let h = convergent_matrix(&Digits::new(digits[..digits.len() - 1].to_vec()).unwrap()).unwrap();
            let k = BigInt::from(*digits.last().unwrap());
            prop_assert_eq!(&g.p, &(&k * &h.p + &h.p_prev));
            prop_assert_eq!(&g.q, &(&k * &h.q + &h.q_prev));
        }
    }

    #[test]
    fn extended_shift_stays_in_unit_interval(x in 1e-12f64..=1.0, s in sheet()) {
        let p = extended_shift(ExtendedPoint::new(x, s).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&p.x));
    }

    #[test]
    fn kasner_constraints_and_order(u in 1.0f64..1e8) {
        let k = kasner_exponents(u).unwrap();
        prop_assert!((k.sum() - 1.0).abs() <= 1e-12);
        prop_assert!((k.sum_squares() - 1.0).abs() <= 1e-12);
        prop_assert!(k.p[0] <= k.p[1] && k.p[1] <= k.p[2]);
        if u > 1.0 + 1e-9 && u < 1e6 {
            prop_assert!(k.p[0] < k.p[1] && k.p[1] < k.p[2]);
        }
    }

    #[test]
    fn bounce_inverts_the_remainder(x in 1e-6f64..0.999_999) {
        prop_assert!((era_transition(x).unwrap() * x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn delta_round_trip(delta in 1e-6f64..0.999, u in 1.0f64..1e4) {
        let v = delta * (1.0 + u) / (1.0 - delta);
        let d = delta_from_v(v, u);
        prop_assert!(d > 0.0 && d < 1.0);
        prop_assert!((d - delta).abs() <= 1e-12);
    }

    #[test]
    fn eras_follow_digits_and_cycles_count_down(period in prop::collection::vec(1u64..12, 1..5), s in sheet()) {
        let x = QuadraticSurd::from_period(&period).unwrap();
        let g = GeodesicData::new(Endpoint::Surd(x), -1.7, s).unwrap();
        let t = evolve_universe(&g, 12).unwrap();
        for e in &t.eras {
            prop_assert!(e.k >= 1);
            prop_assert_eq!(e.cycles.len() as u64, e.k);
            let last = e.cycles.last().unwrap().u;
            prop_assert!(last - 1.0 > 0.0 && last - 1.0 < 1.0);
            for pair in e.cycles.windows(2) {
                prop_assert!((pair[0].u - pair[1].u - 1.0).abs() < 1e-12);
                // the two contracting axes swap, the dominant one stays
                prop_assert_eq!(pair[0].axes.0[0], pair[1].axes.0[1]);
                prop_assert_eq!(pair[0].axes.0[2], pair[1].axes.0[2]);
            }
        }
    }

    #[test]
    fn markov_blocks_and_sums(n in 1u64..40) {
        let a = build_an(n).unwrap();
        prop_assert!(a.check_block_structure());
        prop_assert!(a.matrix.row_sums().iter().all(|&r| r as u64 == n));
        prop_assert!(a.matrix.col_sums().iter().all(|&c| c as u64 == n));
    }

    #[test]
    fn elementary_divisors_chain(n in 1u64..16) {
        let bf = bowen_franks(&build_an(n).unwrap().matrix);
        for w in bf.divisors.windows(2) {
            prop_assert!(w[1].is_zero_or_divisible_by(&w[0]));
        }
        if bf.free_rank == 0 {
            let product: BigInt = bf.divisors.iter().product();
            prop_assert_eq!(product.abs(), bf.det.abs());
        }
    }
}

trait DivisibleBy {
    fn is_zero_or_divisible_by(&self, d: &BigInt) -> bool;
}

impl DivisibleBy for BigInt {
    fn is_zero_or_divisible_by(&self, d: &BigInt) -> bool {
        use num_traits::Zero;
        self.is_zero() || (!d.is_zero() && (self % d).is_zero())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ulam_operators_are_nonnegative_with_perron_vectors(beta in 0.6f64..3.0, n in 2u64..6, depth in 2usize..6) {
        let op = build_operator(&OperatorSpec::ulam(beta, n, depth)).unwrap();
        prop_assert!(op.is_nonnegative());
        let r = leading_eigen(&op, 1e-12).unwrap();
        prop_assert!(r.eta > 0.0);
        prop_assert!(r.residual <= 1e-10);
        prop_assert!(r.min_right() >= 0.0 && r.min_left() >= 0.0);
    }

    #[test]
    fn kms_potential_is_the_log_eigenvalue(beta in 0.5f64..1.25) {
        let model = KmsModel::new(beta, 2, 8).unwrap();
        let op = build_operator(&OperatorSpec::ulam(beta, 2, 8).with_cosets()).unwrap();
        let eta = leading_eigen(&op, 1e-13).unwrap().eta;
        prop_assert!((model.spec.u - eta.ln()).abs() <= 1e-9);
        for w in words(2, 3) {
            prop_assert!(w.is_admissible(2));
        }
    }

    #[test]
    fn seeded_sampling_repeats(seed in any::<u64>()) {
        let chain = GibbsChain::at_dimension(2, 6, 0.5312805).unwrap();
        prop_assert_eq!(sample_en(Some(&chain), 200, seed).unwrap(), sample_en(Some(&chain), 200, seed).unwrap());
        prop_assert!(sample_en(Some(&chain), 200, seed).unwrap().max_digit() <= 2);
    }
}

#[test]
fn unbounded_digits_need_beta_above_one() {
    assert!(build_operator(&OperatorSpec::collocation(1.0, DigitBound::Infinite, 16)).is_err());
    assert!(build_operator(&OperatorSpec::collocation(1.01, DigitBound::Infinite, 16)).is_ok());
}
