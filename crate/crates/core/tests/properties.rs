use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;
use qobdd::bits::index_to_bits;
use qobdd::charpoly::{
    eq_polynomial, mod_polynomial, palindrome_polynomial, perm_polynomial, sop_to_polynomial, truth_table_to_sop,
    LinearPolynomial, Modulus,
};
use qobdd::goodset::{raw_required_size, required_size, sample, GoodSet};
use qobdd::harness::{ClassStats, Observation};
use qobdd::hsf::HsfInstance;

fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << n).map(move |i| index_to_bits(i, n))
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

#[test]
fn mod_zero_set_is_popcount_divisibility() {
    for m in [2u64, 3, 5, 7] {
        let p = mod_polynomial(6, &Modulus::from_u64(m).unwrap()).unwrap();
        for s in all_inputs(6) {
            let ones = s.iter().filter(|&&b| b).count() as u64;
            assert_eq!(p.evaluate(&s).unwrap().is_zero(), ones.is_multiple_of(m));
        }
    }
}

#[test]
fn eq_zero_set_is_equality() {
    let p = eq_polynomial(4).unwrap();
    for s in all_inputs(8) {
        assert_eq!(p.evaluate(&s).unwrap().is_zero(), s[..4] == s[4..]);
    }
}

#[test]
fn palindrome_zero_set_and_middle_bit() {
    let p = palindrome_polynomial(11).unwrap();
    assert!(p.coefficient(6).is_zero());
    for s in all_inputs(11) {
        let pal = (0..11).all(|i| s[i] == s[10 - i]);
        assert_eq!(p.evaluate(&s).unwrap().is_zero(), pal);
        let mut flipped = s.clone();
        flipped[5] = !flipped[5];
        assert_eq!(p.evaluate(&s).unwrap(), p.evaluate(&flipped).unwrap());
    }
}

#[test]
fn perm_zero_set_is_permutation_matrices() {
    let p = perm_polynomial(3).unwrap();
    let zeros: Vec<Vec<bool>> = all_inputs(9).filter(|s| p.evaluate(s).unwrap().is_zero()).collect();
    assert_eq!(zeros.len(), 6);
    for s in zeros {
        for i in 0..3 {
            assert_eq!((0..3).filter(|&j| s[3 * i + j]).count(), 1);
            assert_eq!((0..3).filter(|&j| s[3 * j + i]).count(), 1);
        }
    }
}

#[test]
fn required_size_is_monotone() {
    let moduli: Vec<Modulus> = [2u64, 3, 17, 64, 1000, 1 << 20].iter().map(|&m| Modulus::from_u64(m).unwrap()).collect();
    for pair in moduli.windows(2) {
        for eps in [0.05, 0.1, 0.25, 0.5] {
            assert!(raw_required_size(eps, &pair[0]).unwrap() <= raw_required_size(eps, &pair[1]).unwrap());
        }
    }
    for m in &moduli {
        let sizes: Vec<usize> = [0.5, 0.25, 0.1, 0.05].iter().map(|&e| required_size(e, m).unwrap()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        assert!(sizes.iter().all(|t| t.is_power_of_two()));
    }
}

#[test]
fn sampler_usually_succeeds_at_small_modulus() {
    let m = Modulus::from_u64(64).unwrap();
    let good = (0..20).filter(|&seed| sample(0.25, &m, seed).unwrap().verify_exhaustive(1 << 20).unwrap()).count();
    assert!(good >= 15, "{good} of 20 seeds verified");
}

#[test]
fn hsf_difference_part_vanishes_only_on_coset_constant_values() {
    for (order, step) in [(4usize, 2usize), (6, 3), (6, 2)] {
        let inst = HsfInstance::cyclic(order, step).unwrap();
        let chi = inst.characteristic().unwrap();
        assert!(chi.polynomials().iter().all(|p| p.arity() == inst.arity()));
        for s in all_inputs(inst.arity()) {
            let Ok(values) = inst.raw_values(&s) else { continue };
            let constant_on_cosets = (0..order).all(|a| values[a] == values[a % step]);
            if !constant_on_cosets {
                assert!(!chi.polynomials()[0].evaluate(&s).unwrap().is_zero());
            }
        }
    }
}

fn random_table(n: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 1 << n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sop_polynomial_vanishes_on_ones(table in random_table(4)) {
        let negation: Vec<bool> = table.iter().map(|&v| !v).collect();
        let g = sop_to_polynomial(&truth_table_to_sop(&negation).unwrap());
        for (i, &fi) in table.iter().enumerate() {
            prop_assert_eq!(g.evaluate(&index_to_bits(i as u64, 4)).unwrap().is_zero(), fi);
        }
    }
}

proptest! {
    #[test]
    fn linear_evaluation_matches_naive_sum(
        n in 1usize..=64,
        m_bits in 2u64..=128,
        m_low in any::<u64>(),
        seed_coeffs in prop::collection::vec(any::<i128>(), 65),
        sigma_bits in any::<u64>(),
    ) {
        // moduli up to 4^64
        let m = (BigUint::from(1u8) << (m_bits - 1)) + big(m_low) % (BigUint::from(1u8) << (m_bits - 1));
        let modulus = Modulus::new(m.clone()).unwrap();
        let coeffs: Vec<BigInt> = seed_coeffs[..=n].iter().map(|&c| BigInt::from(c) * BigInt::from(c)).collect();
        let p = LinearPolynomial::new(modulus, &coeffs).unwrap();
        let sigma: Vec<bool> = (0..n).map(|i| (sigma_bits >> i) & 1 == 1).collect();
        let mut naive = coeffs[0].clone();
        for (i, &b) in sigma.iter().enumerate() {
            if b {
                naive += &coeffs[i + 1];
            }
        }
        let m_int = BigInt::from(m.clone());
        let expected = ((naive % &m_int) + &m_int) % &m_int;
        prop_assert_eq!(BigInt::from(p.evaluate(&sigma).unwrap().into_value()), expected);
        prop_assert!(p.coefficients().iter().all(|c| c < &m));
    }

    #[test]
    fn cosine_sum_in_unit_interval_and_periodic(
        m in 2u64..5000,
        params in prop::collection::vec(any::<u64>(), 16),
        b in 1u64..100_000,
    ) {
        let params: Vec<u64> = params.iter().map(|p| p % m).collect();
        let k = GoodSet::from_u64(m, 0.25, &params).unwrap();
        if b % m != 0 {
            let s = k.cosine_sum(&big(b)).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
            let shifted = k.cosine_sum(&big(b + 7 * m)).unwrap();
            prop_assert!((s - shifted).abs() < 1e-9);
        }
    }

    #[test]
    fn class_stats_merge_is_partition_invariant(
        obs in prop::collection::vec((any::<bool>(), any::<bool>(), 0.0f64..=1.0, 0.0f64..1e-9), 0..200),
        cut in any::<prop::sample::Index>(),
    ) {
        let obs: Vec<Observation> = obs
            .iter()
            .map(|&(promise, oracle, accept, gap)| {
                if promise {
                    Observation::Observed { oracle, accept, closed_form_gap: gap, norm_drift: gap / 2.0 }
                } else {
                    Observation::Filtered
                }
            })
            .collect();
        let fold = |xs: &[Observation]| xs.iter().fold(ClassStats::default(), |a, &o| a.merge(o.into()));
        let whole = fold(&obs);
        let at = if obs.is_empty() { 0 } else { cut.index(obs.len() + 1) };
        let (left, right) = obs.split_at(at);
        prop_assert_eq!(fold(left).merge(fold(right)), whole);
        prop_assert_eq!(fold(right).merge(fold(left)), whole);
    }
}

#[test]
fn hsf_characteristic_is_linear() {
    let inst = HsfInstance::cyclic(6, 2).unwrap();
    let chi = inst.characteristic().unwrap();
    let zero = vec![false; inst.arity()];
    for p in chi.polynomials() {
        let c0 = BigInt::from(p.evaluate(&zero).unwrap().into_value());
        for s in all_inputs(inst.arity()).step_by(37) {
            let mut sum = c0.clone();
            for (i, &b) in s.iter().enumerate() {
                if b {
                    let mut e = zero.clone();
                    e[i] = true;
                    sum += BigInt::from(p.evaluate(&e).unwrap().into_value()) - &c0;
                }
            }
            let m = BigInt::from(p.modulus().value().clone());
            let sum = ((sum % &m) + &m) % &m;
            assert_eq!(BigInt::from(p.evaluate(&s).unwrap().into_value()), sum);
            assert!(!m.is_zero());
        }
    }
}
