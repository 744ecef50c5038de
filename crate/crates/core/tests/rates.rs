use proptest::prelude::*;
use ucw::rates::{
    iterate, mono_metastability, monotone_family, quasi_monotone_family, step_drop, summable_metastability, ErrorSeq, RealSeq,
};
use ucw::{CounterFn, MetaStatus};

#[test]
fn tilde_and_iteration() {
    // [TRIVIAL] g ≡ 1: g̃ⁿ(0) = n
    for k in [0, 1, 7, 40] {
        assert_eq!(iterate(&CounterFn::constant(1).tilde(), k, 0).value, k);
    }
    // [DERIVED] g(n) = n: 1 → 2 → 4 → 8
    assert_eq!(iterate(&CounterFn::linear().tilde(), 3, 1).value, 8);
}

#[test]
fn running_max_of_a_non_monotone_counter() {
    // [TRIVIAL]
    let g = CounterFn::new("0,5,1,1,…", |n| match n {
        0 => 0,
        1 => 5,
        _ => 1,
    });
    let m = g.running_max();
    assert_eq!((0..4).map(|n| m.eval(n)).collect::<Vec<_>>(), vec![0, 5, 5, 5]);
}

#[test]
fn halving_sequence() {
    // [DERIVED] ε = 0.1, g ≡ 1: bound g̃^(10)(0) = 10; the first window with
    // oscillation ≤ 0.1 is [3, 4]
    let seq = RealSeq::new("2^-n", 1.0, |n| 0.5f64.powi(n as i32));
    let r = mono_metastability(&seq, 0.1, &CounterFn::constant(1), 1e-12).unwrap();
    assert_eq!(r.found_n, Some(3));
    assert_eq!(r.theoretical_bound.value, 10);
    assert_eq!(r.status, MetaStatus::Pass);
}

#[test]
fn constant_sequence() {
    // [TRIVIAL]
    let seq = RealSeq::new("0.4", 1.0, |_| 0.4);
    for g in CounterFn::test_family(3) {
        assert_eq!(mono_metastability(&seq, 1e-4, &g, 0.0).unwrap().found_n, Some(0));
    }
}

#[test]
fn step_drops_stay_within_the_bound() {
    // [DERIVED] a drop of size 1 must be cleared within ⌈1/ε⌉ windows
    for k in [1, 2, 5, 17, 50] {
        for g in CounterFn::test_family(9) {
            let r = mono_metastability(&step_drop(k), 0.5, &g, 0.0).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.found_n.unwrap() <= 50);
        }
    }
}

#[test]
fn monotone_family_passes() {
    for seq in monotone_family(11) {
        for g in CounterFn::test_family(11) {
            for eps in [0.5, 0.1, 0.01] {
                let r = mono_metastability(&seq, eps, &g, 1e-12).unwrap();
                assert!(r.status != MetaStatus::Fail, "{r:?}");
            }
        }
    }
}

#[test]
fn quasi_monotone_family_passes() {
    for seq in quasi_monotone_family(11) {
        for g in CounterFn::test_family(11) {
            for eps in [0.5, 0.1, 0.01] {
                let r = summable_metastability(&seq, eps, &g, 1e-12).unwrap();
                assert!(r.status != MetaStatus::Fail, "{r:?}");
            }
        }
    }
}

#[test]
fn zero_errors_reduce_to_the_monotone_case() {
    // [TRIVIAL] with δ ≡ 0 both verifiers find the same first window
    for seq in monotone_family(2) {
        let quasi = seq.clone().with_errors(ErrorSeq::zero());
        for g in CounterFn::test_family(2) {
            let a = mono_metastability(&seq, 0.05, &g, 1e-12).unwrap();
            let b = summable_metastability(&quasi, 0.05, &g, 1e-12).unwrap();
            assert_eq!(a.found_n, b.found_n, "{} / {}", seq.descriptor, g.name());
        }
    }
}

#[test]
fn adversarial_counter_never_fails() {
    let g = CounterFn::exp_capped();
    for seq in monotone_family(4) {
        assert_ne!(mono_metastability(&seq, 0.01, &g, 1e-12).unwrap().status, MetaStatus::Fail);
    }
}

#[test]
fn bad_inputs() {
    let rising = RealSeq::new("n/(n+1)", 1.0, |n| n as f64 / (n + 1) as f64);
    assert!(mono_metastability(&rising, 0.01, &CounterFn::constant(3), 0.0).is_err());
    let seq = RealSeq::new("c", 1.0, |_| 0.1);
    assert!(mono_metastability(&seq, 0.0, &CounterFn::constant(3), 0.0).is_err());
}

proptest! {
    #[test]
    fn random_nonincreasing_sequences_are_metastable(seed in any::<u64>(), c in 0u64..20, eps in 0.01f64..1.0) {
        let seq = ucw::rates::random_nonincreasing(seed, 512);
        let r = mono_metastability(&seq, eps, &CounterFn::constant(c), 1e-12).unwrap();
        prop_assert!(r.passed());
        prop_assert!(r.found_n.unwrap() <= r.theoretical_bound.value);
    }

    #[test]
    fn dip_and_recover_is_metastable(seed in any::<u64>(), c in 0u64..20, eps in 0.01f64..1.0) {
        let seq = ucw::rates::dip_and_recover(seed, 1024);
        let r = summable_metastability(&seq, eps, &CounterFn::constant(c), 1e-12).unwrap();
        prop_assert!(r.status != MetaStatus::Fail);
    }
}
