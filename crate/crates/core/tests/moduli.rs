use proptest::prelude::*;
use ucw::fixpoint::{afp_bundle, afp_delta};
use ucw::models::{Euclidean, LpSpace, PoincareDisk};
use ucw::moduli::{check_lambda_convexity, check_property_g, ConstraintSampling};
use ucw::rates::ceil_count;
use ucw::{psi_cat0_direct, psi_eta, ModelSpace, PropertyGModulus, UcModulus};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn psi_for_the_cat0_modulus() {
    // [DERIVED] η(1, 1) = 1/8; min(1, (4/96)(1/64)) = 1/1536; (1/1536)²/4
    // = 1/9437184 beats (4/32)(1/64)
    let v = psi_eta(&UcModulus::Cat0, 1.0, 2.0).unwrap();
    assert!(close(v, 1.0 / 9_437_184.0, 1e-14), "{v}");
    assert!(close(v, 1.0596381293402777e-7, 1e-14));
}

#[test]
fn psi_clamps_the_inner_argument() {
    // [DERIVED] r = 0.1, ε = 2: ε/2r = 10 is clamped to 2, η = 1/2, giving
    // min(1, (4/9.6)(1/4))²/4 = 0.00271267…
    let v = psi_eta(&UcModulus::Cat0, 0.1, 2.0).unwrap();
    assert!(close(v, 0.0027126736111111106, 1e-14), "{v}");
}

#[test]
fn direct_cat0_modulus() {
    // [PAPER] ε = 2 leaves the subtracted term ε²/4 = 1
    assert_eq!(psi_cat0_direct(1.0, 2.0), 1.0);
    // [TRIVIAL]
    assert!(close(psi_cat0_direct(1.0, 0.1), 0.0025, 1e-15));
    for r in [0.5, 5.0, 50.0] {
        assert_eq!(psi_cat0_direct(r, 1.0), 0.25);
    }
}

#[test]
fn clarkson_modulus() {
    // [DERIVED] 1 − (1 − 2⁻⁴)^(1/4)
    let eta = UcModulus::Clarkson { p: 4.0 };
    assert!(close(eta.eval(1.0, 1.0), 0.01600516436728483, 1e-13));
    // [TRIVIAL] p = 2 matches the inner-product value 1 − √(1 − ε²/4)
    let two = UcModulus::Clarkson { p: 2.0 };
    assert!(close(two.eval(1.0, 0.5), 1.0 - (1.0f64 - 0.0625).sqrt(), 1e-13));
    // no cancellation for tiny ε: ≈ (ε/2)^p / p
    assert!(close(eta.eval(1.0, 1e-5), (0.5e-5f64).powi(4) / 4.0, 1e-9));
}

#[test]
fn models_carry_their_moduli() {
    assert!(matches!(Euclidean::new(2, 1.0).unwrap().modulus(), UcModulus::Cat0));
    assert!(matches!(PoincareDisk::new(0.5).unwrap().modulus(), UcModulus::Cat0));
    assert!(matches!(LpSpace::new(2, 3.0, 1.0).unwrap().modulus(), UcModulus::Clarkson { p } if p == 3.0));
}

#[test]
fn custom_moduli_are_screened() {
    assert!(UcModulus::custom("cat0 copy", |_, e| e * e / 8.0).is_ok());
    assert!(UcModulus::custom("growing in r", |r, e| r * e * e).is_err());
    assert!(UcModulus::custom("zero", |_, _| 0.0).is_err());
    let big = UcModulus::custom("large", |_, e| 10.0 * e).unwrap();
    assert!(big.exceeds_unit());
    assert!(psi_eta(&UcModulus::Cat0, 0.0, 1.0).is_err());
}

#[test]
fn afp_delta_oracle() {
    // [DERIVED] min(1, 1, (4/16)·η(2, 1)) = 0.25 · 0.125
    assert_eq!(afp_delta(1.0, 2.0, &UcModulus::Cat0).unwrap(), 0.03125);
    // [TRIVIAL] ε ≥ 4b clamps the inner argument to 2
    let at_clamp = afp_delta(1.0, 4.0, &UcModulus::Cat0).unwrap();
    assert!(close(at_clamp, (1.0f64).min(16.0 / 16.0 * 0.5), 1e-15));
    assert!(afp_delta(0.0, 1.0, &UcModulus::Cat0).is_err());
}

#[test]
fn afp_chain_oracle() {
    // [DERIVED] δ_n = 2⁻ⁿ, u(ε) = ⌈log₂(1/ε)⌉, b = 1, B = 1, ε = 1:
    // Θ(1/3) = ½·(1/144)(1/288) = 1/82944, γ(1/3) = ⌈log₂ 82944⌉ = 17,
    // Ω(1) = Θ(1/3) / (18 · 2)
    let bundle = afp_bundle(1.0, UcModulus::Cat0, |e| ceil_count((1.0 / e).log2()), 1.0).unwrap();
    assert!(close(bundle.theta(1.0 / 3.0), 1.0 / 82_944.0, 1e-14));
    assert_eq!(bundle.n_index(1.0), 17);
    assert!(close(bundle.omega(1.0), 3.3489797668038406e-7, 1e-12));
    assert_eq!(bundle.gamma_rate(1.0), 10);
}

#[test]
fn degenerate_error_sequence() {
    // [TRIVIAL] u ≡ 0, B = 0: γ ≡ 0, N ≡ 0, Ω(ε) = Θ(ε/2)
    let bundle = afp_bundle(1.0, UcModulus::Cat0, |_| 0, 0.0).unwrap();
    for eps in [0.01, 0.3, 2.0] {
        assert_eq!(bundle.gamma_rate(eps), 0);
        assert_eq!(bundle.n_index(eps), 0);
        assert_eq!(bundle.omega(eps), bundle.theta(eps / 2.0));
    }
}

#[test]
fn property_g_sweeps() {
    // [DERIVED] numerical sweeps of 10⁵ constrained triples
    let e = Euclidean::new(2, 1.0).unwrap();
    let r = check_property_g(&e, &PropertyGModulus::for_model(&e), ConstraintSampling::Derived, 1, 100_000, 1e-9).unwrap();
    assert!(r.passed(), "{r:?}");
    let l = LpSpace::new(3, 4.0, 1.0).unwrap();
    let r = check_property_g(&l, &PropertyGModulus::for_model(&l), ConstraintSampling::Derived, 1, 100_000, 1e-9).unwrap();
    assert!(r.passed(), "{r:?}");
    let fixed = ConstraintSampling::Fixed { r: 0.5, eps: 0.3 };
    let r = check_property_g(&l, &PropertyGModulus::for_model(&l), fixed, 2, 10_000, 1e-9).unwrap();
    assert!(r.passed() && r.skipped == 0, "{r:?}");
    assert!(check_property_g(&l, &PropertyGModulus::Cat0Direct, ConstraintSampling::Derived, 1, 10, 1e-9).is_err());
}

#[test]
fn lambda_weighted_sweep_on_the_disk() {
    // [DERIVED] 10⁵ samples with uniform λ, in both forms
    let d = PoincareDisk::new(0.9).unwrap();
    let reports = check_lambda_convexity(&d, ConstraintSampling::Derived, 4, 100_000, 1e-7).unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert!(r.passed(), "{r:?}");
    }
}

proptest! {
    #[test]
    fn psi_is_monotone_in_eps(r in 0.01f64..20.0, e1 in 1e-4f64..4.0, e2 in 1e-4f64..4.0) {
        // [DERIVED] for the CAT(0) η
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(psi_eta(&UcModulus::Cat0, r, lo).unwrap() <= psi_eta(&UcModulus::Cat0, r, hi).unwrap());
    }

    #[test]
    fn afp_delta_is_at_most_b(b in 1e-3f64..100.0, eps in 1e-4f64..100.0, p in 2.0f64..6.0) {
        // [TRIVIAL]
        let eta = UcModulus::Clarkson { p };
        prop_assert!(afp_delta(b, eps, &eta).unwrap() <= b);
        prop_assert!(afp_delta(b, eps, &UcModulus::Cat0).unwrap() <= eps / 2.0);
    }

    #[test]
    fn theta_is_half_delta(b in 1e-3f64..100.0, eps in 1e-4f64..100.0) {
        // [TRIVIAL]
        let bundle = afp_bundle(b, UcModulus::Cat0, |_| 1, 0.5).unwrap();
        prop_assert_eq!(bundle.theta(eps), afp_delta(b, eps, &UcModulus::Cat0).unwrap() / 2.0);
    }

    #[test]
    fn clarkson_modulus_lies_in_unit_interval(p in 2.0f64..20.0, eps in 1e-6f64..=2.0) {
        let v = UcModulus::Clarkson { p }.eval(1.0, eps);
        prop_assert!(v > 0.0 && v <= 1.0);
    }
}
