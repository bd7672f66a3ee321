mod common;

use common::{agm_pi, log10_diff, pow};
use num_bigint::BigInt;
use proptest::prelude::*;
use zetaforms_core::exact::{harmonic_power_sum, rat};
use zetaforms_core::linear_forms::*;
use zetaforms_core::zeta::{zeta_eta_series, zeta_euler_maclaurin, zeta_high_precision};
use zetaforms_core::HighPrecReal;

#[test]
fn agm_pi_matches_published_prefix() {
    let p = agm_pi(60).to_decimal_string(48);
    assert_eq!(p, "3.141592653589793238462643383279502884197169399375");
}

#[test]
fn zeta2_is_pi_squared_over_six() {
    let z = zeta_high_precision(2, 30).unwrap();
    let closed = pow(&agm_pi(40), 2).div_int(&BigInt::from(6)).with_digits(30);
    assert!(log10_diff(&z, &closed) < -30.0 + 1.0);
}

#[test]
fn zeta12_closed_form() {
    let z = zeta_high_precision(12, 50).unwrap();
    let closed = pow(&agm_pi(60), 12).mul_rat(&rat(691, 638_512_875)).with_digits(50);
    assert!(log10_diff(&z, &closed) < -49.0);
}

#[test]
fn zeta5_dual_methods() {
    let a = zeta_euler_maclaurin(5, 100).unwrap();
    let b = zeta_eta_series(5, 100).unwrap();
    assert!(log10_diff(&a, &b) < -95.0);
    assert!(a.to_decimal_string(10).starts_with("1.0369277551"));
}

/// `sum_{k>m} k^-s` by direct summation to `N` plus Euler–Maclaurin terms
/// with hard-coded Bernoulli numbers.
fn tail_oracle(m: u64, s: u32, digits: u32) -> HighPrecReal {
    let n: u64 = 2000.max(m + 1);
    let mut acc = HighPrecReal::zero(digits);
    for k in (m + 1)..n {
        acc = &acc + &HighPrecReal::from_int(1, digits).checked_div(&HighPrecReal::from_int(BigInt::from(k).pow(s), digits)).unwrap();
    }
    let nn = BigInt::from(n);
    let inv = |e: u32| HighPrecReal::from_rat(&num_rational::BigRational::new(1.into(), nn.pow(e)), digits);
    // N^-s/2 + N^(1-s)/(s-1) + sum B_2j/(2j)! (s)_(2j-1) N^(-s-2j+1)
    acc = &acc + &inv(s).div_int(&BigInt::from(2));
    acc = &acc + &inv(s - 1).div_int(&BigInt::from(s - 1));
    let bern = [(2u32, rat(1, 6)), (4, rat(-1, 30)), (6, rat(1, 42)), (8, rat(-1, 30))];
    for (j, b) in bern {
        let mut rising = BigInt::from(1);
        for i in 0..(j - 1) {
            rising *= s + i;
        }
        let fact: BigInt = (1..=j).map(BigInt::from).product();
        let c = b * num_rational::BigRational::new(rising, fact);
        acc = &acc + &inv(s + j - 1).mul_rat(&c);
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn harmonic_plus_tail_is_zeta(m in 0u64..=50, s in 2u32..=12) {
        let digits = 30;
        let h = HighPrecReal::from_rat(&harmonic_power_sum(m, s), digits);
        let z = zeta_high_precision(s, digits).unwrap();
        let total = &h + &tail_oracle(m, s, digits);
        prop_assert!(log10_diff(&total, &z) < -(digits as f64) + 5.0);
    }

    #[test]
    fn reconstruction_at_random_points(num in -5000i64..5000, den in 2i64..997) {
        prop_assume!(num % den != 0);
        let f = build_zudilin(1).unwrap();
        let p = partial_fractions(&f).unwrap();
        let t = rat(num, den);
        prop_assert_eq!(f.eval(&t), p.eval(&t));
    }
}

#[test]
fn zeta_prefix_consistency() {
    for s in [3, 7, 11] {
        let a = zeta_high_precision(s, 60).unwrap();
        let b = zeta_high_precision(s, 120).unwrap();
        assert!(log10_diff(&a, &b.with_digits(60)) < -59.0);
    }
}

#[test]
fn zudilin_n2_vanishing_and_reconstruction() {
    let p = zudilin_pipeline(2, &LinearFormConfig::default()).unwrap();
    for s in [3, 4, 6, 8, 10, 12] {
        assert!(p.form.coefficient(s) == rat(0, 1));
    }
    let checks = check_pipeline(&p);
    assert!(checks.vanishing && checks.reconstruction && checks.denominator_clears);
    println!("n=2 log2 height / n = {:.3}", checks.log2_height_per_n);
}

#[test]
fn form_document_shape() {
    let p = zudilin_pipeline(1, &LinearFormConfig::default()).unwrap();
    let doc = p.form.to_document(check_pipeline(&p));
    let v = serde_json::to_value(&doc).unwrap();
    for key in ["n", "ell0", "coeffs", "denominator", "log2_height", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["coeffs"]["03"], "0");
    assert_ne!(v["coeffs"]["05"], "0");
}
