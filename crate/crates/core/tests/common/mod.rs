#![allow(dead_code)]

use num_bigint::BigInt;
use zetaforms_core::exact::rat;
use zetaforms_core::HighPrecReal;

/// Gauss–Legendre iteration for pi, independent of the library's Machin series.
pub fn agm_pi(digits: u32) -> HighPrecReal {
    let work = digits + 20;
    let one = HighPrecReal::from_int(1, work);
    let two = BigInt::from(2);
    let mut a = one.clone();
    let mut b = HighPrecReal::from_rat(&rat(1, 2), work).sqrt().unwrap();
    let mut t = HighPrecReal::from_rat(&rat(1, 4), work);
    let mut p = BigInt::from(1);
    loop {
        let next = (&a + &b).div_int(&two);
        b = (&a * &b).sqrt().unwrap();
        let diff = &a - &next;
        t = &t - &(&diff * &diff).mul_int(&p);
        p *= 2;
        a = next;
        if (&a - &b).abs().log10_abs() < -(work as f64) {
            break;
        }
    }
    let s = &a + &b;
    (&s * &s).checked_div(&t.mul_int(&BigInt::from(4))).unwrap().with_digits(digits)
}

pub fn pow(x: &HighPrecReal, e: u32) -> HighPrecReal {
    let mut acc = HighPrecReal::from_int(1, x.digits());
    for _ in 0..e {
        acc = &acc * x;
    }
    acc
}

/// `|a - b|` as a `log10`.
pub fn log10_diff(a: &HighPrecReal, b: &HighPrecReal) -> f64 {
    (a - b).abs().log10_abs()
}

/// One line per acceptance criterion, then fail the test if it did not hold.
pub fn report(id: u32, name: &str, ok: bool, detail: String, elapsed: std::time::Duration) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{tag}] {name}: {detail} ({:.2}s)", elapsed.as_secs_f64());
    assert!(ok, "criterion {id} failed: {detail}");
}
