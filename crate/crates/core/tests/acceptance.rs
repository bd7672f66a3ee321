//! One test per acceptance criterion; each prints a single PASS/FAIL line.
//! Run with `cargo test -p zetaforms-core --test acceptance -- --nocapture --test-threads 1`.

mod common;

use std::time::Instant;

use common::{agm_pi, log10_diff, pow, report};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zetaforms_core::criterion::*;
use zetaforms_core::exact::{rat, BigRat};
use zetaforms_core::highprec::{sqrt_int, HighPrecReal};
use zetaforms_core::linear_forms::*;
use zetaforms_core::oscillation::*;
use zetaforms_core::zeta::{zeta_eta_series, zeta_euler_maclaurin, ZetaTable};

#[test]
fn c01_exponent_reproduction() {
    let t = Instant::now();
    let g = zudilin_constants();
    let kappa = exponent_threshold(&g);
    let published = published_exponent(kappa, 2);
    let elapsed = t.elapsed();
    let ok = (kappa - 438.2213).abs() <= 1e-3 && published == 438.23 && elapsed.as_secs_f64() < 1.0;
    report(1, "exponent reproduction", ok, format!("kappa = {kappa:.6}, stated exponent {published}"), elapsed);
}

#[test]
fn c02_height_identity() {
    let t = Instant::now();
    let lhs = zudilin_height_identity();
    report(2, "height identity", lhs == 513, format!("3(27+37+27) + sum(13+2j) = {lhs}"), t.elapsed());
}

#[test]
fn c03_structural_vanishing() {
    let t = Instant::now();
    let form = zudilin_linear_form(1, &LinearFormConfig::default()).unwrap();
    let zeros = [3, 4, 6, 8, 10, 12].iter().all(|&s| form.coefficient(s).is_zero());
    let nonzero = !form.ell0.is_zero() && [5, 7, 9, 11].iter().all(|&s| !form.coefficient(s).is_zero());
    let elapsed = t.elapsed();
    let ok = zeros && nonzero && elapsed.as_secs() < 300;
    report(
        3,
        "structural vanishing",
        ok,
        format!("zeta(3,4,6,8,10,12) zero: {zeros}; ell0, zeta(5,7,9,11) nonzero: {nonzero}"),
        elapsed,
    );
}

#[test]
fn c04_oracle_equivalence() {
    let t = Instant::now();
    let cfg = LinearFormConfig::default();
    let form = zudilin_linear_form(1, &cfg).unwrap();
    let table = ZetaTable::build(3..=12, 400).unwrap();
    let s1 = evaluate_numeric(&form, &table).unwrap();
    let direct = direct_sum(1, default_direct_digits(1), &cfg).unwrap();
    let diff = log10_diff(&s1.with_digits(direct.digits()), &direct);
    let mag = s1.log10_abs();
    let elapsed = t.elapsed();
    let ok = diff < -50.0 && !s1.contains_zero() && mag < -30.0 && elapsed.as_secs() < 600;
    report(
        4,
        "oracle equivalence",
        ok,
        format!("log10|S_1 - direct| = {diff:.1}, log10|S_1| = {mag:.3}"),
        elapsed,
    );
}

#[test]
fn c05_rational_branch() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let tol = BigRat::new(1.into(), BigInt::from(10).pow(30));
    let mut checked = 0;
    let mut ok = true;
    let mut detail = String::new();
    while checked < 4 {
        let d: i64 = rng.gen_range(1..=20);
        let c: i64 = rng.gen_range(-40..=40);
        let phi = if rng.gen_bool(0.5) {
            format!("{}/{}*pi", rng.gen_range(-30..=30), rng.gen_range(1..=12))
        } else {
            format!("{}/{}", rng.gen_range(-30..=30), rng.gen_range(1..=12))
        };
        let pair = AnglePair::parse(&format!("{c}/{d}*pi"), &phi, 60).unwrap();
        if !hypothesis_single(&pair).unwrap() {
            continue;
        }
        let plan = build_plan_single(&pair).unwrap();
        let red = rat(c, d);
        let dd: u64 = red.denom().try_into().unwrap();
        let psi = enumerate_psi(&plan, 10_000);
        let linear = psi.iter().enumerate().all(|(i, &v)| v == dd * (i as u64 + 1) + plan.a);
        let eps = plan.epsilon.to_rat();
        let periodic = psi.iter().all(|&v| (abs_cos_at(&pair, v).to_rat() - &eps).abs() < tol);
        if !(plan.mode == PlanMode::Rational && plan.d == dd && linear && periodic) {
            ok = false;
            detail = format!("failed at omega = {c}/{d} pi, phi = {phi}");
        }
        checked += 1;
    }
    let elapsed = t.elapsed();
    if detail.is_empty() {
        detail = format!("{checked} random (c/d, phi): |cos| constant to 1e-30 over n <= 1e4, psi(n) = d n + a");
    }
    report(5, "rational branch", ok && elapsed.as_secs() < 10, detail, elapsed);
}

#[test]
fn c06_irrational_branch() {
    let t = Instant::now();
    let floor = sqrt_int(2, 60).div_int(&BigInt::from(2));
    let mut ok = true;
    let mut parts = Vec::new();
    for w in ["1", "sqrt2", "e"] {
        let pair = AnglePair::parse(w, "0", 60).unwrap();
        let plan = build_plan_single(&pair).unwrap();
        let r = verify_plan(&plan, std::slice::from_ref(&pair), 10_000);
        let good = plan.mode == PlanMode::IrrationalSingle && r.min_cos >= floor && (1.9..=2.1).contains(&r.ratio);
        ok &= good;
        parts.push(format!("{w}: min|cos| {:.4}, ratio {:.4}", r.min_cos.to_f64(), r.ratio));
    }
    let elapsed = t.elapsed();
    report(6, "irrational branch", ok && elapsed.as_secs() < 30, parts.join("; "), elapsed);
}

#[test]
fn c07_kronecker_weyl_density() {
    let t = Instant::now();
    let bounds = [(rat(1, 10), rat(35, 100))];
    let r = kw_density(&[sqrt_int(2, 60)], &bounds, 1_000_000).unwrap();
    let elapsed = t.elapsed();
    let ok = (r.empirical - 0.25).abs() <= 0.01 && elapsed.as_secs() < 30;
    report(7, "Kronecker-Weyl density", ok, format!("empirical {:.6} vs 0.25", r.empirical), elapsed);
}

/// Hand truth table from the four exclusions for N = 2, with entries in `{0, pi/2}`.
fn expected_n2(w1: bool, w2: bool, p1: bool, p2: bool) -> bool {
    let line1 = !(!w1 && p1);
    let line2 = !(!w2 && p2);
    let line3 = !(w1 && w2 && p1 && !p2);
    let line4 = !(w1 && w2 && !p1 && p2);
    line1 && line2 && line3 && line4
}

#[test]
fn c08_hypothesis_checker() {
    let t = Instant::now();
    let ang = |half: bool| if half { "pi/2" } else { "0" };
    let mut wrong = Vec::new();
    let mut total = 0;
    for bits in 0..16u32 {
        let (w1, w2, p1, p2) = (bits & 1 != 0, bits & 2 != 0, bits & 4 != 0, bits & 8 != 0);
        let pairs = [
            AnglePair::parse(ang(w1), ang(p1), 60).unwrap(),
            AnglePair::parse(ang(w2), ang(p2), 60).unwrap(),
        ];
        let got = hypothesis_multi(&pairs).unwrap();
        if got != expected_n2(w1, w2, p1, p2) {
            wrong.push(format!("({}, {}, {}, {})", ang(w1), ang(w2), ang(p1), ang(p2)));
        }
        total += 1;
    }
    let detail = if wrong.is_empty() {
        format!("all {total} tuples over {{0, pi/2}} decided as the four exclusions require")
    } else {
        format!("wrong on {}", wrong.join(", "))
    };
    report(8, "hypothesis checker", wrong.is_empty(), detail, t.elapsed());
}

#[test]
fn c09_lambda_invariance() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(9);
    let g = zudilin_constants();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let lambda = rng.gen_range(1.0..10.0);
        let s = g.powered(lambda);
        let rel = |a: f64, b: f64| ((a - b) / a).abs();
        worst = worst
            .max(rel(dimension_bound(&g), dimension_bound(&s)))
            .max(rel(exponent_threshold(&g), exponent_threshold(&s)));
    }
    let elapsed = t.elapsed();
    report(
        9,
        "lambda invariance",
        worst < 1e-12 && elapsed.as_secs_f64() < 1.0,
        format!("worst relative change over 100 lambdas: {worst:.2e}"),
        elapsed,
    );
}

#[test]
fn c10_zeta_engine() {
    let t = Instant::now();
    let digits = 200;
    let table = ZetaTable::build(2..=12, digits).unwrap();
    let mut worst_dual = f64::NEG_INFINITY;
    for s in 2..=12 {
        let a = zeta_euler_maclaurin(s, digits).unwrap();
        let b = zeta_eta_series(s, digits).unwrap();
        worst_dual = worst_dual.max(log10_diff(&a, &b));
    }
    let p = agm_pi(digits + 20);
    let closed: [(u32, BigRat); 6] = [
        (2, rat(1, 6)),
        (4, rat(1, 90)),
        (6, rat(1, 945)),
        (8, rat(1, 9450)),
        (10, rat(1, 93555)),
        (12, rat(691, 638_512_875)),
    ];
    let mut worst_closed = f64::NEG_INFINITY;
    for (s, c) in closed {
        let v: HighPrecReal = pow(&p, s).mul_rat(&c).with_digits(digits);
        worst_closed = worst_closed.max(log10_diff(table.get(s).unwrap(), &v));
    }
    let elapsed = t.elapsed();
    let ok = worst_dual < -195.0 && worst_closed < -195.0 && elapsed.as_secs() < 30;
    report(
        10,
        "zeta engine",
        ok,
        format!("log10 dual-method gap {worst_dual:.1}, log10 closed-form gap {worst_closed:.1}"),
        elapsed,
    );
}
