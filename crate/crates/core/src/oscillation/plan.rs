use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::angle::{ser_rat, Angle, AnglePair};
use super::density::{frac_of, Arc, FixedOrbit};
use super::hypothesis::{analyse_residues, detect_pi_rational_default, hypothesis_single, tol_from_log10, PiRationalWitness};
use super::OscillationError;
use crate::exact::{rat, BigRat};
use crate::highprec::{cos_pi, pow10, sin_pi, sqrt_int, HighPrecReal};

/// Fractional parts this close to a box edge count as outside.
pub const BOUNDARY_TIE_LOG10: i32 = -25;
/// Box half-widths tried by the general search, largest first.
pub const ETA_GRID: [(i64, i64); 4] = [(1, 4), (1, 8), (1, 16), (1, 32)];
pub const MAX_GENERATORS: usize = 3;
const TIE_LOG10: i32 = -30;
const RELATION_TOL_LOG10: i32 = -30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Rational,
    IrrationalSingle,
    General,
}

/// `prod_j [z_j - eta, z_j + eta]` on the torus.
#[derive(Debug, Clone, Serialize)]
pub struct TorusBox {
    pub center: Vec<HighPrecReal>,
    #[serde(serialize_with = "ser_rat")]
    pub half_width: BigRat,
}

impl TorusBox {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn measure(&self) -> BigRat {
        num_traits::pow(&self.half_width * BigRat::from_integer(2.into()), self.dimension())
    }
}

/// `psi(n) = d D m_n + a`, where `m_n` is the `n`-th `m >= 1` whose orbit point
/// `(m theta_j)` lies in the box (every `m` when there is no box).
#[derive(Debug, Clone, Serialize)]
pub struct SubsequencePlan {
    pub mode: PlanMode,
    pub d: u64,
    pub a: u64,
    #[serde(rename = "D")]
    pub big_d: u64,
    #[serde(rename = "box")]
    pub torus_box: Option<TorusBox>,
    pub theta: Vec<HighPrecReal>,
    /// `d D r_ij` for each `pi`-irrational pair `i` (rows) and generator `j`.
    pub matrix: Vec<Vec<i64>>,
    pub irrational_pairs: Vec<usize>,
    pub epsilon: HighPrecReal,
    #[serde(serialize_with = "ser_rat")]
    pub lambda_predicted: BigRat,
    pub witnesses: Vec<Option<PiRationalWitness>>,
}

impl SubsequencePlan {
    pub fn lambda_f64(&self) -> f64 {
        HighPrecReal::from_rat(&self.lambda_predicted, 20).to_f64()
    }

    pub fn digits(&self) -> u32 {
        self.epsilon.digits()
    }
}

/// Caller-supplied rational dependencies among the `omega_i / pi`:
/// `omega_i / pi = r_i0 + sum_j r_ij g_j / pi` for each `pi`-irrational pair
/// (in input order), with generator angles `g_j`.
#[derive(Debug, Clone)]
pub struct Relations {
    pub generators: Vec<Angle>,
    pub rows: Vec<Vec<BigRat>>,
}

fn abs_cos(angle_over_pi: &HighPrecReal) -> HighPrecReal {
    cos_pi(angle_over_pi).abs()
}

/// `a` in `candidates` maximizing `min_i |cos(a omega_i + phi_i)|` over `idx`,
/// smallest `a` on ties.
fn best_residue(pairs: &[AnglePair], idx: &[usize], candidates: &[u64]) -> Option<(u64, HighPrecReal)> {
    let tie = tol_from_log10(TIE_LOG10);
    let mut best: Option<(u64, HighPrecReal)> = None;
    for &a in candidates {
        let ab = BigInt::from(a);
        let v = idx
            .iter()
            .map(|&i| abs_cos(&pairs[i].omega.mul_add(&ab, &pairs[i].phi).over_pi))
            .min_by(|x, y| x.partial_cmp(y).expect("ordered"))
            .expect("nonempty");
        let better = match &best {
            None => true,
            Some((_, b)) => v.to_rat() > b.to_rat() + &tie,
        };
        if better {
            best = Some((a, v));
        }
    }
    best
}

/// Plan for one pair: `psi(n) = n d + a` when `omega / pi = c / d`, otherwise the
/// box `[-phi/pi - 1/4, -phi/pi + 1/4]` for `n omega / pi` with `epsilon = sqrt(2)/2`.
pub fn build_plan_single(p: &AnglePair) -> Result<SubsequencePlan, OscillationError> {
    if !hypothesis_single(p)? {
        return Err(OscillationError::HypothesisViolated);
    }
    let digits = p.digits();
    let witness = detect_pi_rational_default(&p.omega);
    if let Some(w) = witness {
        let candidates: Vec<u64> = (1..=w.d).collect();
        let (a, eps) = best_residue(std::slice::from_ref(p), &[0], &candidates).expect("d >= 1");
        if eps.contains_zero() {
            return Err(OscillationError::HypothesisViolated);
        }
        return Ok(SubsequencePlan {
            mode: PlanMode::Rational,
            d: w.d,
            a,
            big_d: 1,
            torus_box: None,
            theta: vec![],
            matrix: vec![],
            irrational_pairs: vec![],
            epsilon: eps,
            lambda_predicted: BigRat::from_integer(BigInt::from(w.d)),
            witnesses: vec![Some(w)],
        });
    }
    let center = frac_of(&-&p.phi.over_pi);
    Ok(SubsequencePlan {
        mode: PlanMode::IrrationalSingle,
        d: 1,
        a: 0,
        big_d: 1,
        torus_box: Some(TorusBox { center: vec![center], half_width: rat(1, 4) }),
        theta: vec![p.omega.over_pi.clone()],
        matrix: vec![vec![1]],
        irrational_pairs: vec![0],
        epsilon: sqrt_int(2, digits).div_int(&BigInt::from(2)),
        lambda_predicted: BigRat::from_integer(BigInt::from(2)),
        witnesses: vec![None],
    })
}

/// Plan for several pairs: residue class `a mod d` for the `pi`-rational
/// `omega_i`, then a grid-searched torus box for the generators of the rest.
pub fn build_plan_general(pairs: &[AnglePair], relations: Option<&Relations>) -> Result<SubsequencePlan, OscillationError> {
    if pairs.is_empty() {
        return Err(OscillationError::NoPairs);
    }
    if pairs.len() == 1 && relations.is_none() {
        return build_plan_single(&pairs[0]);
    }
    let digits = pairs.iter().map(AnglePair::digits).min().expect("nonempty");
    let ra = analyse_residues(pairs)?;
    if ra.good_residues.is_empty() {
        return Err(OscillationError::HypothesisViolated);
    }
    let d = ra.d;
    let rational: Vec<usize> = (0..pairs.len()).filter(|&i| ra.witnesses[i].is_some()).collect();
    let irrational: Vec<usize> = (0..pairs.len()).filter(|&i| ra.witnesses[i].is_none()).collect();
    let (a, eps_rat) = if rational.is_empty() {
        (0, HighPrecReal::from_int(1, digits))
    } else {
        best_residue(pairs, &rational, &ra.good_residues).expect("good residues exist")
    };

    let (theta, matrix, big_d) = generators(pairs, &irrational, d, relations)?;
    let mut plan = SubsequencePlan {
        mode: PlanMode::General,
        d,
        a,
        big_d,
        torus_box: None,
        theta,
        matrix,
        irrational_pairs: irrational.clone(),
        epsilon: eps_rat.clone(),
        lambda_predicted: BigRat::from_integer(BigInt::from(d)),
        witnesses: ra.witnesses,
    };
    if irrational.is_empty() {
        return Ok(plan);
    }
    let s = plan.theta.len();
    if s > MAX_GENERATORS {
        return Err(OscillationError::TooManyGenerators(s));
    }
    let ab = BigInt::from(a);
    let shifts: Vec<HighPrecReal> = irrational
        .iter()
        .map(|&i| pairs[i].omega.mul_add(&ab, &pairs[i].phi).over_pi)
        .collect();
    let (center, eta) = search_box(&plan.matrix, &shifts)?;
    let margin = &eta / BigRat::from_integer(2.into());
    let eps_box = sin_pi(&HighPrecReal::from_rat(&margin, digits));
    plan.epsilon = if eps_box < eps_rat { eps_box } else { eps_rat };
    let inv_measure = num_traits::pow((&eta * BigRat::from_integer(2.into())).recip(), s);
    plan.lambda_predicted = BigRat::from_integer(BigInt::from(d * big_d)) * inv_measure;
    plan.torus_box = Some(TorusBox {
        center: center.iter().map(|z| HighPrecReal::from_rat(z, digits)).collect(),
        half_width: eta,
    });
    Ok(plan)
}

type Generators = (Vec<HighPrecReal>, Vec<Vec<i64>>, u64);

fn generators(pairs: &[AnglePair], irrational: &[usize], d: u64, relations: Option<&Relations>) -> Result<Generators, OscillationError> {
    let db = BigInt::from(d);
    let Some(rel) = relations else {
        let theta = irrational.iter().map(|&i| pairs[i].omega.over_pi.mul_int(&db)).collect();
        let matrix = (0..irrational.len())
            .map(|r| (0..irrational.len()).map(|c| i64::from(r == c)).collect())
            .collect();
        return Ok((theta, matrix, 1));
    };
    let s = rel.generators.len();
    if rel.rows.len() != irrational.len() {
        return Err(OscillationError::InconsistentRelations(format!(
            "{} relation rows for {} pi-irrational pairs",
            rel.rows.len(),
            irrational.len()
        )));
    }
    if let Some(r) = rel.rows.iter().find(|r| r.len() != s + 1) {
        return Err(OscillationError::InconsistentRelations(format!(
            "row of length {} for {s} generators",
            r.len()
        )));
    }
    let mut big_d = BigInt::one();
    for r in rel.rows.iter().flatten() {
        big_d = big_d.lcm(r.denom());
    }
    let theta: Vec<HighPrecReal> = rel.generators.iter().map(|g| g.over_pi.clone()).collect();
    let tol = tol_from_log10(RELATION_TOL_LOG10);
    for (row, &i) in rel.rows.iter().zip(irrational) {
        let digits = pairs[i].digits();
        let mut v = HighPrecReal::from_rat(&row[0], digits);
        for (r, t) in row[1..].iter().zip(&theta) {
            v = &v + &t.mul_rat(r);
        }
        let res = (&v - &pairs[i].omega.over_pi).abs();
        if res.to_rat() > tol {
            return Err(OscillationError::InconsistentRelations(format!(
                "pair {i}: residual {}",
                res.to_sci_string(3)
            )));
        }
    }
    let scale = BigRat::from_integer(&big_d * &db);
    let matrix = rel
        .rows
        .iter()
        .map(|row| {
            row[1..]
                .iter()
                .map(|r| (r * &scale).to_integer().to_i64().ok_or_else(|| OscillationError::InconsistentRelations("coefficient overflow".into())))
                .collect::<Result<Vec<i64>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let big_d = big_d.to_u64().ok_or_else(|| OscillationError::InconsistentRelations("denominator overflow".into()))?;
    Ok((theta, matrix, big_d))
}

fn dist_to_int_f64(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Slack of row `i` at center `z`: `||sum_j M_ij z_j + shift_i - 1/2|| - eta sum_j |M_ij|`.
fn slack_exact(row: &[i64], z: &[BigRat], shift: &HighPrecReal, eta: &BigRat) -> BigRat {
    let digits = shift.digits();
    let mut x = shift - &HighPrecReal::from_rat(&rat(1, 2), digits);
    let mut spread = BigRat::zero();
    for (m, zj) in row.iter().zip(z) {
        let mr = BigRat::from_integer(BigInt::from(*m));
        x = &x + &HighPrecReal::from_rat(&(&mr * zj), digits);
        spread += mr.abs();
    }
    let dist = x.dist_to_int();
    dist.to_rat() - dist.error_bound() - spread * eta
}

/// Max-slack grid center for the largest workable `eta` in [`ETA_GRID`].
fn search_box(matrix: &[Vec<i64>], shifts: &[HighPrecReal]) -> Result<(Vec<BigRat>, BigRat), OscillationError> {
    let s = matrix.first().map_or(0, Vec::len);
    let shifts_f: Vec<f64> = shifts.iter().map(|x| frac_of(x).to_f64()).collect();
    for &(p, q) in &ETA_GRID {
        let eta_f = p as f64 / q as f64;
        let grid = 2 * ((q + p - 1) / p) as usize;
        let margin = eta_f / 2.0;
        let total = grid.pow(s as u32);
        let best = (0..total)
            .into_par_iter()
            .map(|idx| {
                let mut rest = idx;
                let z: Vec<f64> = (0..s)
                    .map(|_| {
                        let k = rest % grid;
                        rest /= grid;
                        k as f64 / grid as f64
                    })
                    .collect();
                let slack = matrix
                    .iter()
                    .zip(&shifts_f)
                    .map(|(row, sh)| {
                        let x: f64 = row.iter().zip(&z).map(|(m, zj)| *m as f64 * zj).sum::<f64>() + sh - 0.5;
                        dist_to_int_f64(x) - eta_f * row.iter().map(|m| m.unsigned_abs() as f64).sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min);
                (slack, idx)
            })
            .reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        if best.0 < margin + 1e-9 {
            continue;
        }
        let mut rest = best.1;
        let z: Vec<BigRat> = (0..s)
            .map(|_| {
                let k = rest % grid;
                rest /= grid;
                BigRat::new(BigInt::from(k), BigInt::from(grid))
            })
            .collect();
        let eta = BigRat::new(BigInt::from(p), BigInt::from(q));
        let margin_r = &eta / BigRat::from_integer(2.into());
        if matrix.iter().zip(shifts).all(|(row, sh)| slack_exact(row, &z, sh, &eta) >= margin_r) {
            return Ok((z, eta));
        }
    }
    Err(OscillationError::NoBoxFound)
}

/// The box as one arc per generator, in the orbit's fixed point.
fn box_arcs(b: &TorusBox, orbit: &FixedOrbit, digits: u32) -> Vec<Arc> {
    let m = orbit.modulus();
    let band = m / pow10((-BOUNDARY_TIE_LOG10) as u32);
    let half = (&b.half_width * BigRat::from_integer(m.clone())).to_integer();
    b.center
        .iter()
        .map(|c| {
            let lo = (c.with_digits(digits).mantissa() - &half).mod_floor(m);
            Arc::from_fixed(lo, &half * 2, band.clone())
        })
        .collect()
}

/// First `count` values of `psi`, strictly increasing.
pub fn enumerate_psi(plan: &SubsequencePlan, count: usize) -> Vec<u64> {
    let step = plan.d * plan.big_d;
    let Some(b) = &plan.torus_box else {
        return (1..=count as u64).map(|n| step * n + plan.a).collect();
    };
    let digits = plan.theta.iter().map(HighPrecReal::digits).min().expect("box has generators");
    let mut orbit = FixedOrbit::new(&plan.theta, digits, 1);
    let arcs = box_arcs(b, &orbit, digits);
    let m = orbit.modulus().clone();
    let mut out = Vec::with_capacity(count);
    let mut n = 1u64;
    while out.len() < count {
        if orbit.positions().iter().zip(&arcs).all(|(x, a)| a.contains(x, &m)) {
            out.push(step * n + plan.a);
        }
        orbit.advance();
        n += 1;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub count: usize,
    pub min_cos: HighPrecReal,
    pub epsilon: HighPrecReal,
    pub ratio: f64,
    pub lambda_predicted: f64,
    pub cos_ok: bool,
    pub lambda_ok: bool,
    pub pass: bool,
}

pub const LAMBDA_REL_TOL: f64 = 0.05;

/// `|cos(psi omega + phi)|`, computed from `omega / pi` and `phi / pi`.
pub fn abs_cos_at(pair: &AnglePair, psi: u64) -> HighPrecReal {
    abs_cos(&(&pair.omega.over_pi.mul_int(&BigInt::from(psi)) + &pair.phi.over_pi))
}

/// Checks the cosine floor and the growth rate of `psi` against `pairs`.
pub fn verify_plan(plan: &SubsequencePlan, pairs: &[AnglePair], count: usize) -> VerifyReport {
    let psi = enumerate_psi(plan, count);
    let min_cos = psi
        .par_iter()
        .flat_map_iter(|&v| pairs.iter().map(move |p| abs_cos_at(p, v)))
        .min_by(|x, y| x.partial_cmp(y).expect("ordered"))
        .unwrap_or_else(|| HighPrecReal::from_int(1, plan.digits()));
    let ratio = psi.last().map_or(0.0, |&v| v as f64 / count as f64);
    let lambda = plan.lambda_f64();
    let cos_ok = min_cos.to_rat() >= plan.epsilon.to_rat() - tol_from_log10(TIE_LOG10);
    let lambda_ok = ((ratio - lambda) / lambda).abs() <= LAMBDA_REL_TOL;
    VerifyReport {
        count,
        min_cos,
        epsilon: plan.epsilon.clone(),
        ratio,
        lambda_predicted: lambda,
        cos_ok,
        lambda_ok,
        pass: cos_ok && lambda_ok,
    }
}
