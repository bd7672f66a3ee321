use std::fmt::Write as _;

use clap::{ArgGroup, Args};
use serde::Serialize;
use zetaforms_core::criterion::{
    oscillating_report, published_exponent, zudilin_constants, zudilin_kappa_interval, CriterionReport, GrowthData,
    ZUDILIN_C0, ZUDILIN_C1, ZUDILIN_HEIGHT_BITS,
};
use zetaforms_core::exact::{parse_rat, rat_to_string, BigRat};
use zetaforms_core::linear_forms::{
    check_pipeline, common_denominator, default_direct_digits, direct_sum_report, evaluate_numeric, required_digits,
    zudilin_pipeline, DenominatorReport, FormDocument, LinearFormConfig, LinearFormError, C0_REFERENCE,
    ZUDILIN_ORDER_RANGE,
};
use zetaforms_core::oscillation::{
    build_plan_general, build_plan_single, enumerate_psi, hypothesis_multi, kw_density, parse_angle_expr, Angle,
    AnglePair, DensityReport, Relations, SubsequencePlan, VerifyReport, DEFAULT_ANGLE_DIGITS,
    verify_plan,
};
use zetaforms_core::highprec::pow10;
use zetaforms_core::{HighPrecReal, ZetaTable};

use crate::error::CliError;
use crate::output::{to_csv, to_json, Rendered};

/// Table precision used by `form` unless the index needs more.
pub const DEFAULT_FORM_DIGITS: u32 = 400;
pub const DEFAULT_VERIFY_COUNT: usize = 10_000;
const AGREEMENT_LOG10: i32 = -50;

/// What a command produced, plus a failure to report after the output is written.
pub struct Outcome {
    pub rendered: Rendered,
    pub failure: Option<CliError>,
}

#[derive(Debug, Args)]
pub struct FormArgs {
    /// Index of the linear form.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Digits of the zeta table used to evaluate the form.
    #[arg(long, value_parser = clap::value_parser!(u32).range(10..))]
    pub digits: Option<u32>,
    /// Digits of the independent direct summation.
    #[arg(long, value_parser = clap::value_parser!(u32).range(10..))]
    pub direct_digits: Option<u32>,
    /// Largest index accepted before refusing as over budget.
    #[arg(long, default_value_t = LinearFormConfig::default().max_n)]
    pub max_n: u64,
    /// Largest truncation point for the direct summation.
    #[arg(long, default_value_t = LinearFormConfig::default().max_cutoff)]
    pub max_cutoff: u64,
}

#[derive(Serialize)]
struct FormOutput {
    n: u64,
    digits: u32,
    direct_digits: u32,
    form: FormDocument,
    value: String,
    log10_abs_value: f64,
    ln_abs_value_per_n: f64,
    c0_reference: f64,
    direct_sum: String,
    direct_cutoff: u64,
    agreement_delta: String,
    agreement_ok: bool,
    denominator_report: DenominatorReport,
    checks_pass: bool,
}

pub fn form(args: &FormArgs) -> Result<Outcome, CliError> {
    let config = LinearFormConfig { max_n: args.max_n, max_cutoff: args.max_cutoff };
    let need = required_digits(args.n);
    let digits = args.digits.unwrap_or(need.max(DEFAULT_FORM_DIGITS));
    if digits < need {
        return Err(LinearFormError::InsufficientPrecision { have: digits, need }.into());
    }
    let pipeline = zudilin_pipeline(args.n, &config)?;
    let checks = check_pipeline(&pipeline);
    let table = ZetaTable::build(ZUDILIN_ORDER_RANGE, digits)?;
    let value = evaluate_numeric(&pipeline.form, &table)?;

    let direct_digits = args.direct_digits.unwrap_or_else(|| default_direct_digits(args.n));
    let direct = direct_sum_report(&pipeline.function, direct_digits, config.max_cutoff)?;
    let delta = (&value.with_digits(direct_digits) - &direct.value).abs();
    let tol = BigRat::new(1.into(), pow10(-AGREEMENT_LOG10 as u32));
    let agreement_ok = delta.to_rat() + delta.error_bound() < tol;

    let (_, denominator_report) = common_denominator(&pipeline.form);
    let checks_pass = checks.vanishing
        && checks.reconstruction
        && checks.height_within_bound
        && checks.denominator_clears
        && agreement_ok
        && !value.contains_zero();
    let log10 = value.log10_abs();
    let out = FormOutput {
        n: args.n,
        digits,
        direct_digits,
        form: pipeline.form.to_document(checks),
        value: value.to_sci_string(40),
        log10_abs_value: log10,
        ln_abs_value_per_n: log10 * std::f64::consts::LN_10 / args.n as f64,
        c0_reference: C0_REFERENCE,
        direct_sum: direct.value.to_sci_string(40),
        direct_cutoff: direct.cutoff,
        agreement_delta: delta.to_sci_string(6),
        agreement_ok,
        denominator_report,
        checks_pass,
    };

    let mut rows = vec![vec!["0".to_string(), out.form.ell0.clone()]];
    for (s, c) in &pipeline.form.coefficients {
        rows.push(vec![s.to_string(), rat_to_string(c)]);
    }
    let csv = to_csv(&["s", "coefficient"], &rows);

    let mut text = String::new();
    let _ = writeln!(text, "linear form n = {}", out.n);
    let _ = writeln!(text, "  ell_0 = {}", out.form.ell0);
    for (s, c) in &pipeline.form.coefficients {
        let _ = writeln!(text, "  ell_{s} = {}", rat_to_string(c));
    }
    let _ = writeln!(text, "S_n = {} ({} digits)", out.value, digits);
    let _ = writeln!(text, "ln|S_n| / n = {:.6} (reference -{})", out.ln_abs_value_per_n, C0_REFERENCE);
    let _ = writeln!(text, "direct sum = {} (cutoff {})", out.direct_sum, out.direct_cutoff);
    let _ = writeln!(text, "agreement |S_n - direct| = {} ok: {}", out.agreement_delta, agreement_ok);
    let _ = writeln!(
        text,
        "ln D_n / n = {:.6} (reference {})",
        out.denominator_report.log_denominator_per_n, out.denominator_report.c1_reference
    );
    let _ = writeln!(text, "log2 height = {:.3}", out.form.log2_height);
    let _ = writeln!(text, "checks pass: {checks_pass}");

    let failure = (!checks_pass).then(|| CliError::Internal("form checks failed, see report".into()));
    Ok(Outcome { rendered: Rendered { json: to_json("form", &out), csv, text }, failure })
}

#[derive(Debug, Args)]
pub struct SubseqArgs {
    /// Frequency of one pair; repeat for several pairs.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub omega: Vec<String>,
    /// Phase of one pair, matched to `--omega` by position.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub phi: Vec<String>,
    /// Number of subsequence terms to print.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Terms enumerated by the verification pass.
    #[arg(long, default_value_t = DEFAULT_VERIFY_COUNT)]
    pub verify_count: usize,
    #[arg(long, default_value_t = DEFAULT_ANGLE_DIGITS, value_parser = clap::value_parser!(u32).range(10..))]
    pub digits: u32,
    /// Generator angle for supplied relations; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub generator: Vec<String>,
    /// `r0,r1,...,rs` with `omega/pi = r0 + sum r_j g_j/pi`, one per pi-irrational pair in input order.
    #[arg(long, allow_hyphen_values = true)]
    pub relation: Vec<String>,
}

#[derive(Serialize)]
struct SubseqOutput<'a> {
    pairs: Vec<[&'a str; 2]>,
    hypothesis_ok: bool,
    plan: &'a SubsequencePlan,
    count: u64,
    psi: &'a [u64],
    verify: &'a VerifyReport,
}

fn parse_relations(args: &SubseqArgs) -> Result<Option<Relations>, CliError> {
    if args.generator.is_empty() && args.relation.is_empty() {
        return Ok(None);
    }
    let generators = args
        .generator
        .iter()
        .map(|g| Angle::parse(g, args.digits))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = args
        .relation
        .iter()
        .map(|row| {
            row.split(',')
                .map(|r| parse_rat(r).map_err(|e| CliError::Usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(Relations { generators, rows }))
}

pub fn subseq(args: &SubseqArgs) -> Result<Outcome, CliError> {
    if args.omega.len() != args.phi.len() {
        return Err(CliError::Usage(format!(
            "{} values of --omega but {} of --phi",
            args.omega.len(),
            args.phi.len()
        )));
    }
    let pairs = args
        .omega
        .iter()
        .zip(&args.phi)
        .map(|(w, p)| AnglePair::parse(w, p, args.digits))
        .collect::<Result<Vec<_>, _>>()?;
    let relations = parse_relations(args)?;
    if !hypothesis_multi(&pairs)? {
        return Err(CliError::Domain(
            "hypothesis violated: every n has some n omega_i + phi_i = pi/2 mod pi".into(),
        ));
    }
    let plan = match (&relations, pairs.len()) {
        (None, 1) => build_plan_single(&pairs[0])?,
        _ => build_plan_general(&pairs, relations.as_ref())?,
    };
    let psi = enumerate_psi(&plan, args.count as usize);
    let verify = verify_plan(&plan, &pairs, args.verify_count.max(1));
    let out = SubseqOutput {
        pairs: args.omega.iter().zip(&args.phi).map(|(w, p)| [w.as_str(), p.as_str()]).collect(),
        hypothesis_ok: true,
        plan: &plan,
        count: args.count,
        psi: &psi,
        verify: &verify,
    };

    let rows: Vec<Vec<String>> = psi.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), v.to_string()]).collect();
    let csv = to_csv(&["n", "psi"], &rows);

    let mut text = String::new();
    let _ = writeln!(text, "mode: {:?}", plan.mode);
    let _ = writeln!(text, "d = {}, a = {}, D = {}", plan.d, plan.a, plan.big_d);
    let _ = writeln!(text, "epsilon = {}", plan.epsilon.to_decimal_string(12));
    let _ = writeln!(text, "lambda = {}", rat_to_string(&plan.lambda_predicted));
    let list: Vec<String> = psi.iter().map(u64::to_string).collect();
    let _ = writeln!(text, "psi = [{}]", list.join(", "));
    let _ = writeln!(
        text,
        "verify over {} terms: min|cos| = {}, psi(N)/N = {:.4}, pass: {}",
        verify.count,
        verify.min_cos.to_decimal_string(12),
        verify.ratio,
        verify.pass
    );

    let failure = (!verify.pass).then(|| CliError::Internal("plan verification failed, see report".into()));
    Ok(Outcome { rendered: Rendered { json: to_json("subseq", &out), csv, text }, failure })
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Generator `theta_i`; repeatable.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub theta: Vec<String>,
    /// Interval `lo:hi` for the matching generator, read mod 1.
    #[arg(long = "box", required = true, allow_hyphen_values = true)]
    pub bounds: Vec<String>,
    /// Orbit length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub kmax: u64,
    #[arg(long, default_value_t = DEFAULT_ANGLE_DIGITS, value_parser = clap::value_parser!(u32).range(10..))]
    pub digits: u32,
}

#[derive(Serialize)]
struct DensityOutput<'a> {
    theta: &'a [String],
    report: &'a DensityReport,
}

fn parse_interval(text: &str) -> Result<(BigRat, BigRat), CliError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("box interval {text:?} is not of the form lo:hi")))?;
    let p = |s: &str| parse_rat(s).map_err(|e| CliError::Usage(e.to_string()));
    Ok((p(lo)?, p(hi)?))
}

pub fn density(args: &DensityArgs) -> Result<Outcome, CliError> {
    let theta = args
        .theta
        .iter()
        .map(|t| parse_angle_expr(t).map(|e| e.eval(args.digits)))
        .collect::<Result<Vec<HighPrecReal>, _>>()?;
    let bounds = args.bounds.iter().map(|b| parse_interval(b)).collect::<Result<Vec<_>, _>>()?;
    let report = kw_density(&theta, &bounds, args.kmax)?;
    let out = DensityOutput { theta: &args.theta, report: &report };
    let predicted = report.predicted.map(|p| p.to_string()).unwrap_or_default();
    let csv = to_csv(
        &["k_max", "hits", "empirical", "predicted"],
        &[vec![report.k_max.to_string(), report.hits.to_string(), report.empirical.to_string(), predicted.clone()]],
    );
    let mut text = String::new();
    let _ = writeln!(text, "hits {} of {}", report.hits, report.k_max);
    let _ = writeln!(text, "empirical density {:.6}", report.empirical);
    match report.predicted {
        Some(p) => {
            let _ = writeln!(text, "predicted density {p:.6}");
        }
        None => {
            let _ = writeln!(text, "predicted density unavailable: orbit is not equidistributed");
        }
    }
    Ok(Outcome { rendered: Rendered { json: to_json("density", &out), csv, text }, failure: None })
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["zudilin", "alpha"])))]
pub struct CriterionArgs {
    /// Use the published growth constants of Zudilin's forms.
    #[arg(long)]
    pub zudilin: bool,
    /// Decay rate of the forms, in (0, 1).
    #[arg(long, requires = "beta")]
    pub alpha: Option<f64>,
    /// Growth rate of the coefficients, greater than 1.
    #[arg(long, requires = "alpha")]
    pub beta: Option<f64>,
    /// Oscillation frequency of the forms' signs; repeatable, defaults to 1.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Vec<String>,
    /// Oscillation phase, matched to `--omega`; defaults to 0.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Vec<String>,
}

#[derive(Serialize)]
struct ZudilinSummary {
    c0: f64,
    c1: f64,
    height_bits: u64,
    kappa_interval: [f64; 2],
    stated_exponent: f64,
}

#[derive(Serialize)]
struct CriterionOutput<'a> {
    source: &'static str,
    alpha: f64,
    beta: f64,
    report: &'a CriterionReport,
    zudilin: Option<ZudilinSummary>,
}

pub fn criterion(args: &CriterionArgs) -> Result<Outcome, CliError> {
    let (g, source) = match (args.zudilin, args.alpha, args.beta) {
        (true, _, _) => (zudilin_constants(), "zudilin"),
        (false, Some(a), Some(b)) => (GrowthData::from_alpha_beta(a, b)?, "alpha_beta"),
        _ => return Err(CliError::Usage("give --zudilin or both --alpha and --beta".into())),
    };
    let (omegas, phis) = if args.omega.is_empty() && args.phi.is_empty() {
        (vec!["1".to_string()], vec!["0".to_string()])
    } else {
        (args.omega.clone(), args.phi.clone())
    };
    if omegas.len() != phis.len() {
        return Err(CliError::Usage(format!("{} values of --omega but {} of --phi", omegas.len(), phis.len())));
    }
    let pairs = omegas
        .iter()
        .zip(&phis)
        .map(|(w, p)| AnglePair::parse(w, p, DEFAULT_ANGLE_DIGITS))
        .collect::<Result<Vec<_>, _>>()?;
    let report = oscillating_report(&g, &pairs)?;
    let zudilin = args.zudilin.then(|| {
        let (lo, hi) = zudilin_kappa_interval();
        ZudilinSummary {
            c0: ZUDILIN_C0,
            c1: ZUDILIN_C1,
            height_bits: ZUDILIN_HEIGHT_BITS,
            kappa_interval: [lo, hi],
            stated_exponent: published_exponent(report.kappa_threshold.unwrap_or(f64::NAN), 2),
        }
    });
    let out = CriterionOutput { source, alpha: g.alpha(), beta: g.beta(), report: &report, zudilin };

    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut rows = vec![
        vec!["hypothesis_ok".to_string(), report.hypothesis_ok.to_string()],
        vec!["dim_lower_bound".to_string(), opt(report.dim_lower_bound)],
        vec!["dim_lower_bound_ceiled".to_string(), report.dim_lower_bound_ceiled.map(|v| v.to_string()).unwrap_or_default()],
        vec!["kappa_threshold".to_string(), opt(report.kappa_threshold)],
        vec!["lambda_used".to_string(), report.lambda_used.clone().unwrap_or_default()],
    ];
    if let Some(z) = &out.zudilin {
        rows.push(vec!["stated_exponent".to_string(), z.stated_exponent.to_string()]);
    }
    let csv = to_csv(&["quantity", "value"], &rows);

    let mut text = String::new();
    let _ = writeln!(text, "ln alpha = {:.9}, ln beta = {:.6}", g.ln_alpha, g.ln_beta);
    let _ = writeln!(text, "oscillation hypothesis holds: {}", report.hypothesis_ok);
    if let (Some(dim), Some(ceiled), Some(kappa)) =
        (report.dim_lower_bound, report.dim_lower_bound_ceiled, report.kappa_threshold)
    {
        let _ = writeln!(text, "dimension of the span over Q >= {dim:.9}, hence >= {ceiled}");
        let _ = writeln!(text, "irrationality exponent threshold kappa = {kappa:.6}");
    }
    if let Some(z) = &out.zudilin {
        let _ = writeln!(text, "kappa over one printed unit of C0, C1: [{:.6}, {:.6}]", z.kappa_interval[0], z.kappa_interval[1]);
        let _ = writeln!(text, "stated exponent: {}", z.stated_exponent);
    }

    let failure = (!report.hypothesis_ok).then(|| CliError::Domain("oscillation hypothesis violated".into()));
    Ok(Outcome { rendered: Rendered { json: to_json("criterion", &out), csv, text }, failure })
}
