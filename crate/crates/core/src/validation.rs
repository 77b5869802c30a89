//! Validation suites: every simulator and evaluator checked against the
//! closed-form results it should reproduce. Each suite returns one
//! [`SuiteEntry`] per check; statistical checks run at level
//! [`DEFAULT_LEVEL`] and moment matches at [`SE_LIMIT`] standard errors.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::fields::{
    fprf_moments, fprf_moments_closed_form, fprf_pmf_mc, gergely_yezhov_counts, reparametrize_to_standard,
    simulate_fprf, trace_compensator, trace_events, CellLaw, IncreasingPath,
};
use crate::fraccalc::{
    eigenfunction_residual, fde_residual_fpp, fde_residual_fprf, fde_residual_mfpp, FieldResidualConfig, ResidualGrid,
    ResidualReport,
};
use crate::montecarlo;
use crate::params::{Alpha, MixedParams};
use crate::processes::{
    fpp_moments, fpp_pmf, mfpp_p0, mfpp_pmf, poisson_pmf, simulate_fpp_renewal, simulate_fpp_timechange, simulate_mfpp,
    MfppPmfMethod, DEFAULT_CONVOLUTION_STEPS,
};
use crate::sampling::sample_inverse_at;
use crate::specfun::{inverse_stable_density, mittag_leffler, mittag_leffler2};
use crate::stats::{
    chi_square_gof, chi_square_two_sample, ks_test, martingale_diagnostic, mc_moments, mean_and_se, SuiteEntry,
    DEFAULT_LEVEL,
};
use crate::subordinate::{inverse_mean, inverse_second_moment, DEFAULT_DELTA};

/// Moment matches pass within this many standard errors.
pub const SE_LIMIT: f64 = 4.0;

const PATHS: usize = 10_000;

/// The validation suites, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SpecialFunctions,
    ClassicalLimit,
    InverseMoments,
    FppSecondOrder,
    FppConstructions,
    MfppConsistency,
    FprfMoments,
    GoverningEquations,
    Records,
    TimeChange,
    Martingale,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::SpecialFunctions,
        Suite::ClassicalLimit,
        Suite::InverseMoments,
        Suite::FppSecondOrder,
        Suite::FppConstructions,
        Suite::MfppConsistency,
        Suite::FprfMoments,
        Suite::GoverningEquations,
        Suite::Records,
        Suite::TimeChange,
        Suite::Martingale,
        Suite::Determinism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SpecialFunctions => "special-functions",
            Suite::ClassicalLimit => "classical-limit",
            Suite::InverseMoments => "inverse-moments",
            Suite::FppSecondOrder => "fpp-second-order",
            Suite::FppConstructions => "fpp-constructions",
            Suite::MfppConsistency => "mfpp-consistency",
            Suite::FprfMoments => "fprf-moments",
            Suite::GoverningEquations => "governing-equations",
            Suite::Records => "records",
            Suite::TimeChange => "time-change",
            Suite::Martingale => "martingale",
            Suite::Determinism => "determinism",
        }
    }

    /// Whether the suite draws random numbers.
    pub fn is_stochastic(self) -> bool {
        !matches!(self, Suite::SpecialFunctions | Suite::GoverningEquations | Suite::Determinism)
    }

    /// Runs the suite. `Determinism` reruns every stochastic suite on one
    /// worker and on `jobs.max(2)` workers and compares the serialized reports.
    pub fn run(self, seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
        match self {
            Suite::SpecialFunctions => special_functions(seed),
            Suite::ClassicalLimit => classical_limit(seed, jobs),
            Suite::InverseMoments => inverse_moments(seed, jobs),
            Suite::FppSecondOrder => fpp_second_order(seed, jobs),
            Suite::FppConstructions => fpp_constructions(seed, jobs),
            Suite::MfppConsistency => mfpp_consistency(seed, jobs),
            Suite::FprfMoments => fprf_moments_suite(seed, jobs),
            Suite::GoverningEquations => governing_equations(seed, jobs),
            Suite::Records => records(seed, jobs),
            Suite::TimeChange => time_change(seed, jobs),
            Suite::Martingale => martingale(seed, jobs),
            Suite::Determinism => {
                let mut out = Vec::new();
                for suite in Suite::ALL.into_iter().filter(|s| s.is_stochastic()) {
                    out.push(determinism_entry(suite, seed, jobs)?);
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite {s:?}; expected all or one of {}", suite_names())))
    }
}

fn suite_names() -> String {
    Suite::ALL.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
}

/// Runs `name`, or every suite for `"all"`.
pub fn run_named(name: &str, seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    if name == "all" {
        let mut out = Vec::new();
        for suite in Suite::ALL {
            out.extend(suite.run(seed, jobs)?);
        }
        return Ok(out);
    }
    name.parse::<Suite>()?.run(seed, jobs)
}

/// Runs a stochastic suite on one worker and on `jobs.max(2)` workers; passes
/// when the two JSON reports are byte-identical.
pub fn determinism_entry(suite: Suite, seed: u64, jobs: usize) -> Result<SuiteEntry> {
    let single = serde_json::to_string(&suite.run(seed, 1)?)?;
    let parallel = serde_json::to_string(&suite.run(seed, jobs.max(2))?)?;
    let name = format!("determinism/{}", suite.name());
    Ok(SuiteEntry::from_flag(name, single.len() as f64, single == parallel, seed))
}

fn alpha(v: f64) -> Alpha {
    Alpha::new(v).expect("suite parameters are valid")
}

fn relative_error(value: f64, expected: f64) -> f64 {
    (value - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
}

/// `e^{x^2} erfc(x)`, by the continued fraction for large `x`.
fn scaled_erfc(x: f64) -> f64 {
    if x < 2.0 {
        return (x * x).exp() * statrs::function::erf::erfc(x);
    }
    let mut f = 0.0;
    for k in (1..=60).rev() {
        f = (k as f64 / 2.0) / (x + f);
    }
    1.0 / ((x + f) * std::f64::consts::PI.sqrt())
}

fn special_functions(seed: u64) -> Result<Vec<SuiteEntry>> {
    let mut out = vec![SuiteEntry::from_error("ml/E1(1)=e", (mittag_leffler(1.0, 1.0)? - E).abs(), 1e-12, seed)];
    for x in [0.25, 1.0, 4.0] {
        let err = (mittag_leffler(0.5, -x)? - scaled_erfc(x)).abs();
        out.push(SuiteEntry::from_error(format!("ml/E_half(-{x})"), err, 1e-9, seed));
    }
    let mut worst: f64 = 0.0;
    for t in [0.25f64, 0.5, 1.0, 2.0, 4.0] {
        for x in [0.1f64, 0.5, 1.0, 2.0, 3.0] {
            let exact = (-x * x / (4.0 * t)).exp() / (std::f64::consts::PI * t).sqrt();
            worst = worst.max((inverse_stable_density(alpha(0.5), t, x)? - exact).abs());
        }
    }
    out.push(SuiteEntry::from_error("density/inverse_half_grid", worst, 1e-8, seed));
    let err = (mittag_leffler2(1.0, 2.0, 1.0)? - (E - 1.0)).abs();
    out.push(SuiteEntry::from_error("ml/E_1_2(1)=e-1", err, 1e-12, seed));
    Ok(out)
}

fn counts_at(paths: &[Vec<u64>], i: usize) -> Vec<u64> {
    paths.iter().map(|p| p[i]).collect()
}

fn classical_limit(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let (lambda, t) = (2.0, 1.0);
    let poisson = poisson_pmf(lambda * t, 25);
    let analytic = fpp_pmf(alpha(1.0), lambda, t, 25)?;
    let err = analytic.probs.iter().zip(&poisson).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut out = vec![SuiteEntry::from_error("fpp_pmf/alpha=1", err, 1e-10, seed)];
    let near = alpha(0.999);
    let renewal =
        montecarlo::try_run(PATHS, seed, jobs, |_, rng| Ok(simulate_fpp_renewal(near, lambda, t, rng)?.count_at(t)))?;
    out.push(SuiteEntry::from_test("renewal/alpha=0.999", &chi_square_gof(&renewal, &poisson, DEFAULT_LEVEL)?, seed));
    let timechange = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        Ok(simulate_fpp_timechange(near, lambda, t, DEFAULT_DELTA, rng)?.0.count_at(t))
    })?;
    out.push(SuiteEntry::from_test(
        "timechange/alpha=0.999",
        &chi_square_gof(&timechange, &poisson, DEFAULT_LEVEL)?,
        seed,
    ));
    let mixed = MixedParams::new(0.998, 0.999, 0.5, 0.5)?;
    let mfpp = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        Ok(simulate_mfpp(&mixed, lambda, t, DEFAULT_DELTA, rng)?.count_at(t))
    })?;
    out.push(SuiteEntry::from_test("mfpp/alpha=0.998,0.999", &chi_square_gof(&mfpp, &poisson, DEFAULT_LEVEL)?, seed));
    let (field_lambda, window) = (5.0, 1.0);
    let fields = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        Ok(simulate_fprf(near, near, field_lambda, window, 1e-3, CellLaw::Poisson, rng)?
            .points
            .count_in(window, window))
    })?;
    let field_pmf = poisson_pmf(field_lambda * window * window, 25);
    out.push(SuiteEntry::from_test("fprf/alpha=0.999", &chi_square_gof(&fields, &field_pmf, DEFAULT_LEVEL)?, seed));
    let field_exact = fprf_pmf_mc(alpha(1.0), alpha(1.0), 3.0, 1.5, 2.0, 20, 10, seed, jobs)?;
    let err = field_exact.probs.iter().zip(poisson_pmf(9.0, 20)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(SuiteEntry::from_error("fprf_pmf/alpha=1", err, 1e-10, seed));
    Ok(out)
}

fn inverse_moments(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let mut out = Vec::new();
    for (i, a) in [0.5, 0.75, 0.9].into_iter().enumerate() {
        for (j, t) in [1.0, 5.0].into_iter().enumerate() {
            let stream_seed = seed.wrapping_add((2 * i + j) as u64 * 1_000_003);
            let draws = montecarlo::run(100_000, stream_seed, jobs, |_, rng| sample_inverse_at(alpha(a), t, rng))?;
            let (m1, se1) = mean_and_se(&draws);
            let squares: Vec<f64> = draws.iter().map(|x| x * x).collect();
            let (m2, se2) = mean_and_se(&squares);
            let name = |k: &str| format!("inverse/{k}/alpha={a}/t={t}");
            out.push(SuiteEntry::from_estimate(
                name("mean"),
                m1,
                se1,
                inverse_mean(alpha(a), t)?,
                SE_LIMIT,
                stream_seed,
            ));
            out.push(SuiteEntry::from_estimate(
                name("second_moment"),
                m2,
                se2,
                inverse_second_moment(alpha(a), t)?,
                SE_LIMIT,
                stream_seed,
            ));
        }
    }
    Ok(out)
}

fn fpp_second_order(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let (a, lambda) = (alpha(0.75), 2.0);
    let samples = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        let (events, _) = simulate_fpp_timechange(a, lambda, 2.0, DEFAULT_DELTA, rng)?;
        Ok(vec![events.count_at(1.0) as f64, events.count_at(2.0) as f64])
    })?;
    let mc = mc_moments(&samples, &[1.0, 2.0])?;
    let exact = fpp_moments(a, lambda, 1.0, 2.0)?;
    let se = mc.se.expect("sample report");
    let cov = |r: &crate::stats::MomentReport| *r.covariance(1.0, 2.0).expect("covariance entry");
    Ok(vec![
        SuiteEntry::from_estimate("fpp/mean(1)", mc.mean, se.mean, exact.mean, SE_LIMIT, seed),
        SuiteEntry::from_estimate("fpp/var(1)", mc.variance, se.var, exact.variance, SE_LIMIT, seed),
        SuiteEntry::from_estimate(
            "fpp/cov(1,2)",
            cov(&mc).value,
            cov(&mc).se.expect("sample se"),
            cov(&exact).value,
            SE_LIMIT,
            seed,
        ),
    ])
}

fn fpp_constructions(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let (a, lambda) = (alpha(0.75), 2.0);
    let times = [0.5, 1.0, 5.0];
    let renewal = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        let e = simulate_fpp_renewal(a, lambda, 5.0, rng)?;
        Ok(times.iter().map(|&t| e.count_at(t)).collect::<Vec<_>>())
    })?;
    let other_seed = seed.wrapping_add(1);
    let timechange = montecarlo::try_run(PATHS, other_seed, jobs, |_, rng| {
        let (e, _) = simulate_fpp_timechange(a, lambda, 5.0, DEFAULT_DELTA, rng)?;
        Ok(times.iter().map(|&t| e.count_at(t)).collect::<Vec<_>>())
    })?;
    let mut out = Vec::new();
    for (i, t) in times.into_iter().enumerate() {
        let test = chi_square_two_sample(&counts_at(&renewal, i), &counts_at(&timechange, i), DEFAULT_LEVEL)?;
        out.push(SuiteEntry::from_test(format!("renewal_vs_timechange/t={t}"), &test, seed));
    }
    Ok(out)
}

fn mfpp_consistency(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let params = MixedParams::new(0.5, 0.9, 0.5, 0.5)?;
    let (lambda, t, k_max) = (1.0, 1.0, 10);
    let talbot = mfpp_pmf(&params, lambda, t, k_max, MfppPmfMethod::default())?;
    let convolution =
        mfpp_pmf(&params, lambda, t, k_max, MfppPmfMethod::Convolution { steps: DEFAULT_CONVOLUTION_STEPS })?;
    let mc = mfpp_pmf(&params, lambda, t, k_max, MfppPmfMethod::MonteCarlo { samples: 100_000, seed, jobs })?;
    let pair = talbot.probs.iter().zip(&convolution.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let se = mc.standard_errors.as_ref().expect("Monte Carlo standard errors");
    let worst_z = (0..=k_max)
        .map(|k| {
            let diff = mc.probs[k] - talbot.probs[k];
            if se[k] > 0.0 {
                diff / se[k]
            } else if diff.abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    let p0 = mfpp_p0(&params, lambda, t)?;
    Ok(vec![
        SuiteEntry::from_error("mfpp/talbot_vs_convolution", pair, 1e-5, seed),
        SuiteEntry::from_z("mfpp/monte_carlo_vs_talbot(max z)", worst_z, SE_LIMIT, seed),
        SuiteEntry::from_error("mfpp/p0_series_vs_talbot", (p0.value - talbot.probs[0]).abs(), 1e-6, seed),
    ])
}

fn fprf_moments_suite(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let (a1, a2, lambda, window) = (alpha(0.9), alpha(0.75), 20.0, 1.0);
    let corner = (window, window);
    let inner = (0.5, 0.7);
    let samples = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        let field = simulate_fprf(a1, a2, lambda, window, 1e-3, CellLaw::Poisson, rng)?;
        Ok(vec![field.points.count_in(corner.0, corner.1) as f64, field.points.count_in(inner.0, inner.1) as f64])
    })?;
    let mc = mc_moments(&samples, &[corner, inner])?;
    let exact = fprf_moments(a1, a2, lambda, corner, inner)?;
    let se = mc.se.expect("sample report");
    let mc_cov = *mc.covariance(corner, inner).expect("covariance entry");
    let exact_cov = exact.covariance(corner, inner).expect("covariance entry").value;
    let mut out = vec![
        SuiteEntry::from_estimate("fprf/mean", mc.mean, se.mean, exact.mean, SE_LIMIT, seed),
        SuiteEntry::from_estimate("fprf/var", mc.variance, se.var, exact.variance, SE_LIMIT, seed),
        SuiteEntry::from_estimate("fprf/cov", mc_cov.value, mc_cov.se.expect("sample se"), exact_cov, SE_LIMIT, seed),
    ];
    let mut worst: f64 = 0.0;
    for (t, s) in
        [((1.0, 1.0), (1.0, 1.0)), ((1.0, 1.0), (0.5, 0.7)), ((2.0, 0.3), (0.4, 3.0)), ((5.0, 5.0), (2.0, 4.0))]
    {
        let engine = fprf_moments(a1, a2, lambda, t, s)?;
        let closed = fprf_moments_closed_form(a1, a2, lambda, t, s)?;
        worst = worst
            .max(relative_error(engine.mean, closed.mean))
            .max(relative_error(engine.variance, closed.variance))
            .max(relative_error(engine.cov[0].value, closed.cov[0].value));
    }
    out.push(SuiteEntry::from_error("fprf/engine_vs_closed_form", worst, 1e-10, seed));
    Ok(out)
}

fn residual_entries(name: &str, report: &ResidualReport, seed: u64) -> Vec<SuiteEntry> {
    let mut out = vec![SuiteEntry::from_flag(format!("{name}/residual"), report.max_residual, report.pass, seed)];
    if let (Some(coarse), Some(fine)) = (report.error_model.constant, report.error_model.fine_constant) {
        // halving the step moves the fitted constant by at most the order slack
        let drift = (fine / coarse).log2().abs();
        out.push(SuiteEntry::from_error(
            format!("{name}/constant_drift"),
            drift,
            crate::fraccalc::residual::ORDER_SLACK,
            seed,
        ));
    }
    out
}

fn governing_equations(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let mut out = Vec::new();
    let fpp_grid = ResidualGrid::new(5e-4, 0.25, 2.0)?;
    out.extend(residual_entries("fpp/alpha=0.5", &fde_residual_fpp(alpha(0.5), 1.0, fpp_grid, 5, jobs)?, seed));
    let classical = fde_residual_fpp(alpha(1.0), 1.0, ResidualGrid::new(1e-3, 0.05, 2.0)?, 5, jobs)?;
    out.push(SuiteEntry::from_error("fpp/alpha=1", classical.max_residual, 1e-6, seed));
    let eigen = eigenfunction_residual(alpha(0.6), -1.0, ResidualGrid::new(1e-3, 0.25, 1.0)?)?;
    let measured = eigen.error_model.measured_order.expect("three-step regression");
    out.push(SuiteEntry::from_flag("eigenfunction/alpha=0.6/order", measured, measured >= 2.0 - 0.6 - 0.15, seed));
    let mixed = MixedParams::new(0.5, 0.9, 0.5, 0.5)?;
    let mfpp = fde_residual_mfpp(&mixed, 1.0, ResidualGrid::new(1e-3, 0.25, 1.0)?, 5, jobs)?;
    out.extend(residual_entries("mfpp/0.5,0.9", &mfpp, seed));
    let cfg = FieldResidualConfig { cells: 50, t_max: 2.0, k_max: 5, n_mc: 1, seed, jobs };
    let field = fde_residual_fprf(alpha(1.0), alpha(1.0), 1.0, cfg)?;
    out.push(SuiteEntry::from_error("fprf/classical_identity", field.max_residual, 1e-6, seed));
    Ok(out)
}

fn records(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let grid = [0.5, 1.0, 2.0];
    let counts = montecarlo::try_run(PATHS, seed, jobs, |_, rng| gergely_yezhov_counts(|t| t, &grid, rng))?;
    let mut out = Vec::new();
    for (i, t) in grid.into_iter().enumerate() {
        let test = chi_square_gof(&counts_at(&counts, i), &poisson_pmf(t, 20), DEFAULT_LEVEL)?;
        out.push(SuiteEntry::from_test(format!("records/identity/t={t}"), &test, seed));
    }
    // the record construction needs about e^m draws to reach level m, so the
    // field rate is kept small
    let (a1, a2, lambda) = (alpha(0.8), alpha(0.7), 2.0);
    let path = IncreasingPath::diagonal(1.0)?;
    let eval_times = [0.5, 1.0];
    let pairs = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
        let field = simulate_fprf(a1, a2, lambda, 1.0, 1e-3, CellLaw::Poisson, rng)?;
        let trace = trace_events(&field.points, &path)?;
        let recs = gergely_yezhov_counts(|t| trace_compensator(&field, &path, lambda, t), &eval_times, rng)?;
        Ok((eval_times.map(|t| trace.count_at(t)), recs))
    })?;
    for (i, t) in eval_times.into_iter().enumerate() {
        let traced: Vec<u64> = pairs.iter().map(|p| p.0[i]).collect();
        let recorded: Vec<u64> = pairs.iter().map(|p| p.1[i]).collect();
        let test = chi_square_two_sample(&recorded, &traced, DEFAULT_LEVEL)?;
        out.push(SuiteEntry::from_test(format!("records/fprf_diagonal/t={t}"), &test, seed));
    }
    Ok(out)
}

/// Gaps taken per field; with the horizon below, fewer than this many events
/// occur with probability under `1e-12`.
const GAPS_PER_FIELD: usize = 5;
const UNIT_HORIZON: f64 = 40.0;
const MIN_FIELDS_USED: usize = 500;

fn time_change(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let (a1, a2, lambda, window) = (alpha(0.8), alpha(0.7), 200.0, 2.0);
    let path = IncreasingPath::diagonal(window)?;
    // Fields whose compensator stays below the horizon are skipped: the
    // compensator depends only on the inverse paths, which are independent of
    // the operational Poisson field, so the skip does not bias the gaps.
    let per_field = montecarlo::try_run(1000, seed, jobs, |_, rng| {
        let field = simulate_fprf(a1, a2, lambda, window, 1e-3, CellLaw::Poisson, rng)?;
        if trace_compensator(&field, &path, lambda, window) < UNIT_HORIZON {
            return Ok(None);
        }
        let unit = reparametrize_to_standard(&field, &path, lambda, UNIT_HORIZON)?;
        let mut gaps = Vec::with_capacity(GAPS_PER_FIELD);
        let mut prev = 0.0;
        for &s in unit.times.iter().take(GAPS_PER_FIELD) {
            gaps.push(s - prev);
            prev = s;
        }
        Ok(Some(gaps))
    })?;
    let used = per_field.iter().flatten().count();
    let gaps: Vec<f64> = per_field.into_iter().flatten().flatten().collect();
    let test = ks_test(&gaps, |x| -(-x).exp_m1(), DEFAULT_LEVEL)?;
    Ok(vec![
        SuiteEntry::from_test("time_change/exponential_gaps", &test, seed),
        SuiteEntry::from_flag("time_change/fields_used", used as f64, used >= MIN_FIELDS_USED, seed),
    ])
}

fn martingale(seed: u64, jobs: usize) -> Result<Vec<SuiteEntry>> {
    let (lambda, s, t, bins) = (2.0, 1.0, 2.0, 5);
    let mut out = Vec::new();
    for a in [0.75, 1.0] {
        let paths = montecarlo::try_run(PATHS, seed, jobs, |_, rng| {
            simulate_fpp_timechange(alpha(a), lambda, t, DEFAULT_DELTA, rng)
        })?;
        let report = martingale_diagnostic(&paths, lambda, s, t, bins, DEFAULT_LEVEL)?;
        out.push(SuiteEntry::from_flag(format!("martingale/alpha={a}"), report.combined.statistic, report.pass, seed));
        if a < 1.0 {
            let wrong = martingale_diagnostic(&paths, 1.5 * lambda, s, t, bins, DEFAULT_LEVEL)?;
            out.push(SuiteEntry::from_flag(
                format!("martingale/alpha={a}/wrong_compensator_rejected"),
                wrong.combined.statistic,
                !wrong.pass,
                seed,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn scaled_erfc_branches_agree() {
        let x: f64 = 2.0;
        let direct = (x * x).exp() * statrs::function::erf::erfc(x);
        assert!((scaled_erfc(2.0) - direct).abs() < 1e-10);
    }

    #[test]
    fn special_functions_pass() {
        let entries = special_functions(0).unwrap();
        assert!(entries.iter().all(|e| e.pass), "{entries:?}");
    }
}
