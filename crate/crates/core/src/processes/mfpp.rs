use num_complex::Complex64;
use serde::Serialize;

use super::events::{EventTimes, Pmf};
use super::fpp::poisson_pmf;
use super::timechange::{apply_consistent_time_change, ConsistentFunction};
use crate::error::{domain, Error, Result};
use crate::fraccalc::laplace::{talbot, TALBOT_NODES};
use crate::montecarlo;
use crate::params::MixedParams;
use crate::sampling::{sample_mixed_inverse_at, RandomSource};
use crate::specfun::{ml_evaluate, Accuracy};
use crate::stats::{CovarianceEntry, MomentReport};
use crate::subordinate::{inverse_mean, inverse_second_moment};
use crate::subordinate::{invert_path, mixed_inverse_cov, simulate_subordinator};

const OUTER_RATIO: f64 = 1e-14;
const OUTER_MAX_TERMS: usize = 80;
const TERM_ACCURACY: Accuracy = Accuracy { abs: 1e-13, rel: 1e-11 };
/// Error estimate above which the `p_0` series hands over to Laplace inversion.
const P0_SERIES_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_CONVOLUTION_STEPS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Inverse Laplace transform of `s^(rho-1) / (s^alpha + a s^beta + b)` at `t`
/// for `alpha > beta`, as the series
/// `t^(alpha-rho) sum_r (-a)^r t^((alpha-beta) r) E^{r+1}_{alpha, alpha+(alpha-beta) r-rho+1}(-b t^alpha)`.
pub fn inverse_laplace_trinomial(rho: f64, alpha: f64, beta: f64, a: f64, b: f64, t: f64) -> Result<SeriesValue> {
    if !(alpha > beta && beta > 0.0 && a >= 0.0 && b >= 0.0 && t > 0.0) {
        return Err(domain("trinomial inversion needs alpha > beta > 0, a, b >= 0 and t > 0"));
    }
    let gap = alpha - beta;
    let ln_t = t.ln();
    let z = -b * t.powf(alpha);
    let (mut sum, mut error, mut abs_sum) = (0.0, 0.0, 0.0);
    let mut small_run = 0;
    for r in 0..OUTER_MAX_TERMS {
        let rf = r as f64;
        let ln_pref = (alpha - rho) * ln_t + if r == 0 { 0.0 } else { rf * (a.ln() + gap * ln_t) };
        let v = ml_evaluate(alpha, alpha + gap * rf - rho + 1.0, rf + 1.0, z, ln_pref, TERM_ACCURACY)?;
        let term = if r % 2 == 0 { v.value } else { -v.value };
        sum += term;
        abs_sum += term.abs();
        error += v.error;
        if a == 0.0 {
            return Ok(SeriesValue { value: sum, error, terms: 1, converged: true });
        }
        if term.abs() <= OUTER_RATIO * sum.abs().max(f64::MIN_POSITIVE) {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesValue { value: sum, error: error + 1e-15 * abs_sum, terms: r + 1, converged: true });
            }
        } else {
            small_run = 0;
        }
    }
    Ok(SeriesValue { value: sum, error: error + 1e-15 * abs_sum, terms: OUTER_MAX_TERMS, converged: false })
}

fn check(lambda: f64, t: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

/// Time change of a rate-`lambda` Poisson process by a grid path of the
/// inverse mixed subordinator.
pub fn simulate_mfpp(
    params: &MixedParams,
    lambda: f64,
    t_end: f64,
    delta: f64,
    rng: &mut RandomSource,
) -> Result<EventTimes> {
    check(lambda, t_end)?;
    let path = invert_path(&simulate_subordinator(*params, delta, t_end, rng)?);
    apply_consistent_time_change(&ConsistentFunction::linear(lambda)?, &path, t_end, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum P0Method {
    Series,
    /// The double series was not reliable and Talbot inversion was used.
    TalbotFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P0Value {
    pub value: f64,
    pub method: P0Method,
}

fn laplace_p0(params: &MixedParams, lambda: f64, s: Complex64) -> Complex64 {
    let phi = params.laplace_exponent_complex(s);
    phi / (s * (lambda + phi))
}

/// `P(N(t) = 0)` from the double series in three-parameter Mittag-Leffler
/// functions, falling back to Talbot inversion when the series loses accuracy.
pub fn mfpp_p0(params: &MixedParams, lambda: f64, t: f64) -> Result<P0Value> {
    check(lambda, t)?;
    if t == 0.0 {
        return Ok(P0Value { value: 1.0, method: P0Method::Series });
    }
    let (a1, a2, c1, c2) = (params.alpha1(), params.alpha2(), params.c1(), params.c2());
    let (a, b) = (c1 / c2, lambda / c2);
    let series = || -> Result<SeriesValue> {
        let first = inverse_laplace_trinomial(a2, a2, a1, a, b, t)?;
        if c1 == 0.0 {
            return Ok(first);
        }
        let second = inverse_laplace_trinomial(a1, a2, a1, a, b, t)?;
        Ok(SeriesValue {
            value: first.value + a * second.value,
            error: first.error + a * second.error,
            terms: first.terms.max(second.terms),
            converged: first.converged && second.converged,
        })
    };
    match series() {
        Ok(v) if v.converged && v.error <= P0_SERIES_TOLERANCE => {
            Ok(P0Value { value: v.value.clamp(0.0, 1.0), method: P0Method::Series })
        }
        _ => {
            let v = talbot(|s| laplace_p0(params, lambda, s), t, TALBOT_NODES)?;
            Ok(P0Value { value: v.clamp(0.0, 1.0), method: P0Method::TalbotFallback })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MfppPmfMethod {
    /// Talbot inversion of `lambda^k phi(s) / (s (lambda + phi(s))^{k+1})`.
    Talbot { nodes: usize },
    /// `p_k = p_{k-1} * g` by product integration on a uniform grid.
    Convolution { steps: usize },
    /// Average of Poisson probabilities at exact draws of `Y(t)`.
    MonteCarlo { samples: usize, seed: u64, jobs: usize },
}

impl Default for MfppPmfMethod {
    fn default() -> Self {
        MfppPmfMethod::Talbot { nodes: TALBOT_NODES }
    }
}

pub fn mfpp_pmf(params: &MixedParams, lambda: f64, t: f64, k_max: usize, method: MfppPmfMethod) -> Result<Pmf> {
    check(lambda, t)?;
    if t == 0.0 {
        return Ok(Pmf::from_probs(poisson_pmf(0.0, k_max)));
    }
    match method {
        MfppPmfMethod::Talbot { nodes } => pmf_talbot(params, lambda, t, k_max, nodes),
        MfppPmfMethod::Convolution { steps } => pmf_convolution(params, lambda, t, k_max, steps),
        MfppPmfMethod::MonteCarlo { samples, seed, jobs } => {
            pmf_montecarlo(params, lambda, t, k_max, samples, seed, jobs)
        }
    }
}

fn pmf_talbot(params: &MixedParams, lambda: f64, t: f64, k_max: usize, nodes: usize) -> Result<Pmf> {
    let mut probs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let v = talbot(
            |s| {
                let phi = params.laplace_exponent_complex(s);
                let ratio = lambda / (lambda + phi);
                ratio.powu(k as u32) * phi / (s * (lambda + phi))
            },
            t,
            nodes,
        )
        .map_err(|e| Error::InversionFailure(format!("p_{k}: {e}")))?;
        probs.push(v.clamp(0.0, 1.0));
    }
    Ok(Pmf::from_probs(probs))
}

fn pmf_convolution(params: &MixedParams, lambda: f64, t: f64, k_max: usize, steps: usize) -> Result<Pmf> {
    if steps < 2 {
        return Err(domain("the convolution grid needs at least two steps"));
    }
    let (a1, a2, c1, c2) = (params.alpha1(), params.alpha2(), params.c1(), params.c2());
    let (a, b, scale) = (c1 / c2, lambda / c2, lambda / c2);
    let h = t / steps as f64;
    // G = int_0^z g and H = int_0^z G in closed form
    let mut g_int = vec![0.0; steps + 1];
    let mut h_int = vec![0.0; steps + 1];
    for j in 1..=steps {
        let z = j as f64 * h;
        let tri = |rho: f64| -> Result<f64> {
            let v = inverse_laplace_trinomial(rho, a2, a1, a, b, z)?;
            if !v.converged {
                return Err(Error::AccuracyNotAttained(format!("kernel series at z = {z} did not converge")));
            }
            Ok(scale * v.value)
        };
        g_int[j] = tri(0.0)?;
        h_int[j] = tri(-1.0)?;
    }
    // weights of p_{k-1}(t_i - z_j) and p_{k-1}(t_i - z_{j+1}) on cell j,
    // exact for p_{k-1} linear on the cell
    let mut w_left = vec![0.0; steps];
    let mut w_right = vec![0.0; steps];
    for j in 0..steps {
        let first_moment = h * g_int[j + 1] - (h_int[j + 1] - h_int[j]);
        w_right[j] = first_moment / h;
        w_left[j] = g_int[j + 1] - g_int[j] - w_right[j];
    }
    let mut current: Vec<f64> = g_int.iter().map(|g| 1.0 - g).collect();
    let mut probs = vec![current[steps].clamp(0.0, 1.0)];
    for _ in 1..=k_max {
        let mut next = vec![0.0; steps + 1];
        for i in 1..=steps {
            let mut acc = 0.0;
            for j in 0..i {
                acc += w_left[j] * current[i - j] + w_right[j] * current[i - j - 1];
            }
            next[i] = acc;
        }
        current = next;
        probs.push(current[steps].clamp(0.0, 1.0));
    }
    Ok(Pmf::from_probs(probs))
}

fn pmf_montecarlo(
    params: &MixedParams,
    lambda: f64,
    t: f64,
    k_max: usize,
    samples: usize,
    seed: u64,
    jobs: usize,
) -> Result<Pmf> {
    if samples < 2 {
        return Err(Error::InsufficientData("need at least two samples".into()));
    }
    let draws = montecarlo::run(samples, seed, jobs, |_, rng| {
        poisson_pmf(lambda * sample_mixed_inverse_at(params, t, rng), k_max)
    })?;
    let n = samples as f64;
    let mut probs = vec![0.0; k_max + 1];
    let mut errors = vec![0.0; k_max + 1];
    for k in 0..=k_max {
        let mean = draws.iter().map(|d| d[k]).sum::<f64>() / n;
        let var = draws.iter().map(|d| (d[k] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        probs[k] = mean;
        errors[k] = (var / n).sqrt();
    }
    let mut pmf = Pmf::from_probs(probs);
    pmf.standard_errors = Some(errors);
    Ok(pmf)
}

/// Mean and variance at `t` and `Cov(N(t), N(s))`, from the renewal function.
pub fn mfpp_moments(params: &MixedParams, lambda: f64, t: f64, s: f64) -> Result<MomentReport> {
    check(lambda, t)?;
    check(lambda, s)?;
    let u = inverse_mean(*params, t)?;
    let mean = lambda * u;
    let variance = mean + lambda * lambda * (inverse_second_moment(*params, t)? - u * u);
    let cov = lambda * inverse_mean(*params, t.min(s))? + lambda * lambda * mixed_inverse_cov(params, t, s)?;
    Ok(MomentReport::analytic(mean, variance, vec![CovarianceEntry { t: t.into(), s: s.into(), value: cov, se: None }]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Alpha;
    use crate::processes::{fpp_moments, fpp_pmf};
    use crate::specfun::mittag_leffler;

    fn reference() -> MixedParams {
        MixedParams::new(0.5, 0.9, 0.5, 0.5).unwrap()
    }

    #[test]
    fn p0_reductions() {
        let m = reference();
        assert_eq!(mfpp_p0(&m, 1.0, 0.0).unwrap().value, 1.0);
        let stable = MixedParams::new(0.3, 0.7, 0.0, 1.0).unwrap();
        let v = mfpp_p0(&stable, 2.0, 1.5).unwrap();
        assert_eq!(v.method, P0Method::Series);
        assert!((v.value - mittag_leffler(0.7, -2.0 * 1.5f64.powf(0.7)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn p0_series_matches_talbot() {
        let m = reference();
        let series = mfpp_p0(&m, 1.0, 1.0).unwrap();
        assert_eq!(series.method, P0Method::Series);
        let inv = talbot(|s| laplace_p0(&m, 1.0, s), 1.0, TALBOT_NODES).unwrap();
        assert!((series.value - inv).abs() < 1e-9, "{} {inv}", series.value);
    }

    #[test]
    fn talbot_and_convolution_agree() {
        let m = reference();
        let a = mfpp_pmf(&m, 1.0, 1.0, 10, MfppPmfMethod::default()).unwrap();
        let b = mfpp_pmf(&m, 1.0, 1.0, 10, MfppPmfMethod::Convolution { steps: DEFAULT_CONVOLUTION_STEPS }).unwrap();
        for k in 0..=10 {
            assert!((a.probs[k] - b.probs[k]).abs() < 1e-5, "k={k}: {} {}", a.probs[k], b.probs[k]);
        }
        assert!((a.probs[0] - mfpp_p0(&m, 1.0, 1.0).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn stable_reduction_and_normalization() {
        let m = MixedParams::new(0.4, 0.8, 0.0, 1.0).unwrap();
        let a = mfpp_pmf(&m, 1.5, 2.0, 40, MfppPmfMethod::default()).unwrap();
        let b = fpp_pmf(Alpha::new(0.8).unwrap(), 1.5, 2.0, 40).unwrap();
        for k in 0..=40 {
            assert!((a.probs[k] - b.probs[k]).abs() < 1e-6);
        }
        assert!(a.tail_mass.abs() < 1e-6);
        let r = mfpp_moments(&m, 1.5, 2.0, 1.0).unwrap();
        let q = fpp_moments(Alpha::new(0.8).unwrap(), 1.5, 2.0, 1.0).unwrap();
        assert!((r.mean - q.mean).abs() < 1e-10);
        assert!((r.variance - q.variance).abs() < 1e-8);
        assert!((r.cov[0].value - q.cov[0].value).abs() < 1e-6);
    }

    #[test]
    fn montecarlo_within_standard_errors() {
        let m = reference();
        let a = mfpp_pmf(&m, 1.0, 1.0, 6, MfppPmfMethod::default()).unwrap();
        let c = mfpp_pmf(&m, 1.0, 1.0, 6, MfppPmfMethod::MonteCarlo { samples: 20_000, seed: 3, jobs: 0 }).unwrap();
        let se = c.standard_errors.unwrap();
        for k in 0..=6 {
            assert!((a.probs[k] - c.probs[k]).abs() < 4.0 * se[k] + 1e-12, "k={k}");
        }
    }
}
