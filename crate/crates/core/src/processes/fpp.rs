use num_complex::Complex64;
use serde::Serialize;

use super::events::{EventTimes, Pmf};
use super::timechange::{apply_consistent_time_change, ConsistentFunction};
use crate::error::{domain, Error, Result};
use crate::fraccalc::laplace::{talbot, TALBOT_NODES};
use crate::montecarlo;
use crate::params::Alpha;
use crate::sampling::{sample_inverse_at, sample_ml_waiting_time, RandomSource};
use crate::specfun::gamma::ln_gamma;
use crate::specfun::{ml_evaluate, Accuracy};
use crate::stats::{CovarianceEntry, MomentReport};
use crate::subordinate::{inverse_cov, inverse_mean, inverse_second_moment};
use crate::subordinate::{invert_path, simulate_subordinator, InversePath};

/// Per-`k` target for `p_k`: absolute for tiny probabilities, relative otherwise.
const PMF_ACCURACY: Accuracy = Accuracy { abs: 1e-10, rel: 1e-9 };

/// Second node count of the inversion fallback, for its error estimate.
const TALBOT_CHECK_NODES: usize = 36;

fn check_rate(lambda: f64, t_end: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(domain(format!("horizon must be positive, got {t_end}")));
    }
    Ok(())
}

/// Renewal construction: partial sums of Mittag-Leffler waiting times.
pub fn simulate_fpp_renewal(alpha: Alpha, lambda: f64, t_end: f64, rng: &mut RandomSource) -> Result<EventTimes> {
    check_rate(lambda, t_end)?;
    let mut events = EventTimes::empty(t_end);
    let mut t = sample_ml_waiting_time(alpha, lambda, rng);
    while t <= t_end {
        events.push(t)?;
        t += sample_ml_waiting_time(alpha, lambda, rng);
    }
    Ok(events)
}

/// Time-change construction `N(Y(t))`: a grid path of the inverse stable
/// subordinator with step `delta`, then a rate-`lambda` Poisson process on its
/// scale mapped back to calendar time.
pub fn simulate_fpp_timechange(
    alpha: Alpha,
    lambda: f64,
    t_end: f64,
    delta: f64,
    rng: &mut RandomSource,
) -> Result<(EventTimes, InversePath)> {
    check_rate(lambda, t_end)?;
    let path = invert_path(&simulate_subordinator(alpha, delta, t_end, rng)?);
    let events = apply_consistent_time_change(&ConsistentFunction::linear(lambda)?, &path, t_end, rng)?;
    Ok((events, path))
}

/// `e^{-m} m^k / k!` for `k = 0..=k_max`.
pub fn poisson_pmf(mean: f64, k_max: usize) -> Vec<f64> {
    (0..=k_max)
        .map(|k| {
            if mean == 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            (k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)).exp()
        })
        .collect()
}

/// `p_k(t) = x^k E^{k+1}_{alpha, alpha k + 1}(-x)` with `x = lambda t^alpha`.
pub fn fpp_pmf(alpha: Alpha, lambda: f64, t: f64, k_max: usize) -> Result<Pmf> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("time must be nonnegative, got {t}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    let a = alpha.value();
    let x = lambda * t.powf(a);
    if t == 0.0 || alpha.is_classical() {
        return Ok(Pmf::from_probs(poisson_pmf(x, k_max)));
    }
    let mut probs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let kf = k as f64;
        let p = match ml_evaluate(a, a * kf + 1.0, kf + 1.0, -x, kf * x.ln(), PMF_ACCURACY) {
            Ok(v) => v.value,
            Err(Error::AccuracyNotAttained(e)) => {
                pmf_by_inversion(a, lambda, t, k).map_err(|_| Error::AccuracyNotAttained(format!("p_{k}: {e}")))?
            }
            Err(e) => return Err(e),
        };
        probs.push(p.clamp(0.0, 1.0));
    }
    Ok(Pmf::from_probs(probs))
}

/// `p_k(t)` by Talbot inversion of `lambda^k s^(alpha-1) / (lambda + s^alpha)^(k+1)`.
/// Used where both Mittag-Leffler regimes cancel (large `k` with `alpha` near
/// one); the change between [`TALBOT_NODES`] and [`TALBOT_CHECK_NODES`] is the
/// error estimate.
fn pmf_by_inversion(alpha: f64, lambda: f64, t: f64, k: usize) -> Result<f64> {
    let kf = k as f64;
    let transform =
        |s: Complex64| (kf * lambda.ln() + (alpha - 1.0) * s.ln() - (kf + 1.0) * (s.powf(alpha) + lambda).ln()).exp();
    let value = talbot(transform, t, TALBOT_NODES)?;
    let error = (talbot(transform, t, TALBOT_CHECK_NODES)? - value).abs();
    if !PMF_ACCURACY.meets(value, error) {
        return Err(Error::AccuracyNotAttained(format!("p_{k} by inversion has error {error:e}")));
    }
    Ok(value)
}

/// Mean and variance at `t` and `Cov(N(t), N(s))`.
pub fn fpp_moments(alpha: Alpha, lambda: f64, t: f64, s: f64) -> Result<MomentReport> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(domain("times must be nonnegative"));
    }
    let mean = lambda * inverse_mean(alpha, t)?;
    let m1 = inverse_mean(alpha, t)?;
    let variance = mean + lambda * lambda * (inverse_second_moment(alpha, t)? - m1 * m1);
    let cov = lambda * inverse_mean(alpha, t.min(s))? + lambda * lambda * inverse_cov(alpha, t, s)?;
    Ok(MomentReport::analytic(mean, variance, vec![CovarianceEntry { t: t.into(), s: s.into(), value: cov, se: None }]))
}

/// Hurst index `alpha`: the variance grows like `t^{2 alpha}`.
pub fn fpp_hurst(alpha: Alpha) -> Result<f64> {
    if alpha.is_classical() {
        return Err(domain("the Hurst index is defined for alpha < 1"));
    }
    Ok(alpha.value())
}

#[derive(Debug, Clone, Serialize)]
pub struct HurstEstimate {
    pub estimate: f64,
    pub times: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Half the slope of `log Var N(t)` against `log t` over a log-spaced grid in
/// `[10, 1000]`, from `samples` exact draws of `N(t) = N(Y(t))` per time.
pub fn fpp_hurst_mc(alpha: Alpha, lambda: f64, samples: usize, seed: u64, jobs: usize) -> Result<HurstEstimate> {
    check_rate(lambda, 1.0)?;
    if samples < 2 {
        return Err(Error::InsufficientData("need at least two samples".into()));
    }
    let times: Vec<f64> = (0..=8).map(|i| 10f64.powf(1.0 + 0.25 * i as f64)).collect();
    let draws = montecarlo::run(samples, seed, jobs, |_, rng| {
        times
            .iter()
            .map(|&t| {
                let y = sample_inverse_at(alpha, t, rng);
                rng.poisson(lambda * y) as f64
            })
            .collect::<Vec<_>>()
    })?;
    let variances: Vec<f64> = (0..times.len())
        .map(|j| {
            let n = samples as f64;
            let m = draws.iter().map(|d| d[j]).sum::<f64>() / n;
            draws.iter().map(|d| (d[j] - m).powi(2)).sum::<f64>() / (n - 1.0)
        })
        .collect();
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / xs.len() as f64, ys.iter().sum::<f64>() / ys.len() as f64);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(HurstEstimate { estimate: 0.5 * sxy / sxx, times, variances })
}
