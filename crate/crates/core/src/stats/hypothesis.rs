use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Level used by the validation suites.
pub const DEFAULT_LEVEL: f64 = 0.01;

const MIN_SAMPLES: usize = 100;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    #[serde(rename = "p")]
    pub p_value: f64,
    pub n: usize,
    pub level: f64,
    pub pass: bool,
}

impl TestResult {
    pub fn new(statistic: f64, p_value: f64, n: usize, level: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self { statistic, p_value, n, level, pass: p_value > level }
    }
}

/// One line of a JSON suite report. Deterministic checks carry no p-value;
/// their statistic is the error compared against the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    pub statistic: f64,
    pub p: Option<f64>,
    pub pass: bool,
    pub seed: u64,
}

impl SuiteEntry {
    pub fn from_test(name: impl Into<String>, result: &TestResult, seed: u64) -> Self {
        Self { name: name.into(), statistic: result.statistic, p: Some(result.p_value), pass: result.pass, seed }
    }

    /// A z-score held to `|z| <= limit`, with its two-sided normal p-value.
    pub fn from_z(name: impl Into<String>, z: f64, limit: f64, seed: u64) -> Self {
        let p = if z.is_finite() { 2.0 * Normal::new(0.0, 1.0).expect("unit normal").sf(z.abs()) } else { 0.0 };
        Self { name: name.into(), statistic: z, p: Some(p), pass: z.abs() <= limit, seed }
    }

    /// `|estimate - expected|` in units of the standard error, held to `limit`.
    pub fn from_estimate(
        name: impl Into<String>,
        estimate: f64,
        se: f64,
        expected: f64,
        limit: f64,
        seed: u64,
    ) -> Self {
        let diff = estimate - expected;
        let z = if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self::from_z(name, z, limit, seed)
    }

    /// A deterministic error held to `error <= tolerance`.
    pub fn from_error(name: impl Into<String>, error: f64, tolerance: f64, seed: u64) -> Self {
        Self { name: name.into(), statistic: error, p: None, pass: error <= tolerance, seed }
    }

    /// A check that either held or did not, like a rejection that must occur.
    pub fn from_flag(name: impl Into<String>, statistic: f64, pass: bool, seed: u64) -> Self {
        Self { name: name.into(), statistic, p: None, pass, seed }
    }
}

fn require(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(())
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // theta-function form, fast for small arguments
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        return (1.0 - (std::f64::consts::TAU).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let sn = effective_n.sqrt();
    kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, level: f64) -> Result<TestResult> {
    require(samples.len())?;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    Ok(TestResult::new(d, ks_p_value(d, n), xs.len(), level))
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<TestResult> {
    require(a.len().min(b.len()))?;
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok(TestResult::new(d, ks_p_value(d, ne), xa.len() + xb.len(), level))
}

/// Merges adjacent bins from the left until each reaches `MIN_EXPECTED`
/// expected counts; a short remainder joins the last complete bin.
/// `expected` drives the rule, `observed` rows follow it.
pub fn pool_bins(expected: &[f64], observed: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut exp_out: Vec<f64> = Vec::new();
    let mut obs_out: Vec<Vec<f64>> = vec![Vec::new(); observed.len()];
    let mut acc_e = 0.0;
    let mut acc_o = vec![0.0; observed.len()];
    for k in 0..expected.len() {
        acc_e += expected[k];
        for (r, row) in observed.iter().enumerate() {
            acc_o[r] += row[k];
        }
        if acc_e >= MIN_EXPECTED {
            exp_out.push(acc_e);
            for r in 0..observed.len() {
                obs_out[r].push(acc_o[r]);
                acc_o[r] = 0.0;
            }
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o.iter().any(|&o| o > 0.0) {
        if let Some(last) = exp_out.last_mut() {
            *last += acc_e;
            for r in 0..observed.len() {
                *obs_out[r].last_mut().unwrap() += acc_o[r];
            }
        } else {
            exp_out.push(acc_e);
            for r in 0..observed.len() {
                obs_out[r].push(acc_o[r]);
            }
        }
    }
    (exp_out, obs_out)
}

fn chi_square_p(stat: f64, df: usize) -> f64 {
    ChiSquared::new(df as f64).map(|d| d.sf(stat)).unwrap_or(f64::NAN)
}

fn histogram(samples: &[u64], bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for &x in samples {
        h[(x as usize).min(bins - 1)] += 1.0;
    }
    h
}

/// Goodness of fit of integer samples to `pmf[0..=k_max]`; values above
/// `k_max` form a tail cell with the remaining probability.
pub fn chi_square_gof(samples: &[u64], pmf: &[f64], level: f64) -> Result<TestResult> {
    require(samples.len())?;
    let n = samples.len() as f64;
    let tail = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
    let mut expected: Vec<f64> = pmf.iter().map(|p| p * n).collect();
    expected.push(tail * n);
    let observed = histogram(samples, expected.len());
    let (e, o) = pool_bins(&expected, &[observed]);
    if e.len() < 2 {
        return Err(Error::InsufficientData("fewer than two cells after pooling".into()));
    }
    let stat: f64 = e.iter().zip(&o[0]).map(|(e, o)| (o - e).powi(2) / e).sum();
    Ok(TestResult::new(stat, chi_square_p(stat, e.len() - 1), samples.len(), level))
}

/// Homogeneity of two integer samples (2 x K contingency table).
pub fn chi_square_two_sample(a: &[u64], b: &[u64], level: f64) -> Result<TestResult> {
    require(a.len().min(b.len()))?;
    let bins = a.iter().chain(b).copied().max().unwrap_or(0) as usize + 1;
    let (ha, hb) = (histogram(a, bins), histogram(b, bins));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    // pool on the smaller row's expected counts
    let smaller = na.min(nb);
    let driver: Vec<f64> = ha.iter().zip(&hb).map(|(x, y)| (x + y) * smaller / total).collect();
    let (_, rows) = pool_bins(&driver, &[ha, hb]);
    let cells = rows[0].len();
    if cells < 2 {
        return Err(Error::InsufficientData("fewer than two cells after pooling".into()));
    }
    let mut stat = 0.0;
    for k in 0..cells {
        let col = rows[0][k] + rows[1][k];
        for (row, n_row) in rows.iter().zip([na, nb]) {
            let e = col * n_row / total;
            stat += (row[k] - e).powi(2) / e;
        }
    }
    Ok(TestResult::new(stat, chi_square_p(stat, cells - 1), a.len() + b.len(), level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RandomSource;

    #[test]
    fn kolmogorov_branches_meet() {
        let lo = kolmogorov_sf(1.18 - 1e-12);
        let hi = kolmogorov_sf(1.18);
        assert!((lo - hi).abs() < 1e-10);
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn uniform_null_calibration() {
        let mut rejections = 0;
        for rep in 0..100 {
            let mut rng = RandomSource::new(2024, rep);
            let xs: Vec<f64> = (0..500).map(|_| rng.uniform()).collect();
            if ks_test(&xs, |x| x.clamp(0.0, 1.0), 0.05).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        let frac = rejections as f64 / 100.0;
        assert!((frac - 0.05).abs() <= 0.03, "{frac}");
    }

    #[test]
    fn poisson_goodness_of_fit() {
        let mut rng = RandomSource::new(3, 0);
        let xs: Vec<u64> = (0..10_000).map(|_| rng.poisson(5.0)).collect();
        let mut pmf = vec![(-5f64).exp()];
        for k in 1..30 {
            let prev = pmf[k - 1];
            pmf.push(prev * 5.0 / k as f64);
        }
        let r = chi_square_gof(&xs, &pmf, DEFAULT_LEVEL).unwrap();
        assert!(r.pass, "{r:?}");
        let r = chi_square_two_sample(&xs, &xs.iter().map(|x| x + 1).collect::<Vec<_>>(), DEFAULT_LEVEL).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn two_sample_ks() {
        let mut rng = RandomSource::new(4, 0);
        let a: Vec<f64> = (0..2000).map(|_| rng.exponential()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.exponential()).collect();
        let c: Vec<f64> = (0..2000).map(|_| 1.3 * rng.exponential()).collect();
        assert!(ks_two_sample(&a, &b, DEFAULT_LEVEL).unwrap().pass);
        assert!(!ks_two_sample(&a, &c, DEFAULT_LEVEL).unwrap().pass);
    }

    #[test]
    fn pooling_is_deterministic() {
        let (e, o) = pool_bins(&[1.0, 2.0, 3.0, 10.0, 1.0], &[vec![1.0, 1.0, 1.0, 1.0, 1.0]]);
        assert_eq!(e, vec![6.0, 11.0]);
        assert_eq!(o[0], vec![3.0, 2.0]);
        assert!(matches!(ks_test(&[0.5; 10], |x| x, 0.01), Err(Error::InsufficientData(_))));
    }
}
