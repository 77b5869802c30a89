use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::hypothesis::TestResult;
use super::moments::mean_and_se;
use crate::error::{Error, Result};
use crate::processes::EventTimes;
use crate::subordinate::InversePath;

const MIN_PER_BIN: usize = 30;
const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleReport {
    /// Chi-square combination of the per-bin z-scores.
    pub combined: TestResult,
    pub bin_z: Vec<f64>,
    /// Every bin within 4 standard errors and the combined test passes.
    pub pass: bool,
}

/// Checks `E[M(t) - M(s) | M(s)] = 0` for `M = X - lambda Y`, binning paths
/// by quantiles of `M(s)`. `Y` is read linearly, as in the simulators.
pub fn martingale_diagnostic(
    paths: &[(EventTimes, InversePath)],
    lambda: f64,
    s: f64,
    t: f64,
    bins: usize,
    level: f64,
) -> Result<MartingaleReport> {
    if !(s < t) {
        return Err(Error::Invalid(format!("need s < t, got s = {s}, t = {t}")));
    }
    if bins == 0 || paths.len() < bins * MIN_PER_BIN {
        return Err(Error::InsufficientData(format!(
            "{} paths is fewer than {MIN_PER_BIN} per bin for {bins} bins",
            paths.len()
        )));
    }
    let compensated = |e: &EventTimes, y: &InversePath, u: f64| e.count_at(u) as f64 - lambda * y.eval_linear(u);
    let mut pairs: Vec<(f64, f64)> = paths
        .iter()
        .map(|(e, y)| {
            let ms = compensated(e, y, s);
            (ms, compensated(e, y, t) - ms)
        })
        .collect();
    // stable sort keeps ties in path order, so bins are deterministic
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pairs.len();
    let mut bin_z = Vec::with_capacity(bins);
    for b in 0..bins {
        let chunk: Vec<f64> = pairs[b * n / bins..(b + 1) * n / bins].iter().map(|p| p.1).collect();
        let (mean, se) = mean_and_se(&chunk);
        bin_z.push(if se > 0.0 {
            mean / se
        } else if mean == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let stat: f64 = bin_z.iter().map(|z| z * z).sum();
    let p = ChiSquared::new(bins as f64).map(|d| d.sf(stat)).unwrap_or(f64::NAN);
    let combined = TestResult::new(stat, p, n, level);
    let pass = combined.pass && bin_z.iter().all(|z| z.abs() <= Z_LIMIT);
    Ok(MartingaleReport { combined, bin_z, pass })
}
