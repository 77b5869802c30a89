use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Whether a report comes from a formula or from `n` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleCount {
    Analytic,
    Samples(usize),
}

impl Serialize for SampleCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SampleCount::Analytic => s.serialize_str("analytic"),
            SampleCount::Samples(n) => s.serialize_u64(*n as u64),
        }
    }
}

/// A time point of a process or a point of the quadrant for a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Coordinate {
    Time(f64),
    Plane([f64; 2]),
}

impl From<f64> for Coordinate {
    fn from(t: f64) -> Self {
        Coordinate::Time(t)
    }
}

impl From<(f64, f64)> for Coordinate {
    fn from((t1, t2): (f64, f64)) -> Self {
        Coordinate::Plane([t1, t2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceEntry {
    pub t: Coordinate,
    pub s: Coordinate,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardErrors {
    pub mean: f64,
    pub var: f64,
}

/// Mean and variance at one time plus covariances between pairs of times.
/// Standard errors are present exactly for sample-based reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean: f64,
    #[serde(rename = "var")]
    pub variance: f64,
    pub cov: Vec<CovarianceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<StandardErrors>,
    pub n: SampleCount,
}

impl MomentReport {
    pub fn analytic(mean: f64, variance: f64, cov: Vec<CovarianceEntry>) -> Self {
        Self { mean, variance, cov, se: None, n: SampleCount::Analytic }
    }

    pub fn covariance(&self, t: impl Into<Coordinate>, s: impl Into<Coordinate>) -> Option<&CovarianceEntry> {
        let (t, s) = (t.into(), s.into());
        self.cov.iter().find(|c| (c.t == t && c.s == s) || (c.t == s && c.s == t))
    }
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Plug-in moments of samples `(X(t_0), ..., X(t_m))`.
///
/// Mean and variance refer to `t_0`; covariances are reported for every pair
/// `i < j`. Standard errors: `s / sqrt(n)` for the mean and the delta method
/// for the second-order quantities.
pub fn mc_moments<C: Into<Coordinate> + Copy>(samples: &[Vec<f64>], times: &[C]) -> Result<MomentReport> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 samples, got {n}")));
    }
    if times.is_empty() || samples.iter().any(|s| s.len() != times.len()) {
        return Err(Error::Invalid("every sample needs one value per time".into()));
    }
    let nf = n as f64;
    let means: Vec<f64> = (0..times.len()).map(|i| samples.iter().map(|s| s[i]).sum::<f64>() / nf).collect();
    let cross = |i: usize, j: usize| -> (f64, f64) {
        let prods: Vec<f64> = samples.iter().map(|s| (s[i] - means[i]) * (s[j] - means[j])).collect();
        let (m, se) = mean_and_se(&prods);
        (m * nf / (nf - 1.0), se)
    };
    let (variance, var_se) = cross(0, 0);
    let mut cov = Vec::new();
    for i in 0..times.len() {
        for j in i + 1..times.len() {
            let (value, se) = cross(i, j);
            cov.push(CovarianceEntry { t: times[i].into(), s: times[j].into(), value, se: Some(se) });
        }
    }
    Ok(MomentReport {
        mean: means[0],
        variance,
        cov,
        se: Some(StandardErrors { mean: (variance / nf).sqrt(), var: var_se }),
        n: SampleCount::Samples(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RandomSource;

    #[test]
    fn constant_sampler() {
        let xs = vec![vec![3.0, 3.0]; 50];
        let r = mc_moments(&xs, &[1.0, 2.0]).unwrap();
        assert_eq!(r.mean, 3.0);
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.se.unwrap().mean, 0.0);
        assert_eq!(r.cov[0].value, 0.0);
    }

    #[test]
    fn unit_normal_mean() {
        let mut rng = RandomSource::new(11, 0);
        let xs: Vec<Vec<f64>> = (0..1_000_000)
            .map(|_| {
                // Box-Muller
                let (u, v) = (rng.uniform(), rng.uniform());
                vec![(-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()]
            })
            .collect();
        let r = mc_moments(&xs, &[0.0]).unwrap();
        assert!(r.mean.abs() < 4e-3);
        assert!((r.variance - 1.0).abs() < 4.0 * r.se.unwrap().var);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(mc_moments(&[vec![1.0]], &[1.0]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn json_shape() {
        let r = MomentReport::analytic(
            1.0,
            2.0,
            vec![CovarianceEntry { t: 1.0.into(), s: (2.0, 3.0).into(), value: 0.5, se: None }],
        );
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["var"], 2.0);
        assert_eq!(j["n"], "analytic");
        assert!(j.get("se").is_none());
        assert_eq!(j["cov"][0]["t"], 1.0);
        assert_eq!(j["cov"][0]["s"], serde_json::json!([2.0, 3.0]));
    }
}
