//! Grid simulation of stable and mixed subordinators and their inverses, with
//! the analytic renewal function and covariance of the inverse.

use std::path::Path;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::export::{format_float, write_csv};
use crate::params::{Alpha, MixedParams, SubordinatorLaw};
use crate::quad::{self, QuadConfig};
use crate::sampling::{sample_stable, RandomSource};
use crate::specfun::gamma::gamma;
use crate::specfun::{mittag_leffler2, mittag_leffler3};

pub const DEFAULT_DELTA: f64 = 5e-4;
pub const DEFAULT_MAX_STEPS: usize = 20_000_000;

/// `L(t_n)` at `t_n = n * delta`, stopped at the first value above the target.
#[derive(Debug, Clone, Serialize)]
pub struct SubordinatorPath {
    pub law: SubordinatorLaw,
    pub delta: f64,
    pub values: Vec<f64>,
}

impl SubordinatorPath {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |n| n as f64 * self.delta)
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        write_csv(path, &["t", "L"], self.times().zip(&self.values).map(|(t, &l)| [format_float(t), format_float(l)]))
    }
}

/// Simulates until `L(t_n) > s_end`, with the default length cap.
pub fn simulate_subordinator(
    law: impl Into<SubordinatorLaw>,
    delta: f64,
    s_end: f64,
    rng: &mut RandomSource,
) -> Result<SubordinatorPath> {
    simulate_subordinator_capped(law, delta, s_end, rng, DEFAULT_MAX_STEPS)
}

pub fn simulate_subordinator_capped(
    law: impl Into<SubordinatorLaw>,
    delta: f64,
    s_end: f64,
    rng: &mut RandomSource,
    max_steps: usize,
) -> Result<SubordinatorPath> {
    let law = law.into();
    if !(delta.is_finite() && delta > 0.0) {
        return Err(domain(format!("grid step must be positive, got {delta}")));
    }
    if !(s_end.is_finite() && s_end > 0.0) {
        return Err(domain(format!("simulation horizon must be positive, got {s_end}")));
    }
    let mut values = vec![0.0];
    let mut level = 0.0;
    while level <= s_end {
        if values.len() > max_steps {
            return Err(Error::Resource(format!(
                "subordinator path exceeded {max_steps} steps before reaching {s_end}"
            )));
        }
        level += increment(&law, delta, rng);
        values.push(level);
    }
    Ok(SubordinatorPath { law, delta, values })
}

/// One grid increment, with Laplace transform `exp(-delta * phi(s))`.
pub fn increment(law: &SubordinatorLaw, delta: f64, rng: &mut RandomSource) -> f64 {
    match law {
        SubordinatorLaw::Stable(a) => sample_stable(*a, delta, rng),
        SubordinatorLaw::Mixed(m) => {
            let a2 = Alpha::new(m.alpha2()).expect("validated");
            let mut x = sample_stable(a2, m.c2() * delta, rng);
            if m.c1() > 0.0 {
                let a1 = Alpha::new(m.alpha1()).expect("validated");
                x += sample_stable(a1, m.c1() * delta, rng);
            }
            x
        }
    }
}

/// Inverse of a grid path: level `n * delta` is reached at `jump_times[n]`.
#[derive(Debug, Clone, Serialize)]
pub struct InversePath {
    pub delta: f64,
    pub jump_times: Vec<f64>,
}

impl InversePath {
    /// Deterministic path `Y(s) = s` on `[0, s_end]`, the classical limit.
    pub fn identity(delta: f64, s_end: f64) -> Self {
        let n = (s_end / delta).ceil() as usize + 1;
        Self { delta, jump_times: (0..=n).map(|i| i as f64 * delta).collect() }
    }

    /// Time up to which the path is known.
    pub fn horizon(&self) -> f64 {
        *self.jump_times.last().unwrap_or(&0.0)
    }

    fn index(&self, s: f64) -> usize {
        self.jump_times.partition_point(|&v| v <= s).saturating_sub(1)
    }

    /// Right-continuous step reading: `Y(s) = n * delta` on `[s_n, s_{n+1})`.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.index(s) as f64 * self.delta
    }

    /// Continuous reading, linear in `s` between consecutive jump times.
    pub fn eval_linear(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let n = self.index(s);
        if n + 1 >= self.jump_times.len() {
            return n as f64 * self.delta;
        }
        let (a, b) = (self.jump_times[n], self.jump_times[n + 1]);
        let frac = if b > a { (s - a) / (b - a) } else { 0.0 };
        (n as f64 + frac) * self.delta
    }

    /// Rows `(s_n, n * delta)`: the time each level is first exceeded.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let rows =
            self.jump_times.iter().enumerate().map(|(n, &s)| [format_float(s), format_float(n as f64 * self.delta)]);
        write_csv(path, &["s", "Y"], rows)
    }

    /// Inverse of [`eval_linear`](Self::eval_linear): the time at which the
    /// continuous reading reaches `level`, if within the known path.
    pub fn time_of_level(&self, level: f64) -> Option<f64> {
        let pos = level / self.delta;
        let n = pos.floor() as usize;
        if n + 1 >= self.jump_times.len() {
            return None;
        }
        let frac = pos - n as f64;
        let (a, b) = (self.jump_times[n], self.jump_times[n + 1]);
        Some(a + frac * (b - a))
    }
}

pub fn invert_path(path: &SubordinatorPath) -> InversePath {
    InversePath { delta: path.delta, jump_times: path.values.clone() }
}

/// Renewal function `U(t) = E Y(t)`.
#[derive(Debug, Clone, Copy)]
pub struct RenewalFunction {
    pub law: SubordinatorLaw,
}

impl RenewalFunction {
    pub fn new(law: impl Into<SubordinatorLaw>) -> Self {
        Self { law: law.into() }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        inverse_mean(self.law, t)
    }

    /// Density `U'(t)`; for the mixed law the series is differentiated term-wise.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(domain("renewal density needs t > 0"));
        }
        match self.law {
            SubordinatorLaw::Stable(a) => {
                let a = a.value();
                Ok(t.powf(a - 1.0) / gamma(a))
            }
            SubordinatorLaw::Mixed(m) => {
                let e = mittag_leffler2(m.gap(), m.alpha2(), -m.weight_ratio() * t.powf(m.gap()))?;
                Ok(t.powf(m.alpha2() - 1.0) * e / m.c2())
            }
        }
    }
}

pub fn inverse_mean(law: impl Into<SubordinatorLaw>, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    match law.into() {
        SubordinatorLaw::Stable(a) => {
            let a = a.value();
            Ok(t.powf(a) / gamma(1.0 + a))
        }
        SubordinatorLaw::Mixed(m) => mixed_renewal(&m, t),
    }
}

fn mixed_renewal(m: &MixedParams, t: f64) -> Result<f64> {
    let e = mittag_leffler2(m.gap(), m.alpha2() + 1.0, -m.weight_ratio() * t.powf(m.gap()))?;
    Ok(t.powf(m.alpha2()) * e / m.c2())
}

/// `E Y(t)^2`.
pub fn inverse_second_moment(law: impl Into<SubordinatorLaw>, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    match law.into() {
        SubordinatorLaw::Stable(a) => {
            let a = a.value();
            Ok(2.0 * t.powf(2.0 * a) / gamma(1.0 + 2.0 * a))
        }
        SubordinatorLaw::Mixed(m) => {
            // Laplace transform 2 / (s phi(s)^2), expanded in powers of s^(a1 - a2)
            let e = mittag_leffler3(m.gap(), 2.0 * m.alpha2() + 1.0, 2.0, -m.weight_ratio() * t.powf(m.gap()))?;
            Ok(2.0 * t.powf(2.0 * m.alpha2()) * e / (m.c2() * m.c2()))
        }
    }
}

const COV_TOLERANCE: f64 = 1e-11;

/// `Cov(Y(t), Y(s))` for the inverse stable subordinator, by quadrature in
/// `u = tau^alpha`.
pub fn inverse_cov(alpha: Alpha, t: f64, s: f64) -> Result<f64> {
    if t < 0.0 || s < 0.0 {
        return Err(domain("times must be nonnegative"));
    }
    let m = t.min(s);
    if m == 0.0 {
        return Ok(0.0);
    }
    let a = alpha.value();
    let integrand = |u: f64| {
        let tau = u.powf(1.0 / a).min(m);
        ((t - tau).powf(a) + (s - tau).powf(a)) / a
    };
    let r = quad::integrate(integrand, 0.0, m.powf(a), QuadConfig::new(COV_TOLERANCE, 1e-13))?;
    let g1 = gamma(1.0 + a);
    Ok(r.value / (g1 * gamma(a)) - (s * t).powf(a) / (g1 * g1))
}

/// `Cov(Y(t), Y(s))` for the inverse mixed subordinator:
/// `int_0^min (U(t-tau) + U(s-tau)) dU(tau) - U(t) U(s)`.
pub fn mixed_inverse_cov(params: &MixedParams, t: f64, s: f64) -> Result<f64> {
    if t < 0.0 || s < 0.0 {
        return Err(domain("times must be nonnegative"));
    }
    let m = t.min(s);
    if m == 0.0 {
        return Ok(0.0);
    }
    let renewal = RenewalFunction::new(*params);
    let u = |x: f64| if x <= 0.0 { 0.0 } else { mixed_renewal(params, x).unwrap_or(f64::NAN) };
    // dU(tau) = tau^(a2-1) E_{a2-a1,a2}(-(c1/c2) tau^(a2-a1)) / c2, singular at zero
    let integrand = |tau: f64| {
        if tau <= 0.0 {
            return 0.0;
        }
        (u(t - tau) + u(s - tau)) * renewal.derivative(tau).unwrap_or(f64::NAN)
    };
    let r = quad::integrate_power_singular(integrand, params.alpha2() - 1.0, m, QuadConfig::new(COV_TOLERANCE, 1e-12))?;
    if !r.value.is_finite() {
        return Err(Error::AccuracyNotAttained("renewal function evaluation failed".into()));
    }
    Ok(r.value - u(t) * u(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Alpha {
        Alpha::new(0.5).unwrap()
    }

    #[test]
    fn inverse_reads_levels() {
        let mut rng = RandomSource::new(5, 0);
        let path = simulate_subordinator(Alpha::new(0.7).unwrap(), 0.01, 1.0, &mut rng).unwrap();
        assert_eq!(path.values[0], 0.0);
        assert!(path.values.windows(2).all(|w| w[1] > w[0]));
        assert!(*path.values.last().unwrap() > 1.0);
        let inv = invert_path(&path);
        assert_eq!(inv.eval(0.0), 0.0);
        for (n, &s) in path.values.iter().enumerate() {
            assert!((inv.eval(s) - n as f64 * 0.01).abs() < 1e-12);
        }
        for &lvl in &[0.013, 0.1, 0.37] {
            if let Some(t) = inv.time_of_level(lvl) {
                assert!((inv.eval_linear(t) - lvl).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn length_cap() {
        let mut rng = RandomSource::new(5, 0);
        let r = simulate_subordinator_capped(half(), 1e-4, 100.0, &mut rng, 10);
        assert!(matches!(r, Err(Error::Resource(_))));
        assert!(simulate_subordinator(half(), 0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn means() {
        assert!((inverse_mean(half(), 1.0).unwrap() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-10);
        assert_eq!(inverse_mean(half(), 0.0).unwrap(), 0.0);
        let m = MixedParams::new(0.5, 0.9, 0.0, 1.0).unwrap();
        let u = inverse_mean(m, 2.0).unwrap();
        assert!((u - 2f64.powf(0.9) / gamma(1.9)).abs() < 1e-12);
    }

    #[test]
    fn covariance_diagonal() {
        let v = inverse_cov(half(), 1.0, 1.0).unwrap();
        assert!((v - (2.0 - 1.0 / gamma(1.5).powi(2))).abs() < 1e-9);
        let a = Alpha::new(0.8).unwrap();
        assert!((inverse_cov(a, 0.7, 2.3).unwrap() - inverse_cov(a, 2.3, 0.7).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mixed_reduces_to_stable() {
        let m = MixedParams::new(0.4, 0.8, 0.0, 1.0).unwrap();
        let a = Alpha::new(0.8).unwrap();
        for &(t, s) in &[(1.0, 1.0), (0.5, 2.0)] {
            let x = mixed_inverse_cov(&m, t, s).unwrap();
            let y = inverse_cov(a, t, s).unwrap();
            assert!((x - y).abs() < 1e-6, "{x} {y}");
        }
        let e2 = inverse_second_moment(m, 1.3).unwrap();
        assert!((e2 - inverse_second_moment(a, 1.3).unwrap()).abs() < 1e-12);
    }
}
