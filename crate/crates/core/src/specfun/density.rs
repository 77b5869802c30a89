//! One-sided stable, inverse stable and mixed inverse densities.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::wright::wright_series;
use crate::error::{domain, Error, Result};
use crate::fraccalc::laplace::hyperbolic;
use crate::params::{Alpha, MixedParams};
use crate::quad::{self, QuadConfig};

/// Density `g_a(x)` of a one-sided stable variable with `E exp(-sX) = exp(-s^a)`.
///
/// Uses `x^{-1} W_{-a,0}(-x^{-a})` where the series is accurate and otherwise
/// the integral over Kanter's function `A(u)`.
pub fn stable_density(alpha: Alpha, x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain(format!("stable density needs x > 0, got {x}")));
    }
    let a = alpha.value();
    if alpha.is_classical() {
        return Err(domain("the stable law with index 1 is a point mass"));
    }
    let w = wright_series(-a, 0.0, -x.powf(-a))?;
    if w.converged {
        let value = w.value / x;
        let error = w.error / x;
        if error <= 1e-13 || error <= 1e-11 * value.abs() {
            return Ok(value.max(0.0));
        }
    }
    kanter_density(a, x)
}

/// Kanter's function: `S = (A(U) / E)^((1-a)/a)` for `U ~ U(0, pi)`, `E ~ Exp(1)`.
pub(crate) fn kanter_a(alpha: f64, u: f64) -> f64 {
    let q = 1.0 / (1.0 - alpha);
    (alpha * u).sin().powf(alpha * q) * ((1.0 - alpha) * u).sin() / u.sin().powf(q)
}

fn kanter_density(alpha: f64, x: f64) -> Result<f64> {
    let q = alpha / (1.0 - alpha);
    let y = x.powf(-q);
    let integrand = |u: f64| {
        if u <= 0.0 || u >= PI {
            return 0.0;
        }
        let a = kanter_a(alpha, u);
        let v = a * (-a * y).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let prefactor = q / PI * x.powf(-1.0 / (1.0 - alpha));
    let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 1e-12, max_intervals: 4000 };
    let r = quad::integrate(integrand, 0.0, PI, cfg)?;
    Ok((prefactor * r.value).max(0.0))
}

/// Density `f_a(t, x)` of the inverse stable subordinator `Y_a(t)`.
pub fn inverse_stable_density(alpha: Alpha, t: f64, x: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("inverse stable density needs t > 0, got {t}")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(domain(format!("inverse stable density needs x > 0, got {x}")));
    }
    let a = alpha.value();
    let arg = t * x.powf(-1.0 / a);
    Ok(t / a * x.powf(-1.0 - 1.0 / a) * stable_density(alpha, arg)?)
}

/// Density of the inverse mixed subordinator at level `x`, recovered from its
/// Laplace transform in `t`, `phi(s)/s * exp(-x phi(s))`.
pub fn mixed_inverse_density(params: &MixedParams, t: f64, x: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("mixed inverse density needs t > 0, got {t}")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(domain(format!("mixed inverse density needs x >= 0, got {x}")));
    }
    let transform = |s: Complex64| {
        let phi = params.laplace_exponent_complex(s);
        phi / s * (-phi * x).exp()
    };
    // exp(-phi x) stays bounded while |arg s| < pi / (2 alpha2)
    let sector = (0.5 * PI / params.alpha1().max(params.alpha2())).min(PI);
    hyperbolic(transform, t, sector).map_err(|e| match e {
        Error::InversionFailure(m) => Error::InversionFailure(format!("mixed inverse density at x={x}: {m}")),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levy(x: f64) -> f64 {
        x.powf(-1.5) * (-0.25 / x).exp() / (2.0 * PI.sqrt())
    }

    #[test]
    fn levy_closed_form() {
        let a = Alpha::new(0.5).unwrap();
        for &x in &[0.01, 0.1, 1.0, 7.0, 100.0] {
            let v = stable_density(a, x).unwrap();
            assert!((v - levy(x)).abs() <= 1e-12 + 1e-10 * levy(x), "{x}: {v} vs {}", levy(x));
        }
    }

    #[test]
    fn kanter_route_matches_series() {
        for &alpha in &[0.3, 0.6, 0.8] {
            for &x in &[0.7, 1.5, 4.0] {
                let s = wright_series(-alpha, 0.0, -f64::powf(x, -alpha)).unwrap().value / x;
                let k = kanter_density(alpha, x).unwrap();
                assert!((s - k).abs() < 1e-11, "{alpha} {x}: {s} {k}");
            }
        }
    }

    #[test]
    fn inverse_half_closed_form() {
        let a = Alpha::new(0.5).unwrap();
        let v = inverse_stable_density(a, 1.0, 1.0).unwrap();
        assert!((v - (-0.25f64).exp() / PI.sqrt()).abs() < 1e-12);
        let v = inverse_stable_density(a, 4.0, 2.0).unwrap();
        assert!((v - 0.219_695_644_733_861_3).abs() < 1e-10);
    }

    #[test]
    fn domain_checks() {
        let a = Alpha::new(0.5).unwrap();
        assert!(stable_density(a, 0.0).is_err());
        assert!(inverse_stable_density(a, -1.0, 1.0).is_err());
        assert!(inverse_stable_density(a, 1.0, 0.0).is_err());
    }
}
