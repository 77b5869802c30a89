//! Wright function `W_{l,m}(z) = sum_k z^k / (k! Gamma(m + l k))`.

use super::gamma::{ln_gamma, ln_rgamma};
use super::series::{self, Term};
use crate::error::{domain, Error, Result};

pub const WRIGHT_MAX_TERMS: usize = 2000;

#[derive(Debug, Clone, Copy)]
pub struct WrightValue {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

pub fn wright(lambda: f64, mu: f64, z: f64) -> Result<f64> {
    let w = wright_series(lambda, mu, z)?;
    if w.converged && (w.error <= 1e-11 || w.error <= 1e-11 * w.value.abs()) {
        Ok(w.value)
    } else {
        Err(Error::AccuracyNotAttained(format!("W_{{{lambda},{mu}}}({z}): series error estimate {:e}", w.error)))
    }
}

/// The raw series with its error estimate; never fails on accuracy.
pub fn wright_series(lambda: f64, mu: f64, z: f64) -> Result<WrightValue> {
    if !(lambda.is_finite() && lambda > -1.0) {
        return Err(domain(format!("lambda must exceed -1, got {lambda}")));
    }
    if !(mu.is_finite() && z.is_finite()) {
        return Err(domain("arguments must be finite"));
    }
    if z == 0.0 {
        let (lr, sign) = ln_rgamma(mu);
        return Ok(WrightValue { value: sign * lr.exp(), error: 0.0, converged: true });
    }
    let ln_z = z.abs().ln();
    let s = series::sum(
        |k| {
            let (lr, sign) = ln_rgamma(mu + lambda * k as f64);
            if sign == 0.0 {
                return Term { value: 0.0, rel_error: 0.0 };
            }
            let zsign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            let lf = ln_gamma(k as f64 + 1.0);
            Term {
                value: sign * zsign * (k as f64 * ln_z - lf + lr).exp(),
                rel_error: series::log_form_error(k as f64 * ln_z.abs() + lf + lr.abs()),
            }
        },
        WRIGHT_MAX_TERMS,
    );
    Ok(WrightValue {
        value: s.value,
        error: if s.converged { s.error() } else { f64::INFINITY },
        converged: s.converged,
    })
}
