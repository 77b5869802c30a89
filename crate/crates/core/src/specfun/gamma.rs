//! Gamma function to a few ulps, with the reciprocal-Gamma convention
//! `1/Gamma(-n) = 0`.
//!
//! Near the origin `1/Gamma(1+u)` comes from its Taylor series on
//! `|u| <= 1/2` and the recurrence; from 16 on, Stirling's series is used with
//! the power split so that no rounded exponent gets amplified.

use std::f64::consts::PI;

/// Taylor coefficients of `1/Gamma(1+u)` at `u = 0`.
#[allow(clippy::excessive_precision)]
const RGAMMA_TAYLOR: [f64; 26] = [
    1.00000000000000000e+00,
    5.77215664901532866e-01,
    -6.55878071520253902e-01,
    -4.20026350340952370e-02,
    1.66538611382291479e-01,
    -4.21977345555443334e-02,
    -9.62197152787697303e-03,
    7.21894324666309990e-03,
    -1.16516759185906517e-03,
    -2.15241674114950975e-04,
    1.28050282388116196e-04,
    -2.01348547807882387e-05,
    -1.25049348214267063e-06,
    1.13302723198169593e-06,
    -2.05633841697760707e-07,
    6.11609510448141609e-09,
    5.00200764446922295e-09,
    -1.18127457048702004e-09,
    1.04342671169110054e-10,
    7.78226343990507081e-12,
    -3.69680561864220598e-12,
    5.10037028745447575e-13,
    -2.05832605356650664e-14,
    -5.34812253942301782e-15,
    1.22677862823826084e-15,
    -1.18125930169745883e-16,
];

/// `B_2k / (2k (2k-1))`, k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_FROM: f64 = 16.0;
/// Largest argument with a finite `Gamma`.
const GAMMA_MAX: f64 = 171.6;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let (a, sign) = if r < 0.0 { (-r, -1.0) } else { (r, 1.0) };
    let a = if a > 0.5 { 1.0 - a } else { a };
    sign * (PI * a).sin()
}

pub fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn rgamma_near_one(u: f64) -> f64 {
    RGAMMA_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn stirling_series(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * STIRLING.iter().rev().fold(0.0, |acc, &c| acc * r2 + c)
}

/// `Gamma(x)` for `16 <= x <= GAMMA_MAX`.
fn gamma_stirling(x: f64) -> f64 {
    let half = x.powf(0.5 * x) * (-0.5 * x).exp();
    half * half / x.sqrt() * (2.0 * PI).sqrt() * stirling_series(x).exp()
}

/// `1/Gamma(x)` for `0 < x < 16`.
fn rgamma_small(x: f64) -> f64 {
    if x < 0.5 {
        return x * rgamma_near_one(x);
    }
    let k = x.round();
    let u = x - k;
    let mut prod = 1.0;
    for i in 1..k as usize {
        prod *= u + i as f64;
    }
    rgamma_near_one(u) / prod
}

pub fn gamma(x: f64) -> f64 {
    if is_pole(x) {
        return f64::NAN;
    }
    if x >= STIRLING_FROM {
        return if x > GAMMA_MAX { f64::INFINITY } else { gamma_stirling(x) };
    }
    if x > 0.0 {
        return 1.0 / rgamma_small(x);
    }
    PI / (sin_pi(x) * gamma(1.0 - x))
}

/// `ln|Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if is_pole(x) {
        return f64::INFINITY;
    }
    if x >= STIRLING_FROM {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_series(x);
    }
    if x > 0.0 {
        return -rgamma_small(x).ln();
    }
    PI.ln() - sin_pi(x).abs().ln() - ln_gamma(1.0 - x)
}

/// `1 / Gamma(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x > 0.0 && x < STIRLING_FROM {
        return rgamma_small(x);
    }
    if x >= STIRLING_FROM {
        return if x > GAMMA_MAX { (-ln_gamma(x)).exp() } else { 1.0 / gamma_stirling(x) };
    }
    if 1.0 - x <= GAMMA_MAX {
        sin_pi(x) * gamma(1.0 - x) / PI
    } else {
        let s = sin_pi(x);
        s.signum() * (s.abs().ln() + ln_gamma(1.0 - x) - PI.ln()).exp()
    }
}

/// `(ln|1/Gamma(x)|, sign(1/Gamma(x)))`; the sign is zero at the poles.
pub fn ln_rgamma(x: f64) -> (f64, f64) {
    if is_pole(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    let sign = if x > 0.0 { 1.0 } else { sin_pi(x).signum() };
    (-ln_gamma(x), sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer() {
        assert!((gamma(1.5) - PI.sqrt() / 2.0).abs() < 4e-16);
        assert_eq!(gamma(5.0), 24.0);
        assert_eq!(rgamma(1.0), 1.0);
        assert_eq!(rgamma(2.0), 1.0);
        assert!((rgamma(1.5) - std::f64::consts::FRAC_2_SQRT_PI).abs() < 4e-16);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 2e-15);
    }

    #[test]
    fn factorials_are_close() {
        let mut f = 1.0f64;
        for n in 1..=30 {
            // (n-1)! is exact in f64 up to 22!
            let g = gamma(n as f64);
            assert!((g - f).abs() <= 8.0 * f64::EPSILON * f, "n={n}: {g} vs {f}");
            f *= n as f64;
        }
    }

    #[test]
    fn branches_meet() {
        let below = gamma(STIRLING_FROM.next_down());
        let above = gamma(STIRLING_FROM);
        assert!((above / below - 1.0).abs() < 1e-14);
        assert!((ln_gamma(20.5) - gamma(20.5).ln()).abs() < 1e-13);
    }

    #[test]
    fn poles_are_zero() {
        for n in 0..5 {
            assert_eq!(rgamma(-(n as f64)), 0.0);
            assert_eq!(ln_rgamma(-(n as f64)).1, 0.0);
        }
    }

    #[test]
    fn log_form_matches_direct() {
        for &x in &[-3.7, -0.2, 0.3, 2.5, 40.1] {
            let (l, s) = ln_rgamma(x);
            let r = rgamma(x);
            assert!((s * l.exp() - r).abs() <= 1e-13 * r.abs().max(1e-300));
        }
        assert!(rgamma(170.5) > 0.0 && rgamma(170.5) < 1e-300);
    }

    #[test]
    fn sin_pi_exact_zeros() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-2.0), 0.0);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-1.5) - 1.0).abs() < 1e-16);
    }
}
