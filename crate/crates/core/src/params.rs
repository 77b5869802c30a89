//! Parameter newtypes shared by every module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Stability index of a one-sided stable law.
///
/// Values in (0, 1) drive subordinators; the value 1 is admitted so that the
/// classical (non-fractional) limit can be checked.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(domain(format!("stability index must lie in (0, 1], got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = crate::Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Exponents and weights of a mixture of two independent stable subordinators,
/// with Laplace exponent `c1 s^alpha1 + c2 s^alpha2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedParams {
    alpha1: Alpha,
    alpha2: Alpha,
    c1: f64,
    c2: f64,
}

impl MixedParams {
    /// Validates `c1 + c2 = 1`, `c1 >= 0`, `c2 > 0` and `alpha1 < alpha2`.
    pub fn new(alpha1: f64, alpha2: f64, c1: f64, c2: f64) -> Result<Self> {
        let alpha1 = Alpha::new(alpha1)?;
        let alpha2 = Alpha::new(alpha2)?;
        if !(c1.is_finite() && c2.is_finite()) || (c1 + c2 - 1.0).abs() > 1e-12 {
            return Err(domain(format!("C1+C2 must equal 1, got C1={c1}, C2={c2}")));
        }
        if c1 < 0.0 {
            return Err(domain(format!("C1 must be nonnegative, got {c1}")));
        }
        if c2 <= 0.0 {
            return Err(domain(format!("C2 must be positive, got {c2}")));
        }
        if alpha1.value() >= alpha2.value() {
            return Err(domain(format!(
                "alpha1 must be smaller than alpha2, got {} and {}",
                alpha1.value(),
                alpha2.value()
            )));
        }
        if alpha2.is_classical() {
            return Err(domain("alpha2 must be smaller than 1"));
        }
        Ok(Self { alpha1, alpha2, c1, c2 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1.value()
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2.value()
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `alpha2 - alpha1`.
    pub fn gap(&self) -> f64 {
        self.alpha2() - self.alpha1()
    }

    /// `c1 / c2`.
    pub fn weight_ratio(&self) -> f64 {
        self.c1 / self.c2
    }

    pub fn laplace_exponent(&self, s: f64) -> f64 {
        self.c1 * s.powf(self.alpha1()) + self.c2 * s.powf(self.alpha2())
    }

    pub fn laplace_exponent_complex(&self, s: Complex64) -> Complex64 {
        s.powf(self.alpha1()) * self.c1 + s.powf(self.alpha2()) * self.c2
    }
}

/// Law of a subordinator: a single stable law or a two-component mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SubordinatorLaw {
    Stable(Alpha),
    Mixed(MixedParams),
}

impl SubordinatorLaw {
    pub fn laplace_exponent(&self, s: f64) -> f64 {
        match self {
            SubordinatorLaw::Stable(a) => s.powf(a.value()),
            SubordinatorLaw::Mixed(m) => m.laplace_exponent(s),
        }
    }
}

impl From<Alpha> for SubordinatorLaw {
    fn from(a: Alpha) -> Self {
        SubordinatorLaw::Stable(a)
    }
}

impl From<MixedParams> for SubordinatorLaw {
    fn from(m: MixedParams) -> Self {
        SubordinatorLaw::Mixed(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_range() {
        assert!(Alpha::new(0.5).is_ok());
        assert!(Alpha::new(1.0).unwrap().is_classical());
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.2).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
    }

    #[test]
    fn mixed_constraints() {
        assert!(MixedParams::new(0.5, 0.9, 0.5, 0.5).is_ok());
        let e = MixedParams::new(0.5, 0.9, 0.5, 0.6).unwrap_err().to_string();
        assert!(e.contains("C1+C2 must equal 1"));
        assert!(MixedParams::new(0.9, 0.5, 0.5, 0.5).is_err());
        assert!(MixedParams::new(0.5, 0.9, 1.0, 0.0).is_err());
        assert!(MixedParams::new(0.5, 0.9, 0.0, 1.0).is_ok());
    }

    #[test]
    fn exponent_at_one() {
        let m = MixedParams::new(0.3, 0.8, 0.25, 0.75).unwrap();
        assert!((m.laplace_exponent(1.0) - 1.0).abs() < 1e-15);
        let z = m.laplace_exponent_complex(Complex64::new(2.0, 0.0));
        assert!((z.re - m.laplace_exponent(2.0)).abs() < 1e-14);
    }
}
