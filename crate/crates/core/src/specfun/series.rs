//! Power-series summation with a rounding-error estimate.

/// Relative error charged on a quadrature magnitude for rounding inside the
/// integrand.
pub(crate) const ROUNDING: f64 = 1e-15;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub value: f64,
    /// `sum |term| * relative error of term`.
    pub term_error: f64,
    pub converged: bool,
}

impl SeriesSum {
    /// Estimated absolute error: per-term rounding plus compensated summation.
    pub fn error(&self) -> f64 {
        self.term_error + 2.0 * f64::EPSILON * self.value.abs() + f64::MIN_POSITIVE
    }
}

/// A term with the relative error of its evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub value: f64,
    pub rel_error: f64,
}

/// Relative error of `exp(l)` when `l` is a sum of logarithms of combined
/// size `log_size`: each ulp of `l` becomes a relative error of the result.
pub(crate) fn log_form_error(log_size: f64) -> f64 {
    f64::EPSILON * (4.0 + log_size)
}

/// Sums `term(k)` for `k = 0, 1, ...` until eight consecutive terms are
/// negligible against the partial sum (or against the accumulated magnitude
/// when cancellation dominates), or `max_terms` is reached.
pub(crate) fn sum<F: FnMut(usize) -> Term>(mut term: F, max_terms: usize) -> SeriesSum {
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut magnitude = 0.0;
    let mut term_error = 0.0;
    let mut quiet = 0;
    for k in 0..max_terms {
        let Term { value: t, rel_error } = term(k);
        if !t.is_finite() {
            return SeriesSum { value: f64::NAN, term_error: f64::INFINITY, converged: false };
        }
        // Neumaier compensated addition.
        let s = value + t;
        if value.abs() >= t.abs() {
            comp += (value - s) + t;
        } else {
            comp += (t - s) + value;
        }
        value = s;
        magnitude += t.abs();
        term_error += t.abs() * rel_error;
        let threshold = (1e-17 * (value + comp).abs()).max(1e-18 * magnitude);
        if t.abs() <= threshold {
            quiet += 1;
            if quiet >= 8 && k >= 8 {
                return SeriesSum { value: value + comp, term_error, converged: true };
            }
        } else {
            quiet = 0;
        }
    }
    SeriesSum { value: value + comp, term_error, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series() {
        let mut t = 1.0;
        let s = sum(
            |k| {
                if k > 0 {
                    t *= 1.0 / k as f64;
                }
                Term { value: t, rel_error: f64::EPSILON * k as f64 }
            },
            100,
        );
        assert!(s.converged);
        assert!((s.value - std::f64::consts::E).abs() < 1e-15);
        assert!(s.error() < 1e-14);
    }

    #[test]
    fn cap_reported() {
        let s = sum(|_| Term { value: 1.0, rel_error: 0.0 }, 10);
        assert!(!s.converged);
    }
}
