use crate::error::{domain, Result};
use crate::montecarlo;
use crate::params::Alpha;
use crate::processes::Pmf;
use crate::sampling::sample_inverse_at;
use crate::specfun::gamma::{gamma, ln_gamma};
use crate::stats::{CovarianceEntry, MomentReport};
use crate::subordinate::{inverse_cov, inverse_mean, inverse_second_moment};

/// Moments needed to describe `Z(t1, t2) = N(Y1(t1), Y2(t2))` for a Levy field
/// `N` and independent nondecreasing time changes `Y1`, `Y2`.
pub trait CovInputs {
    /// `E N(1, 1)`.
    fn mean_unit(&self) -> f64;
    /// `Var N(1, 1)`.
    fn var_unit(&self) -> f64;
    /// `E Y_i(t)` for `i` in `{0, 1}`.
    fn mean(&self, i: usize, t: f64) -> Result<f64>;
    /// `E Y_i(t)^2`.
    fn second_moment(&self, i: usize, t: f64) -> Result<f64>;
    /// `Cov(Y_i(t), Y_i(s))`.
    fn cov(&self, i: usize, t: f64, s: f64) -> Result<f64>;
}

/// Poisson field of rate `lambda` changed by two inverse stable subordinators.
#[derive(Debug, Clone, Copy)]
pub struct StableInputs {
    pub alphas: [Alpha; 2],
    pub lambda: f64,
}

impl CovInputs for StableInputs {
    fn mean_unit(&self) -> f64 {
        self.lambda
    }
    fn var_unit(&self) -> f64 {
        self.lambda
    }
    fn mean(&self, i: usize, t: f64) -> Result<f64> {
        inverse_mean(self.alphas[i], t)
    }
    fn second_moment(&self, i: usize, t: f64) -> Result<f64> {
        inverse_second_moment(self.alphas[i], t)
    }
    fn cov(&self, i: usize, t: f64, s: f64) -> Result<f64> {
        inverse_cov(self.alphas[i], t, s)
    }
}

/// Poisson field of rate `lambda` with `Y_i(t) = t`.
#[derive(Debug, Clone, Copy)]
pub struct DeterministicInputs {
    pub lambda: f64,
}

impl CovInputs for DeterministicInputs {
    fn mean_unit(&self) -> f64 {
        self.lambda
    }
    fn var_unit(&self) -> f64 {
        self.lambda
    }
    fn mean(&self, _: usize, t: f64) -> Result<f64> {
        Ok(t)
    }
    fn second_moment(&self, _: usize, t: f64) -> Result<f64> {
        Ok(t * t)
    }
    fn cov(&self, _: usize, _: f64, _: f64) -> Result<f64> {
        Ok(0.0)
    }
}

fn check_point(p: (f64, f64)) -> Result<()> {
    if !(p.0 >= 0.0 && p.1 >= 0.0 && p.0.is_finite() && p.1.is_finite()) {
        return Err(domain(format!("field coordinates must be nonnegative, got {p:?}")));
    }
    Ok(())
}

/// Mean and variance at `t` and the covariance between `t` and `s`.
///
/// `Cov = m^2 {c1 c2 + E Y2(t2) E Y2(s2) c1 + E Y1(t1) E Y1(s1) c2}
///      + v E Y1(min(t1, s1)) E Y2(min(t2, s2))`, with `c_i = Cov(Y_i(t_i), Y_i(s_i))`,
/// `m = E N(1, 1)` and `v = Var N(1, 1)`; valid for every ordering of the points.
pub fn parameter_change_cov(inputs: &impl CovInputs, t: (f64, f64), s: (f64, f64)) -> Result<MomentReport> {
    check_point(t)?;
    check_point(s)?;
    let (m, v) = (inputs.mean_unit(), inputs.var_unit());
    let (u1t, u2t) = (inputs.mean(0, t.0)?, inputs.mean(1, t.1)?);
    let (u1s, u2s) = (inputs.mean(0, s.0)?, inputs.mean(1, s.1)?);
    let mean = m * u1t * u2t;
    let variance =
        m * m * (inputs.second_moment(0, t.0)? * inputs.second_moment(1, t.1)? - (u1t * u2t).powi(2)) + v * u1t * u2t;
    let (c1, c2) = (inputs.cov(0, t.0, s.0)?, inputs.cov(1, t.1, s.1)?);
    let cov = m * m * (c1 * c2 + u2t * u2s * c1 + u1t * u1s * c2)
        + v * inputs.mean(0, t.0.min(s.0))? * inputs.mean(1, t.1.min(s.1))?;
    Ok(MomentReport::analytic(mean, variance, vec![CovarianceEntry { t: t.into(), s: s.into(), value: cov, se: None }]))
}

/// Moments of the fractional Poisson field through [`parameter_change_cov`].
pub fn fprf_moments(alpha1: Alpha, alpha2: Alpha, lambda: f64, t: (f64, f64), s: (f64, f64)) -> Result<MomentReport> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    parameter_change_cov(&StableInputs { alphas: [alpha1, alpha2], lambda }, t, s)
}

/// The variance constants `(C1, C2)` of the fractional Poisson field:
/// `Var N(t, t') = lambda^2 t^{2 a1} t'^{2 a2} C1 + lambda t^{a1} t'^{a2} C2`.
pub fn variance_constants(alpha1: Alpha, alpha2: Alpha) -> (f64, f64) {
    let (a1, a2) = (alpha1.value(), alpha2.value());
    let c1 = 1.0 / (a1 * a2 * gamma(2.0 * a1) * gamma(2.0 * a2))
        - 1.0 / ((a1 * a2).powi(2) * (gamma(a1) * gamma(a2)).powi(2));
    let c2 = 1.0 / (gamma(1.0 + a1) * gamma(1.0 + a2));
    (c1, c2)
}

/// The same moments written out for stable time changes: power-law mean,
/// variance through [`variance_constants`], covariance from the inverse
/// stable covariance of each coordinate.
pub fn fprf_moments_closed_form(
    alpha1: Alpha,
    alpha2: Alpha,
    lambda: f64,
    t: (f64, f64),
    s: (f64, f64),
) -> Result<MomentReport> {
    check_point(t)?;
    check_point(s)?;
    let (a1, a2) = (alpha1.value(), alpha2.value());
    let (g1, g2) = (gamma(1.0 + a1), gamma(1.0 + a2));
    let mean = lambda * t.0.powf(a1) * t.1.powf(a2) / (g1 * g2);
    let (c1, c2) = variance_constants(alpha1, alpha2);
    let variance =
        lambda * lambda * t.0.powf(2.0 * a1) * t.1.powf(2.0 * a2) * c1 + lambda * t.0.powf(a1) * t.1.powf(a2) * c2;
    let (k1, k2) = (inverse_cov(alpha1, t.0, s.0)?, inverse_cov(alpha2, t.1, s.1)?);
    let cov =
        lambda * lambda * (k1 * k2 + (t.0 * s.0).powf(a1) / (g1 * g1) * k2 + (t.1 * s.1).powf(a2) / (g2 * g2) * k1)
            + lambda * t.0.min(s.0).powf(a1) * t.1.min(s.1).powf(a2) / (g1 * g2);
    Ok(MomentReport::analytic(mean, variance, vec![CovarianceEntry { t: t.into(), s: s.into(), value: cov, se: None }]))
}

/// Hurst index `(a1 + a2) / 2` of the field.
pub fn fprf_hurst(alpha1: Alpha, alpha2: Alpha) -> f64 {
    0.5 * (alpha1.value() + alpha2.value())
}

/// `e^{-mu} mu^k / k!` for `k = 0..=k_max` into `out`, given `ln k!`.
fn poisson_row(mu: f64, ln_fact: &[f64], out: &mut [f64]) {
    if mu == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if mu < 500.0 {
        let mut p = (-mu).exp();
        for (k, o) in out.iter_mut().enumerate() {
            if k > 0 {
                p *= mu / k as f64;
            }
            *o = p;
        }
    } else {
        let ln_mu = mu.ln();
        for (k, o) in out.iter_mut().enumerate() {
            *o = (k as f64 * ln_mu - mu - ln_fact[k]).exp();
        }
    }
}

/// Monte Carlo pmf of the field at `(t1, t2)` by the double sum
/// `N^{-2} sum_i sum_j P(Poisson(lambda X_i Y_j) = k)` over independent draws
/// `X_i ~ Y1(t1)`, `Y_j ~ Y2(t2)`.
///
/// Draw `i` of both samples comes from stream `i` of `seed`. Standard errors
/// follow the two-sample V-statistic: `sqrt((var of row means + var of column
/// means) / N)`. The tail mass is the same average of Poisson tails.
#[allow(clippy::too_many_arguments)]
pub fn fprf_pmf_mc(
    alpha1: Alpha,
    alpha2: Alpha,
    lambda: f64,
    t1: f64,
    t2: f64,
    k_max: usize,
    n_mc: usize,
    seed: u64,
    jobs: usize,
) -> Result<Pmf> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    check_point((t1, t2))?;
    if n_mc < 2 {
        return Err(domain(format!("the Monte Carlo pmf needs n_mc >= 2, got {n_mc}")));
    }
    let draws = montecarlo::run(n_mc, seed, jobs, |_, rng| {
        let x = sample_inverse_at(alpha1, t1, rng);
        (x, sample_inverse_at(alpha2, t2, rng))
    })?;
    let xs: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let ys: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let ln_fact: Vec<f64> = (0..=k_max).map(|k| ln_gamma(k as f64 + 1.0)).collect();
    let n = n_mc as f64;
    // average over the other sample of the pmf, for each draw of one sample
    let marginal = |own: &[f64], other: &[f64]| -> Result<Vec<Vec<f64>>> {
        montecarlo::map(own.len(), jobs, |i| {
            let mut acc = vec![0.0; k_max + 1];
            let mut row = vec![0.0; k_max + 1];
            for &o in other {
                poisson_row(lambda * own[i] * o, &ln_fact, &mut row);
                acc.iter_mut().zip(&row).for_each(|(a, r)| *a += r);
            }
            acc.iter_mut().for_each(|a| *a /= n);
            acc
        })
    };
    let rows = marginal(&xs, &ys)?;
    let cols = marginal(&ys, &xs)?;
    let mut probs = vec![0.0; k_max + 1];
    let mut errors = vec![0.0; k_max + 1];
    for k in 0..=k_max {
        let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n;
        let var_of = |m: &[Vec<f64>]| m.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        probs[k] = mean;
        errors[k] = ((var_of(&rows) + var_of(&cols)) / n).sqrt();
    }
    let mut pmf = Pmf::from_probs(probs);
    pmf.standard_errors = Some(errors);
    Ok(pmf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(x: f64) -> Alpha {
        Alpha::new(x).unwrap()
    }

    #[test]
    fn classical_constants() {
        let (c1, c2) = variance_constants(a(1.0), a(1.0));
        assert_eq!(c1, 0.0);
        assert_eq!(c2, 1.0);
        let r = fprf_moments(a(1.0), a(1.0), 3.0, (2.0, 1.5), (2.0, 1.5)).unwrap();
        assert!((r.variance - 9.0).abs() < 1e-12);
    }

    #[test]
    fn mean_value() {
        let r = fprf_moments(a(0.9), a(0.75), 100.0, (1.0, 1.0), (1.0, 1.0)).unwrap();
        assert!((r.mean - 113.13).abs() < 0.01, "{}", r.mean);
    }

    #[test]
    fn deterministic_time_change() {
        let (t, s) = ((2.0, 3.0), (1.5, 4.0));
        let r = parameter_change_cov(&DeterministicInputs { lambda: 2.5 }, t, s).unwrap();
        assert!((r.cov[0].value - 2.5 * 1.5 * 3.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_covariance_is_variance() {
        for &(t1, t2) in &[(0.7, 2.0), (3.0, 0.2), (1.0, 1.0)] {
            let r = fprf_moments(a(0.6), a(0.85), 4.0, (t1, t2), (t1, t2)).unwrap();
            assert!((r.cov[0].value - r.variance).abs() <= 1e-10 * r.variance);
        }
    }

    #[test]
    fn engine_matches_closed_form() {
        for &(t, s) in &[((1.0, 2.0), (0.5, 3.0)), ((2.0, 2.0), (1.0, 1.0)), ((0.3, 4.0), (0.9, 0.1))] {
            let e = fprf_moments(a(0.9), a(0.75), 20.0, t, s).unwrap();
            let c = fprf_moments_closed_form(a(0.9), a(0.75), 20.0, t, s).unwrap();
            for (x, y) in [(e.mean, c.mean), (e.variance, c.variance), (e.cov[0].value, c.cov[0].value)] {
                assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0), "{x} {y}");
            }
        }
    }

    #[test]
    fn variance_growth_exponent() {
        let (a1, a2) = (a(0.6), a(0.8));
        let v = |t: f64| fprf_moments(a1, a2, 1.0, (t, t), (t, t)).unwrap().variance;
        let slope = (v(1e4).ln() - v(1e2).ln()) / (1e4f64.ln() - 1e2f64.ln());
        assert!((slope - 2.0 * (0.6 + 0.8)).abs() < 0.02, "{slope}");
        assert!((fprf_hurst(a1, a2) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn classical_pmf_is_poisson() {
        let p = fprf_pmf_mc(a(1.0), a(1.0), 2.0, 1.5, 2.0, 20, 10, 3, 1).unwrap();
        let q = crate::processes::poisson_pmf(6.0, 20);
        for k in 0..=20 {
            assert!((p.probs[k] - q[k]).abs() < 1e-14, "{k}: {} {}", p.probs[k], q[k]);
            assert!(p.standard_errors.as_ref().unwrap()[k] < 1e-15);
        }
    }

    #[test]
    fn mc_pmf_mean_and_normalization() {
        let (a1, a2) = (a(0.5), a(0.75));
        let (lambda, t, n) = (10.0, 5.0, 1500);
        let p = fprf_pmf_mc(a1, a2, lambda, t, t, 200, n, 17, 0).unwrap();
        assert!((p.probs.iter().sum::<f64>() + p.tail_mass - 1.0).abs() < 1e-12);
        // Over all k the double sum has mean lambda * mean(X) * mean(Y); redraw
        // the same streams to get it and its V-statistic standard error.
        let draws = montecarlo::run(n, 17, 1, |_, rng| {
            let x = sample_inverse_at(a1, t, rng);
            (x, sample_inverse_at(a2, t, rng))
        })
        .unwrap();
        let nf = n as f64;
        let (mx, my) = (draws.iter().map(|d| d.0).sum::<f64>() / nf, draws.iter().map(|d| d.1).sum::<f64>() / nf);
        let var = |f: &dyn Fn(&(f64, f64)) -> f64| {
            let m = draws.iter().map(f).sum::<f64>() / nf;
            draws.iter().map(|d| (f(d) - m).powi(2)).sum::<f64>() / (nf - 1.0)
        };
        let se = lambda * ((var(&|d| d.0 * my) + var(&|d| mx * d.1)) / nf).sqrt();
        let full_mean = lambda * mx * my;
        let want = fprf_moments(a1, a2, lambda, (t, t), (t, t)).unwrap().mean;
        assert!((full_mean - want).abs() < 4.0 * se, "{full_mean} {want} {se}");
        // the truncated mean misses only what sits above k_max
        assert!(p.mean() <= full_mean && full_mean - p.mean() >= 200.0 * p.tail_mass);
    }
}
