use serde::Serialize;

use crate::error::{domain, Result};
use crate::params::Alpha;
use crate::specfun::gamma::gamma;

/// Samples `u(n * step)` for `n = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub step: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn sample<F: Fn(f64) -> f64>(f: F, step: f64, points: usize) -> Self {
        Self { step, values: (0..points).map(|n| f(n as f64 * step)).collect() }
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.step
    }
}

/// Samples `u(i * steps[0], j * steps[1])` stored as `values[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction2 {
    pub steps: [f64; 2],
    pub values: Vec<Vec<f64>>,
}

impl GridFunction2 {
    pub fn sample<F: Fn(f64, f64) -> f64>(f: F, steps: [f64; 2], points: [usize; 2]) -> Self {
        let values = (0..points[0])
            .map(|i| (0..points[1]).map(|j| f(i as f64 * steps[0], j as f64 * steps[1])).collect())
            .collect();
        Self { steps, values }
    }
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(domain(format!("grid step must be positive, got {step}")));
    }
    Ok(())
}

/// Weights `w[m]` multiplying the increment `u_{n-m} - u_{n-m-1}` in the L1
/// approximation at `t_n`; the backward difference when `alpha = 1`.
pub(crate) fn l1_weights(alpha: Alpha, step: f64, len: usize) -> Vec<f64> {
    let a = alpha.value();
    if alpha.is_classical() {
        let mut w = vec![0.0; len];
        if let Some(first) = w.first_mut() {
            *first = 1.0 / step;
        }
        return w;
    }
    let scale = step.powf(-a) / gamma(2.0 - a);
    (0..len).map(|m| scale * ((m as f64 + 1.0).powf(1.0 - a) - (m as f64).powf(1.0 - a))).collect()
}

/// L1 scheme along one sequence of samples.
fn l1_apply(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    (0..values.len()).map(|n| (0..n).map(|m| weights[m] * increments[n - 1 - m]).sum()).collect()
}

/// Caputo derivative of order `alpha` by the L1 scheme (piecewise linear `u`);
/// error `O(step^{2 - alpha})` for smooth `u`. The value at `t = 0` is zero.
pub fn caputo_l1(u: &GridFunction, alpha: Alpha) -> Result<GridFunction> {
    check_step(u.step)?;
    let w = l1_weights(alpha, u.step, u.values.len());
    Ok(GridFunction { step: u.step, values: l1_apply(&u.values, &w) })
}

/// Mixed Caputo derivative of orders `(alpha1, alpha2)` by the tensor-product
/// L1 scheme: `u` bilinear on each cell, so the mixed second partial is the
/// cell's mixed difference over the cell area. The scheme factors into the
/// one-dimensional L1 operator along each axis in turn.
pub fn caputo_mixed_l1(u: &GridFunction2, alpha1: Alpha, alpha2: Alpha) -> Result<GridFunction2> {
    check_step(u.steps[0])?;
    check_step(u.steps[1])?;
    let rows = u.values.len();
    let cols = u.values.first().map_or(0, |r| r.len());
    if u.values.iter().any(|r| r.len() != cols) {
        return Err(domain("rows of a grid function must have equal length"));
    }
    let w1 = l1_weights(alpha1, u.steps[0], rows);
    let w2 = l1_weights(alpha2, u.steps[1], cols);
    // along the first axis for every column, then along the second
    let mut partial = vec![vec![0.0; cols]; rows];
    for j in 0..cols {
        let column: Vec<f64> = u.values.iter().map(|r| r[j]).collect();
        for (i, v) in l1_apply(&column, &w1).into_iter().enumerate() {
            partial[i][j] = v;
        }
    }
    let values = partial.iter().map(|r| l1_apply(r, &w2)).collect();
    Ok(GridFunction2 { steps: u.steps, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::mittag_leffler;

    fn a(x: f64) -> Alpha {
        Alpha::new(x).unwrap()
    }

    #[test]
    fn monomial() {
        let u = GridFunction::sample(|t| t, 1e-3, 1001);
        let d = caputo_l1(&u, a(0.5)).unwrap();
        assert!((d.values[1000] - std::f64::consts::FRAC_2_SQRT_PI).abs() < 5e-3);
        // piecewise linear data is differentiated exactly
        assert!((d.values[1000] - 1.0 / gamma(1.5)).abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_derivative() {
        let u = GridFunction::sample(|_| 3.5, 0.01, 50);
        assert!(caputo_l1(&u, a(0.3)).unwrap().values.iter().all(|&v| v == 0.0));
        let u = GridFunction2::sample(|t1, _| t1 * t1, [0.1, 0.1], [10, 10]);
        let d = caputo_mixed_l1(&u, a(0.4), a(0.7)).unwrap();
        assert!(d.values.iter().flatten().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn eigenfunction() {
        let (al, h) = (0.6, 1e-3);
        let e = |t: f64| mittag_leffler(al, -t.powf(al)).unwrap();
        let u = GridFunction::sample(e, h, 1001);
        let d = caputo_l1(&u, a(al)).unwrap();
        assert!((d.values[1000] + u.values[1000]).abs() < 1e-3);
    }

    #[test]
    fn quadratic_order() {
        let al = 0.4;
        let err = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let d = caputo_l1(&GridFunction::sample(|t| t * t, h, n + 1), a(al)).unwrap();
            (d.values[n] - 2.0 / gamma(3.0 - al)).abs()
        };
        let order = (err(2e-3) / err(1e-3)).log2();
        assert!(order >= 2.0 - al - 0.15, "{order}");
    }

    #[test]
    fn mixed_product() {
        let (a1, a2, h) = (0.3, 0.8, 0.05);
        let u = GridFunction2::sample(|x, y| x * y, [h, h], [21, 21]);
        let d = caputo_mixed_l1(&u, a(a1), a(a2)).unwrap();
        let want = 1.0 / (gamma(2.0 - a1) * gamma(2.0 - a2));
        assert!((d.values[20][20] - want).abs() < 1e-12);
    }

    #[test]
    fn mixed_classical_limit() {
        let h = 1e-3;
        let f = |x: f64, y: f64| (x * y).sin() + x * x * y;
        let u = GridFunction2::sample(f, [h, h], [801, 801]);
        let d = caputo_mixed_l1(&u, a(1.0), a(1.0)).unwrap();
        let (x, y): (f64, f64) = (0.8, 0.8);
        let exact = (x * y).cos() - x * y * (x * y).sin() + 2.0 * x;
        assert!((d.values[800][800] - exact).abs() < 5.0 * h);
    }
}
