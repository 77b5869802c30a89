use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::export::{format_float, write_csv};
use crate::params::Alpha;
use crate::processes::MAX_EVENTS;
use crate::sampling::RandomSource;
use crate::subordinate::{invert_path, simulate_subordinator, InversePath};

/// Largest `lambda * delta^2` for which the Bernoulli cell law is accepted.
pub const BERNOULLI_MAX_CELL_MEAN: f64 = 0.1;
pub const MAX_FIELD_DELTA: f64 = 0.01;

/// Points of a planar counting measure in the window `[0, window]^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarPoints {
    pub points: Vec<(f64, f64)>,
    pub window: f64,
    pub lambda: f64,
}

impl PlanarPoints {
    /// Number of points in `[0, a] x [0, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> u64 {
        self.points.iter().filter(|&&(x, y)| x <= a && y <= b).count() as u64
    }

    /// Number of points in `(a1, b1] x (a2, b2]`.
    pub fn count_in_rectangle(&self, (a1, a2): (f64, f64), (b1, b2): (f64, f64)) -> u64 {
        self.points.iter().filter(|&&(x, y)| x > a1 && x <= b1 && y > a2 && y <= b2).count() as u64
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        write_csv(path, &["x", "y"], self.points.iter().map(|&(x, y)| [format_float(x), format_float(y)]))
    }

    fn sort(&mut self) {
        self.points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
}

/// How many points a cell of the operational grid receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellLaw {
    #[default]
    Poisson,
    Bernoulli,
}

/// A simulated field together with the inverse paths that drive it. For the
/// homogeneous field both paths are the identity.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub points: PlanarPoints,
    pub first: InversePath,
    pub second: InversePath,
}

impl FieldSample {
    pub fn homogeneous(points: PlanarPoints) -> Self {
        let delta = points.window / 1000.0;
        let first = InversePath::identity(delta, points.window);
        Self { second: first.clone(), first, points }
    }
}

fn check_field(lambda: f64, window: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(domain(format!("window must be positive, got {window}")));
    }
    Ok(())
}

fn check_count(n: u64) -> Result<()> {
    if n as usize > MAX_EVENTS {
        return Err(Error::Resource(format!("field would hold {n} points, above the cap of {MAX_EVENTS}")));
    }
    Ok(())
}

/// Homogeneous Poisson field: a `Poisson(lambda S^2)` count of uniform points.
pub fn simulate_prf(lambda: f64, window: f64, rng: &mut RandomSource) -> Result<PlanarPoints> {
    check_field(lambda, window)?;
    let n = rng.poisson(lambda * window * window);
    check_count(n)?;
    let mut field = PlanarPoints { points: Vec::with_capacity(n as usize), window, lambda };
    for _ in 0..n {
        let x = window * rng.uniform();
        let y = window * rng.uniform();
        field.points.push((x, y));
    }
    field.sort();
    Ok(field)
}

/// Cells of the operational grid that meet `[0, window]`: cell `n` spans
/// calendar times `jump_times[n]..jump_times[n + 1]`.
fn cells_in_window(path: &InversePath, window: f64) -> usize {
    path.jump_times[..path.jump_times.len() - 1].partition_point(|&s| s < window)
}

/// Calendar time of operational position `u`, linear inside its cell.
fn calendar(path: &InversePath, u: f64) -> f64 {
    let pos = u / path.delta;
    let n = (pos.floor() as usize).min(path.jump_times.len() - 2);
    let (a, b) = (path.jump_times[n], path.jump_times[n + 1]);
    a + (pos - n as f64).clamp(0.0, 1.0) * (b - a)
}

/// Fractional Poisson field `N(Y1(t1), Y2(t2))` on `[0, window]^2`.
///
/// Each cell `(s1_n, s1_{n+1}) x (s2_m, s2_{m+1})` of the two grid inverse
/// paths (operational area `delta^2`) receives a count with mean
/// `lambda delta^2`, placed uniformly in the cell. With the Poisson law the
/// cells are filled at once as a homogeneous Poisson field in operational
/// coordinates, which has the same law as independent per-cell counts.
pub fn simulate_fprf(
    alpha1: Alpha,
    alpha2: Alpha,
    lambda: f64,
    window: f64,
    delta: f64,
    cell_law: CellLaw,
    rng: &mut RandomSource,
) -> Result<FieldSample> {
    check_field(lambda, window)?;
    if !(delta > 0.0 && delta <= MAX_FIELD_DELTA) {
        return Err(domain(format!("delta must lie in (0, {MAX_FIELD_DELTA}], got {delta}")));
    }
    let cell_mean = lambda * delta * delta;
    if cell_law == CellLaw::Bernoulli && cell_mean >= BERNOULLI_MAX_CELL_MEAN {
        return Err(domain(format!(
            "Bernoulli cells need lambda*delta^2 < {BERNOULLI_MAX_CELL_MEAN}, got {cell_mean}"
        )));
    }
    let first = invert_path(&simulate_subordinator(alpha1, delta, window, rng)?);
    let second = invert_path(&simulate_subordinator(alpha2, delta, window, rng)?);
    let (n1, n2) = (cells_in_window(&first, window), cells_in_window(&second, window));
    let mut operational = Vec::new();
    match cell_law {
        CellLaw::Poisson => {
            let (l1, l2) = (n1 as f64 * delta, n2 as f64 * delta);
            let n = rng.poisson(lambda * l1 * l2);
            check_count(n)?;
            for _ in 0..n {
                let u = l1 * rng.uniform();
                let v = l2 * rng.uniform();
                operational.push((u, v));
            }
        }
        CellLaw::Bernoulli => {
            // occupied cells found by geometric skips over the row-major order
            let total = n1 as u64 * n2 as u64;
            let ln_miss = (-cell_mean).ln_1p();
            let mut cell = 0u64;
            loop {
                cell += (rng.uniform().ln() / ln_miss).floor() as u64;
                if cell >= total {
                    break;
                }
                check_count(operational.len() as u64 + 1)?;
                let (i, j) = (cell / n2 as u64, cell % n2 as u64);
                let u = (i as f64 + rng.uniform()) * delta;
                let v = (j as f64 + rng.uniform()) * delta;
                operational.push((u, v));
                cell += 1;
            }
        }
    }
    let mut points = PlanarPoints { points: Vec::with_capacity(operational.len()), window, lambda };
    for (u, v) in operational {
        let (x, y) = (calendar(&first, u), calendar(&second, v));
        if x <= window && y <= window {
            points.points.push((x, y));
        }
    }
    points.sort();
    Ok(FieldSample { points, first, second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_and_se;

    #[test]
    fn prf_mean_count() {
        let counts: Vec<f64> =
            (0..10_000).map(|i| simulate_prf(10.0, 2.0, &mut RandomSource::new(5, i)).unwrap().len() as f64).collect();
        let (m, se) = mean_and_se(&counts);
        assert!((m - 40.0).abs() < 4.0 * se, "{m} {se}");
    }

    #[test]
    fn prf_quadrants_uncorrelated() {
        let pairs: Vec<(f64, f64)> = (0..10_000)
            .map(|i| {
                let f = simulate_prf(10.0, 2.0, &mut RandomSource::new(6, i)).unwrap();
                (f.count_in(1.0, 1.0) as f64, f.count_in_rectangle((1.0, 1.0), (2.0, 2.0)) as f64)
            })
            .collect();
        let n = pairs.len() as f64;
        let (ma, mb) = (pairs.iter().map(|p| p.0).sum::<f64>() / n, pairs.iter().map(|p| p.1).sum::<f64>() / n);
        let cov: f64 = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / (n - 1.0);
        let corr = cov / (ma * mb).sqrt();
        assert!(corr.abs() < 4.0 / n.sqrt(), "{corr}");
    }

    #[test]
    fn tiny_rate_is_empty() {
        assert!(simulate_prf(1e-12, 1.0, &mut RandomSource::new(1, 0)).unwrap().is_empty());
    }

    #[test]
    fn fprf_points_inside_window() {
        let a = Alpha::new(0.8).unwrap();
        let f = simulate_fprf(a, a, 50.0, 1.0, 1e-3, CellLaw::Poisson, &mut RandomSource::new(2, 0)).unwrap();
        assert!(f.points.points.iter().all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)));
        assert!(f.first.horizon() > 1.0 && f.second.horizon() > 1.0);
    }

    #[test]
    fn bernoulli_gate() {
        let a = Alpha::new(0.8).unwrap();
        let r = simulate_fprf(a, a, 2000.0, 1.0, 0.01, CellLaw::Bernoulli, &mut RandomSource::new(2, 0));
        assert!(matches!(r, Err(Error::Domain(_))));
        let r = simulate_fprf(a, a, 20.0, 1.0, 0.02, CellLaw::Poisson, &mut RandomSource::new(2, 0));
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
