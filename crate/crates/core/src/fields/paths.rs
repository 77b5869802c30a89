use std::path::Path;

use super::points::{FieldSample, PlanarPoints};
use crate::error::{domain, invalid, Error, Result};
use crate::export::{format_float, write_csv};
use crate::processes::{ConsistentFunction, EventTimes};

/// Increasing path `t -> (G1(t), G2(t))` from the origin, each coordinate a
/// nondecreasing table read by linear interpolation, used on `[0, t_end]`.
#[derive(Debug, Clone)]
pub struct IncreasingPath {
    pub first: ConsistentFunction,
    pub second: ConsistentFunction,
    pub t_end: f64,
}

impl IncreasingPath {
    pub fn new(first: ConsistentFunction, second: ConsistentFunction, t_end: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(domain(format!("path horizon must be positive, got {t_end}")));
        }
        Ok(Self { first, second, t_end })
    }

    /// `G(t) = (t, t)` on `[0, t_end]`.
    pub fn diagonal(t_end: f64) -> Result<Self> {
        Self::new(ConsistentFunction::linear(1.0)?, ConsistentFunction::linear(1.0)?, t_end)
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        (self.first.eval(t), self.second.eval(t))
    }

    /// First time the rectangle `[0, G(t)]` contains `(x, y)`.
    fn entry_time(&self, (x, y): (f64, f64)) -> Option<f64> {
        let t = self.first.first_reach(x)?.max(self.second.first_reach(y)?);
        (t <= self.t_end).then_some(t)
    }

    fn check_window(&self, window: f64) -> Result<()> {
        let (g1, g2) = self.eval(self.t_end);
        if g1 > window || g2 > window {
            return Err(invalid(format!(
                "path reaches ({g1}, {g2}) at t={}, outside the window [0, {window}]^2",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Counts `N([0, G1(t)] x [0, G2(t)])` at evaluation times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples: Vec<(f64, u64)>,
}

impl Trace {
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        write_csv(path, &["t", "count"], self.samples.iter().map(|&(t, c)| [format_float(t), c.to_string()]))
    }
}

/// Jump times of the trace of the field along the path.
pub fn trace_events(points: &PlanarPoints, path: &IncreasingPath) -> Result<EventTimes> {
    path.check_window(points.window)?;
    let mut times: Vec<f64> = points.points.iter().filter_map(|&p| path.entry_time(p)).collect();
    times.sort_by(f64::total_cmp);
    let mut events = EventTimes::empty(path.t_end);
    for t in times {
        events.push(t)?;
    }
    Ok(events)
}

/// The trace at `n_eval` equally spaced times in `[0, t_end]`.
pub fn trace_along_path(points: &PlanarPoints, path: &IncreasingPath, n_eval: usize) -> Result<Trace> {
    if n_eval < 2 {
        return Err(domain(format!("need at least two evaluation points, got {n_eval}")));
    }
    let events = trace_events(points, path)?;
    let samples = (0..n_eval)
        .map(|i| {
            let t = path.t_end * i as f64 / (n_eval - 1) as f64;
            (t, events.count_at(t))
        })
        .collect();
    Ok(Trace { samples })
}

/// Compensator `lambda Y1(G1(t)) Y2(G2(t))` of the trace, with the inverse
/// paths read linearly.
pub fn trace_compensator(sample: &FieldSample, path: &IncreasingPath, lambda: f64, t: f64) -> f64 {
    let (g1, g2) = path.eval(t);
    lambda * sample.first.eval_linear(g1) * sample.second.eval_linear(g2)
}

/// The trace re-indexed by its compensator: event `j` of the trace at time
/// `t_j` moves to `s_j = lambda Y1(G1(t_j)) Y2(G2(t_j))`. The result on
/// `[0, s_end]` is a unit-rate Poisson process.
pub fn reparametrize_to_standard(
    sample: &FieldSample,
    path: &IncreasingPath,
    lambda: f64,
    s_end: f64,
) -> Result<EventTimes> {
    if !(s_end.is_finite() && s_end > 0.0) {
        return Err(domain(format!("intensity horizon must be positive, got {s_end}")));
    }
    let reached = trace_compensator(sample, path, lambda, path.t_end);
    if reached < s_end {
        return Err(Error::Horizon(format!("intensity reaches only {reached} by t={}, below {s_end}", path.t_end)));
    }
    let trace = trace_events(&sample.points, path)?;
    let mut events = EventTimes::empty(s_end);
    for &t in &trace.times {
        let s = trace_compensator(sample, path, lambda, t);
        if s > s_end {
            break;
        }
        events.push(s)?;
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::points::simulate_prf;
    use crate::sampling::RandomSource;

    #[test]
    fn trace_is_nondecreasing_and_frozen() {
        let f = simulate_prf(30.0, 2.0, &mut RandomSource::new(3, 0)).unwrap();
        let path = IncreasingPath::diagonal(2.0).unwrap();
        let tr = trace_along_path(&f, &path, 101).unwrap();
        assert!(tr.samples.windows(2).all(|w| w[1].1 >= w[0].1));
        assert_eq!(tr.samples.last().unwrap().1, f.len() as u64);
        let frozen = ConsistentFunction::from_table(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        let path = IncreasingPath::new(frozen.clone(), frozen, 2.0).unwrap();
        let tr = trace_along_path(&f, &path, 101).unwrap();
        assert!(tr.samples[50..].iter().all(|s| s.1 == tr.samples[50].1));
        assert_eq!(tr.samples[50].1, f.count_in(1.0, 1.0));
    }

    #[test]
    fn path_outside_window() {
        let f = simulate_prf(30.0, 1.0, &mut RandomSource::new(3, 0)).unwrap();
        assert!(trace_along_path(&f, &IncreasingPath::diagonal(1.5).unwrap(), 10).is_err());
    }

    #[test]
    fn classical_reparametrization() {
        let f = simulate_prf(4.0, 2.0, &mut RandomSource::new(8, 0)).unwrap();
        let sample = FieldSample::homogeneous(f);
        let path = IncreasingPath::diagonal(2.0).unwrap();
        let trace = trace_events(&sample.points, &path).unwrap();
        let s = reparametrize_to_standard(&sample, &path, 4.0, 16.0).unwrap();
        assert_eq!(s.len(), trace.len());
        for (&t, &u) in trace.times.iter().zip(&s.times) {
            // T(s) = sqrt(s / lambda)
            assert!(((u / 4.0).sqrt() - t).abs() < 1e-12);
        }
        assert!(matches!(reparametrize_to_standard(&sample, &path, 4.0, 17.0), Err(Error::Horizon(_))));
    }
}
