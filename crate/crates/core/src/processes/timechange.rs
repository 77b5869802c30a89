use serde::Serialize;

use super::events::EventTimes;
use crate::error::{invalid, Error, Result};
use crate::sampling::RandomSource;
use crate::subordinate::InversePath;

/// Nondecreasing `Lambda` with `Lambda(0) = 0`, tabulated at knots and read by
/// linear interpolation; the last segment is extended. The interpolated
/// function is continuous, so it has no jumps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistentFunction {
    knots: Vec<(f64, f64)>,
}

impl ConsistentFunction {
    pub fn from_table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("a consistent function needs at least two knots"));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(invalid("a consistent function must start at (0, 0)"));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(invalid("knot abscissae must increase strictly"));
            }
            if !(w[1].1 >= w[0].1) || !w[1].1.is_finite() {
                return Err(invalid("a consistent function must be nondecreasing"));
            }
        }
        Ok(Self { knots })
    }

    /// `Lambda(u) = rate * u`.
    pub fn linear(rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(invalid(format!("rate must be nonnegative, got {rate}")));
        }
        Self::from_table(vec![(0.0, 0.0), (1.0, rate)])
    }

    pub fn zero() -> Self {
        Self { knots: vec![(0.0, 0.0), (1.0, 0.0)] }
    }

    fn segment(&self, i: usize) -> ((f64, f64), (f64, f64)) {
        let i = i.min(self.knots.len() - 2);
        (self.knots[i], self.knots[i + 1])
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| k.0 <= u).saturating_sub(1);
        let ((u0, v0), (u1, v1)) = self.segment(i);
        v0 + (v1 - v0) * (u - u0) / (u1 - u0)
    }

    /// Smallest `u` with `Lambda(u) >= level`, or `None` if never reached.
    pub fn first_reach(&self, level: f64) -> Option<f64> {
        if level <= 0.0 {
            return Some(0.0);
        }
        let i = self.knots.partition_point(|k| k.1 < level);
        let seg = if i >= self.knots.len() { self.knots.len() - 2 } else { i - 1 };
        let ((u0, v0), (u1, v1)) = self.segment(seg);
        if v1 <= v0 {
            return None;
        }
        Some(u0 + (level - v0) * (u1 - u0) / (v1 - v0))
    }
}

/// Jump times of `N(Lambda(Y(t)))` on `[0, t_end]` for a unit-rate Poisson
/// process `N`, with `Y` read linearly between grid points of `path`.
pub fn apply_consistent_time_change(
    inner: &ConsistentFunction,
    path: &InversePath,
    t_end: f64,
    rng: &mut RandomSource,
) -> Result<EventTimes> {
    if !(t_end > 0.0) {
        return Err(invalid(format!("horizon must be positive, got {t_end}")));
    }
    if path.horizon() <= t_end {
        return Err(Error::Horizon(format!(
            "inverse path known up to {} but events requested up to {t_end}",
            path.horizon()
        )));
    }
    let total = inner.eval(path.eval_linear(t_end));
    let mut events = EventTimes::empty(t_end);
    let mut level = rng.exponential();
    while level <= total {
        let internal = inner.first_reach(level).expect("level below the attained total");
        let t = path.time_of_level(internal).expect("level inside the known path").min(t_end);
        events.push(t)?;
        level += rng.exponential();
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_checks() {
        assert!(ConsistentFunction::from_table(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(ConsistentFunction::from_table(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(ConsistentFunction::linear(-1.0).is_err());
        let f = ConsistentFunction::from_table(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 2.0), (3.0, 5.0)]).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.5), 2.0);
        assert_eq!(f.eval(4.0), 8.0);
        assert_eq!(f.first_reach(2.0), Some(1.0));
        assert_eq!(f.first_reach(3.5), Some(2.5));
        assert_eq!(f.first_reach(8.0), Some(4.0));
        assert_eq!(ConsistentFunction::zero().first_reach(0.5), None);
    }

    #[test]
    fn zero_function_gives_no_events() {
        let path = InversePath::identity(0.01, 3.0);
        let mut rng = RandomSource::new(1, 0);
        let e = apply_consistent_time_change(&ConsistentFunction::zero(), &path, 2.0, &mut rng).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn short_path_is_rejected() {
        let path = InversePath::identity(0.01, 1.0);
        let mut rng = RandomSource::new(1, 0);
        let f = ConsistentFunction::linear(1.0).unwrap();
        assert!(matches!(apply_consistent_time_change(&f, &path, 5.0, &mut rng), Err(Error::Horizon(_))));
    }
}
