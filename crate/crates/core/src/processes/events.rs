use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::{format_float, write_csv};

/// Largest number of events a single simulated path may hold.
pub const MAX_EVENTS: usize = 10_000_000;

/// Jump times of a counting process observed on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventTimes {
    pub times: Vec<f64>,
    pub horizon: f64,
}

impl EventTimes {
    pub fn empty(horizon: f64) -> Self {
        Self { times: Vec::new(), horizon }
    }

    /// `N(t)`, the number of events in `[0, t]`.
    pub fn count_at(&self, t: f64) -> u64 {
        self.times.partition_point(|&x| x <= t) as u64
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Strictly increasing and inside `[0, horizon]`.
    pub fn is_simple(&self) -> bool {
        self.times.windows(2).all(|w| w[1] > w[0])
            && self.times.first().is_none_or(|&t| t >= 0.0)
            && self.times.last().is_none_or(|&t| t <= self.horizon)
    }

    pub(crate) fn push(&mut self, t: f64) -> Result<()> {
        if self.times.len() >= MAX_EVENTS {
            return Err(Error::Resource(format!("path exceeded {MAX_EVENTS} events")));
        }
        // events landing on the same floating-point time are separated by one ulp
        let t = match self.times.last() {
            Some(&prev) if t <= prev => prev.next_up(),
            _ => t,
        };
        self.times.push(t);
        Ok(())
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        write_csv(path, &["t"], self.times.iter().map(|&t| [format_float(t)]))
    }
}

/// `P(N = k)` for `k = 0..=k_max` and the mass above `k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    pub k_max: usize,
    pub probs: Vec<f64>,
    pub tail_mass: f64,
    /// Monte Carlo standard error per `k`, when estimated by sampling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_errors: Option<Vec<f64>>,
}

impl Pmf {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        let tail_mass = 1.0 - probs.iter().sum::<f64>();
        Self { k_max: probs.len() - 1, probs, tail_mass, standard_errors: None }
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs.iter().enumerate().map(|(k, p)| (k as f64 - m).powi(2) * p).sum()
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        write_csv(path, &["k", "p"], self.probs.iter().enumerate().map(|(k, &p)| [k.to_string(), format_float(p)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting() {
        let mut e = EventTimes::empty(3.0);
        for t in [0.5, 1.0, 1.0, 2.5] {
            e.push(t).unwrap();
        }
        assert!(e.is_simple());
        assert_eq!(e.count_at(0.4), 0);
        assert_eq!(e.count_at(1.0), 2);
        assert_eq!(e.count_at(1.1), 3);
        assert_eq!(e.count_at(3.0), 4);
    }

    #[test]
    fn pmf_summaries() {
        let p = Pmf::from_probs(vec![0.25, 0.5, 0.25]);
        assert_eq!(p.k_max, 2);
        assert!(p.tail_mass.abs() < 1e-15);
        assert!((p.mean() - 1.0).abs() < 1e-15);
        assert!((p.variance() - 0.5).abs() < 1e-15);
    }
}
