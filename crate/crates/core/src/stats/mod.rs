//! Monte Carlo moment estimators, goodness-of-fit tests and the martingale
//! diagnostic. Estimators take pre-simulated samples.

mod hypothesis;
mod martingale;
mod moments;

pub use hypothesis::{
    chi_square_gof, chi_square_two_sample, ks_test, ks_two_sample, pool_bins, SuiteEntry, TestResult, DEFAULT_LEVEL,
};
pub use martingale::{martingale_diagnostic, MartingaleReport};
pub use moments::{mc_moments, mean_and_se, Coordinate, CovarianceEntry, MomentReport, SampleCount};
