//! Planar Poisson and fractional Poisson random fields: simulation, moments,
//! traces along increasing paths and the record construction.

pub mod moments;
pub mod paths;
pub mod points;
pub mod records;

pub use moments::{
    fprf_hurst, fprf_moments, fprf_moments_closed_form, fprf_pmf_mc, parameter_change_cov, variance_constants,
    CovInputs, DeterministicInputs, StableInputs,
};
pub use paths::{reparametrize_to_standard, trace_along_path, trace_compensator, trace_events, IncreasingPath, Trace};
pub use points::{simulate_fprf, simulate_prf, CellLaw, FieldSample, PlanarPoints};
pub use records::{gergely_yezhov_counts, RECORD_DRAW_CAP};
