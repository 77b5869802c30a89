//! Fractional and mixed-fractional Poisson processes: simulation, pmfs and
//! moments.

mod events;
mod fpp;
mod mfpp;
mod timechange;

pub use events::{EventTimes, Pmf, MAX_EVENTS};
pub use fpp::{
    fpp_hurst, fpp_hurst_mc, fpp_moments, fpp_pmf, poisson_pmf, simulate_fpp_renewal, simulate_fpp_timechange,
    HurstEstimate,
};
pub use mfpp::{
    inverse_laplace_trinomial, mfpp_moments, mfpp_p0, mfpp_pmf, simulate_mfpp, MfppPmfMethod, P0Method, P0Value,
    DEFAULT_CONVOLUTION_STEPS,
};
pub use timechange::{apply_consistent_time_change, ConsistentFunction};
