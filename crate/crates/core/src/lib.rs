//! Fractional Poisson processes, mixed-fractional Poisson processes and
//! fractional Poisson random fields.

pub mod error;
pub mod export;
pub mod fields;
pub mod fraccalc;
pub mod montecarlo;
pub mod params;
pub mod processes;
pub mod quad;
pub mod sampling;
pub mod specfun;
pub mod stats;
pub mod subordinate;
pub mod validation;

pub use error::{Error, Result};
pub use params::{Alpha, MixedParams, SubordinatorLaw};
