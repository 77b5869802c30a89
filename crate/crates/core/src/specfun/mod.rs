//! Mittag-Leffler family, Wright function, and stable-type densities.

pub mod density;
pub mod gamma;
pub mod mittag_leffler;
mod series;
pub mod wright;

pub use crate::params::Alpha;
pub use density::{inverse_stable_density, mixed_inverse_density, stable_density};
pub use mittag_leffler::{mittag_leffler, mittag_leffler2, mittag_leffler3, ml_evaluate, Accuracy, MlRegime, MlValue};
pub use wright::wright;
