//! Caputo derivatives on grids, Laplace inversion, and residual checks of the
//! governing fractional equations.

pub mod caputo;
pub mod laplace;
pub mod residual;

pub use caputo::{caputo_l1, caputo_mixed_l1, GridFunction, GridFunction2};
pub use laplace::{gaver_stehfest, hyperbolic, laplace_invert, talbot, InversionMethod};
pub use residual::{
    classical_field_residual, classical_field_rhs, eigenfunction_residual, fde_residual_fpp, fde_residual_fprf,
    fde_residual_fprf_detail, fde_residual_mfpp, ErrorModel, FieldResidual, FieldResidualConfig, GridSpec,
    ResidualGrid, ResidualReport,
};
