//! Floating-point validation of the symbolic zero expansions.

pub mod bigcomplex;
pub mod theta;
pub mod zero_find;

pub use theta::{theta_dx, theta_eval, EvalResult, Precision};
pub use zero_find::{
    convergence_sweep, find_zero, Regime, SweepRow, SweepTable, ZeroFindParams, ZeroFindReport,
};
