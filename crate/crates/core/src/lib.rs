//! Exact series arithmetic for the partial theta function
//! `theta(q, x) = sum_{s>=0} q^(s(s+1)/2) x^s`: Laurent expansions of its
//! zeros in `q`, the stabilized coefficient sequence `r_k = [q^k] 1/(q)_inf^3`,
//! and numerical cross-checks.

// guards are written so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod numeric;
pub mod rk;
pub mod series;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
pub use rk::{RkMethod, RkTable};
pub use series::{euler_product, IntSeries, LaurentSeries};
pub use zeros::{solve_expansion, ZeroExpansion};
