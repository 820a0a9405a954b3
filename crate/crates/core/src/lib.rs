#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0.0) deliberately rejects NaN
#![allow(clippy::needless_range_loop)]

pub mod checks;
pub mod cli;
pub mod error;
pub mod frac_driven;
pub mod frac_static;
pub mod ml;
pub mod quad;
pub mod tls;
pub mod volterra;

mod dd;

pub use error::{Error, Result};
