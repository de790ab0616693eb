// `!(x < y)` is used on purpose so NaN takes the rejecting branch; index loops
// mirror the matrix formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::should_implement_trait, clippy::too_many_arguments)]

pub mod asymptotics;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod orbit;
pub mod poly;
pub mod presets;
pub mod report;
pub mod sequences;
pub mod series;
pub mod space;
pub mod summation;

pub use error::{Error, Result};
pub use poly::C;
