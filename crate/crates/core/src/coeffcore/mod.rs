//! Exact scalar, series and polynomial arithmetic shared by every other module.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod series;
pub mod upoly;

pub use field::{Fe, FieldSpec, Q};
pub use poly::{poly_divide_exact, BivariatePoly, Mono};
pub use series::{series_arith, series_compose, SeriesOp, TruncatedSeries};
