//! Exact computation of analytic invariants of plane curve germs: the value
//! semiring, normalized generators with their jet-group action, Saito bases of
//! logarithmic vector fields, blow-up types and generic moduli dimensions.

pub mod blowup;
pub mod cli;
pub mod coeffcore;
pub mod curvegerm;
pub mod error;
pub mod normalform;
pub mod saito;
pub mod semiring;

pub use error::{Error, Result};
