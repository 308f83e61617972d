//! Neutral-signature geometry on `R^{2n,2n}`: paracomplex and nilpotent
//! structures, flat connection forms, and the conformal Gauss map of
//! time-like minimal surfaces in `E^3_1`.

pub mod connection;
pub mod error;
pub mod expr;
pub mod exterior;
pub mod gauss;
pub mod generators;
pub mod neutral;
pub mod sampling;
pub mod structures;

pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use exterior::{DifferentialForm, MatrixForm};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
