//! Real interpolation of model Banach couples: K-functionals, dilation indices
//! and Fredholm classification of operators on `(X0, X1)_{θ,q}`.

pub mod classifier;
pub mod couples;
pub mod indices;
pub mod error;
pub mod kfunctional;
pub mod sequence;
pub mod quad;
pub mod worked;

pub use error::{Error, Result};
