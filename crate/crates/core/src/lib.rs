//! Temperley-Lieb loop models at finite size: link states, the diagram algebra,
//! the link representation, double-row and braid transfer matrices, Wenzl-Jones
//! projectors, Jordan-structure analysis and the Potts-model correspondence.

pub mod error;
pub mod link_rep;
pub mod linkspace;
pub mod matrix;
pub mod params;
pub mod potts;
pub mod scalar;
pub mod spectral;
pub mod tl_algebra;
pub mod transfer;
pub mod verify;
pub mod wenzl_jones;

pub use error::{Error, Result};
pub use linkspace::{LinkBasis, LinkState};
pub use matrix::Mat;
pub use params::{LambdaSpec, SpectralParams};
pub use scalar::{Precision, Scalar, XComplex};
