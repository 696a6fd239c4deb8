pub mod bootstrap;
pub mod dataset;
pub mod distributions;
pub mod error;
pub mod extrinsic;
pub mod fixtures;
pub mod linalg;
pub mod plot;
pub mod projective;
pub mod report;
pub mod reproduce;
pub mod rotation;
pub mod shape;
pub mod tangent;
pub mod tolerance;

pub use error::{Error, Result};
