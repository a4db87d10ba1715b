//! Exact computational homotopical algebra over the rationals.

pub mod acceptance;
pub mod convolution;
pub mod deformation;
pub mod dupont;
pub mod error;
pub mod freelie;
pub mod graded;
pub mod htt;
pub mod lin;
pub mod linalg;
pub mod linfty;
pub mod mcspace;
pub mod scalar;
pub mod solvers;
pub mod trees;

pub use error::{Error, Result};
pub use lin::{Graded, Lin};
pub use scalar::Q;
