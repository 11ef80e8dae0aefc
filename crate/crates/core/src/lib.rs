pub mod cartan;
pub mod classical;
pub mod error;
pub mod freealg;
pub mod kz;
pub mod linalg;
pub mod qmodules;
pub mod qpairing;
pub mod rmatrix;
pub mod scalars;

pub use error::{Error, Result};
