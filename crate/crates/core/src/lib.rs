pub mod delta1d;
pub mod ensembles;
pub mod error;
pub mod jacobians;
pub mod linalg;
pub mod mc;
pub mod quad;
pub mod specialfn;
pub mod statcheck;
pub mod rng;

pub use error::{Error, Result};
