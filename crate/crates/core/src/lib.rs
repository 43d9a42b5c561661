pub mod error;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
pub mod sampling;
pub mod percolation;
pub mod paths;
pub mod aba;
pub mod hierarchy;
pub mod verify;
pub mod experiment;
