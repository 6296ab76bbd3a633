pub mod cli;
pub mod codec;
pub mod error;
pub mod prob;
pub mod regions;
pub mod rng;
pub mod typicality;

pub use error::{Error, Result};
