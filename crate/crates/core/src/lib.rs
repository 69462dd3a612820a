pub mod boundary;
pub mod cli;
pub mod bulk;
pub mod error;
pub mod geometry;
pub mod generator;
pub mod goursat;
pub mod modular;
pub mod numerics;

pub use error::{Error, Result};
