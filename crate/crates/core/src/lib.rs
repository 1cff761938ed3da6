pub mod cli;
pub mod determinacy;
pub mod distributions;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod sampling;
pub mod stieltjes;

pub use error::{Error, Result};
