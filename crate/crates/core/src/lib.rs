pub mod calibration;
pub mod data_io;
pub mod error;
pub mod objective;
pub mod pricing;
pub mod report;
pub mod simulation;
pub mod types;
pub mod variance;

pub use error::{Error, Result};
pub use types::*;
