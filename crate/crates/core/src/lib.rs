pub mod calibrate;
pub mod cli;
pub mod config;
pub mod energy;
pub mod error;
pub mod params;
pub mod penalty;
pub mod quadrature;
pub mod reliability;
pub mod report;
pub mod search;
pub mod sensitivity;
pub mod sim;
pub mod tables;

pub use error::{Error, Result};
