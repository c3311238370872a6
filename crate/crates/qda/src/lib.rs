//! File formats, parallel evaluation and the command line for
//! quasi-distribution appraisal of FEA design cases.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod plot;

pub use cli::run;
pub use error::{AppError, ParseError};
