//! File formats and the command line front end for [`mhmm_core`].

pub mod cli;
pub mod csvio;
pub mod error;
pub mod modelfile;
pub mod report;
pub mod spec;

pub use error::{Category, Error, Result};
pub use mhmm_core;
