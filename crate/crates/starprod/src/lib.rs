//! Expression parser, JSON and DOT encodings and the command-line front end
//! for `starprod-core`.

pub mod cli;
mod error;
pub mod expr;
pub mod formats;

pub use error::Error;
