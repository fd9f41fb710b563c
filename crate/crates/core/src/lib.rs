//! Standard twists of L-functions in the extended Selberg class.

pub mod complexfn;
pub mod error;

pub use error::{Error, Result};
pub mod selberg;
pub mod catalog;
pub mod structural;
pub mod compat;
pub mod twist;
pub mod cli;
