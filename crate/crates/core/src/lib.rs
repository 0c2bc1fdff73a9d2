pub mod abelian;
pub mod cli;
pub mod conetop;
pub mod error;
pub mod fintop;
pub mod lp;
pub mod monoid;
pub mod profile;
pub mod witness;

pub use error::{Error, Result};
