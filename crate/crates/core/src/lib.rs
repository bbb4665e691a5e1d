pub mod error;
pub mod graph;
pub mod lattice;
pub mod capacity;
pub mod plaplace;
pub mod oracles;
pub mod wiener;
pub mod massiveness;
pub mod io;
pub mod selftest;
pub mod cli;

pub use error::{Error, Result};
