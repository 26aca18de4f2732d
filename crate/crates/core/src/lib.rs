pub mod analysis;
pub mod antenna;
pub mod association;
pub mod cli;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod quadrature;

pub use error::{Error, Result};
