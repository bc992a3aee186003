pub mod calibration;
pub mod covariates;
pub mod engine;
pub mod error;
pub mod events;
pub mod geo_variables;
pub mod geojson;
pub mod geometry;
pub mod io;
pub mod noreg;
pub mod spatial;
pub mod temporal;

pub use error::{Error, Result};
