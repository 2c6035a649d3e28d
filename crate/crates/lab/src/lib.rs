//! Command-line laboratory for `nullcurve`: run configuration, CSV/JSON/SVG
//! output, and the verification suite behind `nullcurve verify`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod verify;

pub use error::{LabError, LabResult};
