//! File formats, parallel sweeps, reports and command implementations on
//! top of `dindex-core`.

pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod fsutil;
pub mod report;
pub mod snapshot;
pub mod sweep;
pub mod text;

pub use config::{RecodeThreshold, RunConfig};
pub use error::{Error, Result};
pub use report::Section;
