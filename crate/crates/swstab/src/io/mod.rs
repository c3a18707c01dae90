//! Run configuration, result bundles, CSV series and binary checkpoints.

pub mod checkpoint;
pub mod config;
pub mod csv;
pub mod report;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use config::{OutputFormat, RunConfig};
pub use csv::{read_series, write_series, write_trace, Series};
pub use report::{write_bundle, write_timings, ReportBundle};
