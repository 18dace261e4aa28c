//! Seeded sampling, batch runs and replay for the `schatten` binary.

pub mod config;
pub mod error;
pub mod matfile;
pub mod replay;
pub mod rng;
pub mod run;
pub mod sample;

pub use config::{RunConfig, Settings};
pub use error::{CliError, CliResult};
pub use run::{run, run_collect, Summary, TrialRecord};
pub use sample::{sample_instance, SampleSpec};
