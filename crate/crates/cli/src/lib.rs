//! Job files in, certificates out.

pub mod cert;
pub mod error;
pub mod job;
pub mod run;
pub mod selftest;

pub use cert::{Bundle, Certificate};
pub use error::CliError;
pub use job::{load_toml, Job, Source};
pub use run::{exit_code, replay, run_job, Options};
