//! Command-line front end and file formats for [`lane8_core`].
//!
//! * [`decimal`]: lossless decimal text for `f64` and double-double values.
//! * [`problem_file`]: `key = value` problem definitions.
//! * [`report`]: Markdown, CSV and JSON renderings of solves and sweeps.
//! * [`cli`]: the `lane8` subcommands.

pub mod cli;
pub mod decimal;
pub mod problem_file;
pub mod report;
