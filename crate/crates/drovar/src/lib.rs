//! Batch front end for `drovar-core`: reads CSV scenario data, computes
//! worst-case bounds, sweeps, oracle checks and robust solves, and writes
//! JSON to standard output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ingest;
pub mod report;
pub mod run;

pub use error::{CliError, Result};
pub use run::{run, Command, EtaSpec, Outcome, RunConfig};
