//! Command-line front end for `gpcompare-core`: CSV ingestion, test-grid
//! construction, report files and parallel benchmark runs.

pub mod bench;
pub mod compare;
mod error;
pub mod ingest;
pub mod output;

pub use compare::{run_compare, CompareOutcome, CompareRequest, ComparisonConfig, Inputs, Preset};
pub use error::{CliError, Result};
pub use ingest::{ingest_csv, Ingested};
