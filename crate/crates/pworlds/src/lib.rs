//! Knowledge-base and distribution files plus the `pworlds` command line,
//! on top of [`pworlds_core`].

pub mod cli;
pub mod distfile;
pub mod error;
pub mod kbfile;

pub use distfile::{parse_dist, DistFile};
pub use error::{CliError, FileError};
pub use kbfile::{parse_assertion, parse_kb};
