//! Command-line verification suites.

pub mod parse;
pub mod report;
pub mod suites;

pub use parse::{format_surface_spec, parse_insertion, parse_surface_spec, ParseError};
pub use report::{Format, Row, SuiteReport};
pub use suites::{run_suite, InputError, VerifyOptions, SUITES};
