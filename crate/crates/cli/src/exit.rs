//! Mapping from failures to process exit codes.

use std::fmt;

use tetra_tsp_core::Error;

pub const SUCCESS: u8 = 0;
/// Bad parameters, unparsable input, unwritable output.
pub const PRECONDITION: u8 = 2;
/// An exponential-time routine refused an instance that is too large.
pub const SIZE_GUARD: u8 = 3;
/// The benchmarked command could not produce a single successful run.
pub const EXTERNAL: u8 = 4;

/// Marker for failures of the external command under benchmark.
#[derive(Debug)]
pub struct ExternalFailure(pub String);

impl fmt::Display for ExternalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ExternalFailure {}

pub fn code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ExternalFailure>().is_some() {
        return EXTERNAL;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::SizeGuard { .. }) => SIZE_GUARD,
        _ => PRECONDITION,
    }
}
