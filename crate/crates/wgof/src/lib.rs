//! Monte Carlo calibration, power studies, moderate-deviation probes and
//! file formats for the statistics in `wgof-core`.
//!
//! Every simulation is reproducible from its seed: replicate `r` of an
//! experiment draws from a counter-based stream keyed by the seed, a hash of
//! the experiment label and `r`, and results are gathered in replicate
//! order, so outputs do not depend on the number of worker threads.

pub mod cache;
pub mod engine;
pub mod error;
pub mod figures;
pub mod input;
pub mod manifest;
pub mod parse;
pub mod power;
pub mod probe;
pub mod report;

pub use cache::CriticalCache;
pub use engine::{CriticalValue, Frequency, McConfig, Source, Workers};
pub use error::{Error, Result};
