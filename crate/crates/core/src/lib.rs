//! Weighted Kolmogorov-Smirnov-type goodness-of-fit statistics.
//!
//! The crate evaluates the sup-type statistics (Kolmogorov-Smirnov,
//! sup-Anderson-Darling and its log transform, Borovkov-Sycheva,
//! Eicker-Jaeschke, `[t(1-t)]^tau`-weighted) and the integral
//! Anderson-Darling statistic exactly from order statistics, describes the
//! alternative families used in power studies, and computes intermediate
//! efficiencies from shape functions.
//!
//! Everything here is `no_std` with `alloc`; the `std` feature only enables
//! `std::error::Error`-dependent conveniences in downstream crates.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod efficiency;
pub mod error;
pub mod models;
pub mod quad;
pub mod rng;
pub mod sample;
pub mod special;
pub mod statistics;

pub use error::Error;
pub use models::{AlternativeModel, LocalPath, Point, ShapeFunction};
pub use rng::{Philox4x32, RandomSource};
pub use sample::NullSample;
pub use statistics::{KappaRule, StatisticKind, StatisticSpec, StatisticValue};
