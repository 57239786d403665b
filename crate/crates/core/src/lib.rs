//! Simulation framework for clean-label data poisoning: hypothesis
//! classes, learners with robustness guarantees, the attackers that make
//! the lower bounds tight, and a Monte-Carlo engine measuring attackable
//! rates.

pub mod attackers;
pub mod base;
pub mod classes;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod learners;

pub use error::{Error, Result};
