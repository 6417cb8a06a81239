//! Compartmental systems, exact linear lumping and realizability of lumped
//! models.
//!
//! `no_std` with `alloc`. The companion `lumpkit` crate adds JSON/CSV I/O
//! and a command-line front end.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod families;
pub mod fixtures;
pub mod linalg;
pub mod lumping;
pub mod model;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
pub mod realizer;

pub use error::{Error, Result};
pub use linalg::{Matrix, Tolerances, C64};
pub use model::CompartmentalModel;
