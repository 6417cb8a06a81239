//! JSON/CSV front end for `lumpkit-core`.

pub mod cli;
pub mod io;
