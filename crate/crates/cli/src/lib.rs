//! Support library for the `sdci` binary: file formats, flag resolution,
//! config parsing, and exit-code mapping.

pub mod config;
pub mod errors;
pub mod family;
pub mod records;
