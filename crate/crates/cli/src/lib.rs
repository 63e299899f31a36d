//! Parameter sweeps and oracle-comparison suites over `aho-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;
