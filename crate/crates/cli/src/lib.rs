//! Library side of the `eqopt` CLI: configuration, benchmark
//! orchestration, plotting and the command implementations.

pub mod bench;
pub mod commands;
pub mod config;
pub mod plot;
