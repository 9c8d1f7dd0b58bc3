//! Configuration handling and subcommands behind the `orbits` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod sweep;
