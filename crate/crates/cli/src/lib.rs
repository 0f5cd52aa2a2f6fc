//! Command-line front end for the `udw-core` library.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod table;
