//! Command-line front end and HTTP stepping service for `bpom-core`.

pub mod commands;
pub mod error;
pub mod server;
pub mod session;
