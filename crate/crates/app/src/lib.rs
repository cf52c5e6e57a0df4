//! CLI and HTTP front ends over `pdei_core`.

pub mod api;
pub mod cli;
pub mod server;
