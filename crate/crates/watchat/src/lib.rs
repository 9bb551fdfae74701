//! Service, REPL and CLI around `watchat-core`.

pub mod config;
pub mod dto;
pub mod engine;
pub mod http;
pub mod repl;
pub mod report;
pub mod session;
