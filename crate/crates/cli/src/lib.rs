//! Command line tools and the suggestion service.

pub mod commands;
pub mod config;
pub mod service;
