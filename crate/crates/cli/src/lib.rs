//! Scenario-driven front end for the `logman` numerical laboratory.

pub mod app;
pub mod commands;
pub mod config;
pub mod expr;
pub mod scenario;
