// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, file formats and subcommands of the `qpmp` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod tables;

pub use error::{CliError, CliResult};
