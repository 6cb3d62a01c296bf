// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

pub mod arcs;
pub mod dynamics;
pub mod error;
pub mod liouville;
pub mod models;
pub mod qre;
pub mod solver;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
