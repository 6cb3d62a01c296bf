// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Reservoir-engineering problems with collision channels `ρ ↦ ρₖ − ρ`:
//! switch-grid oracle, bang-bang and singular-window checks, and the
//! cool-then-drive protocol report.

mod cc;
mod enumerate;
mod screen;
mod sequence;
mod theorems;

pub use cc::{cc_protocol_demo, CcProtocolReport, CcStructure};
pub use enumerate::{brute_force_bangbang, BangBangResult, BangBangSearch};
pub use screen::{
    collision_chain, controllability_screen, ChainTerm, ControllabilityScreen, SCREEN_RANK_TOL,
};
pub use sequence::{ChannelSchedule, SwitchSequence};
pub use theorems::{
    bang_fraction, irregular_windows, perturbation_invariance, verify_theorem3, verify_theorem4,
    Theorem3Report, Theorem3Settings, Theorem4Report, Theorem4Settings, WindowCheck, CHAIN_DEPTH,
};
