// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Hilbert-space dimension {0} (need N >= 2)")]
    InvalidDimension(usize),
    #[error("operator is not Hermitian (anti-Hermitian part norm {0:.3e})")]
    NotHermitian(f64),
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("negative rate {0}")]
    NegativeRate(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid bounds on channel {channel}: lower {lower} > upper {upper}")]
    InvalidBounds {
        channel: usize,
        lower: f64,
        upper: f64,
    },
    #[error("invalid control policy: {0}")]
    InvalidPolicy(String),
    #[error("propagation failed on interval {interval}: {reason}")]
    Propagation { interval: usize, reason: String },
    #[error("degenerate spectrum: subleading propagator eigenvalue modulus {modulus:.12} is within 1e-8 of unity")]
    DegenerateSpectrum { modulus: f64 },
    #[error("numerical rank deficiency: {0}")]
    NumericalRank(String),
    #[error("abnormal problem: costate vanishes identically (norm {0:.3e})")]
    Abnormal(f64),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no interior optimum in horizon bracket [{lower}, {upper}]: J(lower) = {j_lower}, J(upper) = {j_upper}, best at T = {best}")]
    Bracket {
        lower: f64,
        upper: f64,
        j_lower: f64,
        j_upper: f64,
        best: f64,
    },
    #[error("enumeration size {count} exceeds cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),
}
