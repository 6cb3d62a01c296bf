// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Ready-made models: two-level testbeds, the Λ system and seeded random
//! Lindblad models.

mod lambda;
mod random;
mod two_level;

use std::fmt;
use std::str::FromStr;

use nalgebra::Complex;

pub use lambda::{
    build_lambda_system, lambda_harmonic_reference, LambdaSystemParams, UnitConvention,
};
pub use random::{random_density, random_hermitian, random_lindblad, RandomLindbladParams};
pub use two_level::{
    build_two_level, two_level_closed, two_level_collision, two_level_thermal,
    CollisionChannelSpec, Thermalization, TwoLevelSpec,
};

use crate::error::{Error, Result};
use crate::liouville::CMatrix;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// `|i⟩⟨j|` in dimension `n`.
pub fn ket_bra(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

/// `|v⟩⟨v|` for a normalized copy of `v`.
pub fn projector(v: &[Complex<f64>]) -> CMatrix {
    let n = v.len();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / (norm * norm))
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `|+⟩⟨+|` with `|+⟩ = (|0⟩ + |1⟩)/√2`.
pub fn plus_state() -> CMatrix {
    projector(&[c(1., 0.), c(1., 0.)])
}

/// Model identifiers accepted by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Lambda,
    TwoLevelClosed,
    TwoLevelThermal,
    TwoLevelCollision,
    RandomLindblad,
}

impl ModelId {
    pub const ALL: [ModelId; 5] = [
        ModelId::Lambda,
        ModelId::TwoLevelClosed,
        ModelId::TwoLevelThermal,
        ModelId::TwoLevelCollision,
        ModelId::RandomLindblad,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Lambda => "lambda",
            ModelId::TwoLevelClosed => "two-level-closed",
            ModelId::TwoLevelThermal => "two-level-thermal",
            ModelId::TwoLevelCollision => "two-level-collision",
            ModelId::RandomLindblad => "random-lindblad",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ModelId::ALL.iter().map(|m| m.as_str()).collect();
                Error::Parameter(format!(
                    "unknown model {s:?} (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}
