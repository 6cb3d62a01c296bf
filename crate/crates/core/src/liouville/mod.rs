// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Real Liouville-space representation of Hermitian operators and
//! Hermiticity-preserving superoperators.

mod basis;
mod model;
mod superop;

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector};

pub use basis::{validate_density, HermitianBasis, HERMITICITY_TOL, STATE_TOL};
pub use model::{Bounds, ChannelKind, ControlChannel, QuantumModel};
pub use superop::{collision_superop, hamiltonian_superop, lindblad_superop};

pub type CMatrix = DMatrix<Complex<f64>>;

/// Coefficients of a Hermitian operator in a [`HermitianBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleVector(DVector<f64>);

impl LiouvilleVector {
    pub fn new(coeffs: DVector<f64>) -> Self {
        Self(coeffs)
    }

    pub fn zeros(len: usize) -> Self {
        Self(DVector::zeros(len))
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairing `⟨a|b⟩` of a bra with a ket.
    pub fn dot(&self, other: &LiouvilleVector) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        self.0[i] = value;
    }
}

impl From<DVector<f64>> for LiouvilleVector {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl Add for &LiouvilleVector {
    type Output = LiouvilleVector;
    fn add(self, rhs: Self) -> LiouvilleVector {
        LiouvilleVector(&self.0 + &rhs.0)
    }
}

impl Sub for &LiouvilleVector {
    type Output = LiouvilleVector;
    fn sub(self, rhs: Self) -> LiouvilleVector {
        LiouvilleVector(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &LiouvilleVector {
    type Output = LiouvilleVector;
    fn mul(self, rhs: f64) -> LiouvilleVector {
        LiouvilleVector(&self.0 * rhs)
    }
}

/// Real `N²×N²` matrix of a Liouville superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator(DMatrix<f64>);

impl Superoperator {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn zeros(size: usize) -> Self {
        Self(DMatrix::zeros(size, size))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn apply(&self, v: &LiouvilleVector) -> LiouvilleVector {
        LiouvilleVector(&self.0 * &v.0)
    }

    /// Row vector `⟨v|𝕃`, returned as a column of coefficients.
    pub fn apply_left(&self, bra: &LiouvilleVector) -> LiouvilleVector {
        LiouvilleVector(self.0.tr_mul(&bra.0))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Superoperator) -> Superoperator {
        Superoperator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Norm of the trace row `⟨1|𝕃`.
    pub fn trace_row_norm(&self, basis: &HermitianBasis) -> f64 {
        self.apply_left(&basis.identity()).norm()
    }

    /// Frobenius norm of `(𝕃 + 𝕃ᵀ)/2`; zero for Hamiltonian generators.
    pub fn symmetric_part_norm(&self) -> f64 {
        ((&self.0 + self.0.transpose()) * 0.5).norm()
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: Self) -> Superoperator {
        Superoperator(&self.0 + &rhs.0)
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: Self) -> Superoperator {
        Superoperator(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: f64) -> Superoperator {
        Superoperator(&self.0 * rhs)
    }
}

impl Neg for Superoperator {
    type Output = Superoperator;
    fn neg(self) -> Superoperator {
        Superoperator(-self.0)
    }
}
