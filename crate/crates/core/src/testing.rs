// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the unit tests.

use std::sync::Arc;

use nalgebra::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::liouville::{
    hamiltonian_superop, lindblad_superop, Bounds, CMatrix, ChannelKind, ControlChannel,
    HermitianBasis, LiouvilleVector, QuantumModel, Superoperator,
};

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

pub fn ket_bra(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
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

pub fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = random_matrix(n, rng);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = random_matrix(n, rng);
    let p = &a * a.adjoint();
    let tr = p.trace();
    p / tr
}

/// Closed qubit: `H₀ = (Δ/2)σz`, one coherent control `σx`.
pub fn closed_qubit(delta: f64, limit: f64, observable: &CMatrix) -> QuantumModel {
    let b = Arc::new(HermitianBasis::new(2).unwrap());
    let drift = hamiltonian_superop(&(sigma_z() * c(delta / 2.0, 0.0)), &b).unwrap();
    let ctrl = hamiltonian_superop(&sigma_x(), &b).unwrap();
    let o = b.vectorize(observable).unwrap();
    QuantumModel::new(
        b,
        drift,
        vec![ControlChannel::new(
            "x",
            ctrl,
            Bounds::symmetric(limit),
            ChannelKind::Coherent,
        )],
        o,
    )
    .unwrap()
}

/// Random Lindblad model with `controls` coherent channels bounded by ±1.
pub fn random_model(n: usize, controls: usize, rng: &mut ChaCha8Rng) -> QuantumModel {
    let b = Arc::new(HermitianBasis::new(n).unwrap());
    let h = hamiltonian_superop(&random_hermitian(n, rng), &b).unwrap();
    let mut drift = h;
    for _ in 0..2 {
        let rate = rng.random_range(0.1..0.6);
        drift = &drift + &lindblad_superop(&random_matrix(n, rng), rate, &b).unwrap();
    }
    let channels = (0..controls)
        .map(|k| {
            let g = hamiltonian_superop(&random_hermitian(n, rng), &b).unwrap();
            ControlChannel::new(
                format!("c{k}"),
                g,
                Bounds::symmetric(1.0),
                ChannelKind::Coherent,
            )
        })
        .collect();
    let o = b.vectorize(&random_hermitian(n, rng)).unwrap();
    QuantumModel::new(b, drift, channels, o).unwrap()
}

pub fn zero_model(n: usize) -> QuantumModel {
    let b = Arc::new(HermitianBasis::new(n).unwrap());
    let d = b.size();
    let ch = ControlChannel::new(
        "none",
        Superoperator::zeros(d),
        Bounds::symmetric(1.0),
        ChannelKind::Coherent,
    );
    QuantumModel::new(
        b,
        Superoperator::zeros(d),
        vec![ch],
        LiouvilleVector::zeros(d),
    )
    .unwrap()
}
