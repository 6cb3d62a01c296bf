// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::c;
use crate::error::{Error, Result};
use crate::liouville::{
    hamiltonian_superop, lindblad_superop, Bounds, CMatrix, ChannelKind, ControlChannel,
    HermitianBasis, QuantumModel,
};

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = random_matrix(n, rng);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Full-rank random density matrix `AA†/Tr(AA†)`.
pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = random_matrix(n, rng);
    let p = &a * a.adjoint();
    let tr = p.trace();
    p / tr
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomLindbladParams {
    pub dim: usize,
    pub controls: usize,
    pub jumps: usize,
    /// Jump rates are drawn uniformly from this range.
    pub rate_range: (f64, f64),
    /// Symmetric bound on every coherent control.
    pub control_limit: f64,
    pub seed: u64,
}

impl Default for RandomLindbladParams {
    fn default() -> Self {
        Self {
            dim: 3,
            controls: 1,
            jumps: 2,
            rate_range: (0.1, 0.6),
            control_limit: 1.0,
            seed: 0,
        }
    }
}

/// Random Hamiltonian drift, random jump operators and coherent controls,
/// with a random Hermitian observable and a random full-rank initial state.
pub fn random_lindblad(params: &RandomLindbladParams) -> Result<(QuantumModel, CMatrix)> {
    let (lo, hi) = params.rate_range;
    if !(lo >= 0.0 && hi >= lo) {
        return Err(Error::Parameter(format!("invalid rate range [{lo}, {hi}]")));
    }
    if params.controls == 0 {
        return Err(Error::Parameter(
            "random model needs at least one control".into(),
        ));
    }
    let n = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let basis = Arc::new(HermitianBasis::new(n)?);
    let mut drift = hamiltonian_superop(&random_hermitian(n, &mut rng), &basis)?;
    for _ in 0..params.jumps {
        let rate = if hi > lo {
            rng.random_range(lo..hi)
        } else {
            lo
        };
        drift = &drift + &lindblad_superop(&random_matrix(n, &mut rng), rate, &basis)?;
    }
    let channels = (0..params.controls)
        .map(|k| {
            let g = hamiltonian_superop(&random_hermitian(n, &mut rng), &basis)?;
            Ok(ControlChannel::new(
                format!("c{}", k + 1),
                g,
                Bounds::symmetric(params.control_limit),
                ChannelKind::Coherent,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let o = basis.vectorize(&random_hermitian(n, &mut rng))?;
    let rho0 = random_density(n, &mut rng);
    Ok((QuantumModel::new(basis, drift, channels, o)?, rho0))
}
