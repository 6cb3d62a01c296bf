// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::liouville::{ChannelKind, LiouvilleVector, QuantumModel};

/// Relative singular-value threshold for the numerical rank.
pub const SCREEN_RANK_TOL: f64 = 1e-10;

/// Smallest subspace containing every collision target and invariant under
/// the drift and every channel generator.
#[derive(Debug, Clone)]
pub struct ControllabilityScreen {
    pub rank: usize,
    pub dimension: usize,
    /// Orthonormal basis of the orthogonal complement; a costate in this
    /// subspace keeps every collision switching function at zero.
    pub complement: Vec<LiouvilleVector>,
}

impl ControllabilityScreen {
    pub fn is_full(&self) -> bool {
        self.rank == self.dimension
    }
}

fn orthonormal_range(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.max();
    let u = svd.u.unwrap();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > SCREEN_RANK_TOL * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

/// Krylov closure of the collision targets under `{𝕃₀, 𝕃₁, …}`.
pub fn controllability_screen(model: &QuantumModel) -> Result<ControllabilityScreen> {
    let targets: Vec<DVector<f64>> = model
        .channels()
        .iter()
        .filter_map(|c| match &c.kind {
            ChannelKind::Collision { target } => Some(target.coeffs().clone()),
            _ => None,
        })
        .collect();
    if targets.is_empty() {
        return Err(Error::Precondition("model has no collision channel".into()));
    }
    let d = model.size();
    let generators: Vec<&DMatrix<f64>> = std::iter::once(model.drift().matrix())
        .chain(model.channels().iter().map(|c| c.generator.matrix()))
        .collect();
    let mut q = orthonormal_range(&DMatrix::from_columns(&targets));
    loop {
        let mut cols: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
        for g in &generators {
            cols.extend(q.column_iter().map(|c| *g * c));
        }
        let next = orthonormal_range(&DMatrix::from_columns(&cols));
        let grown = next.ncols() > q.ncols();
        q = next;
        if !grown || q.ncols() == d {
            break;
        }
    }
    let rank = q.ncols();
    let projector = DMatrix::identity(d, d) - &q * q.transpose();
    let complement = orthonormal_range(&projector)
        .column_iter()
        .map(|c| LiouvilleVector::from(c.into_owned()))
        .collect();
    Ok(ControllabilityScreen {
        rank,
        dimension: d,
        complement,
    })
}

/// One term `⟨ψ|𝕃_cⁿ|ρₖ⟩` of the collision derivative chain with its scale
/// `‖ψ‖·‖𝕃_c‖ⁿ·‖ρₖ‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainTerm {
    pub order: usize,
    pub value: f64,
    pub scale: f64,
}

/// `⟨ψ|𝕃_cⁿ|ρₖ⟩` for `n = 0..=depth` with `𝕃_c` the generator without channel `k`.
pub fn collision_chain(
    model: &QuantumModel,
    psi: &LiouvilleVector,
    u: &[f64],
    k: usize,
    depth: usize,
) -> Result<Vec<ChainTerm>> {
    let ChannelKind::Collision { target } = &model.channel(k).kind else {
        return Err(Error::Precondition(format!(
            "channel {k} is not a collision channel"
        )));
    };
    let lc = model.frozen_remainder(u, k);
    let norm = lc.norm();
    let mut v = target.coeffs().clone();
    let base = psi.coeffs().norm() * v.norm();
    let mut out = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        out.push(ChainTerm {
            order: n,
            value: psi.coeffs().dot(&v),
            scale: base * norm.powi(n as i32),
        });
        v = &lc * v;
    }
    Ok(out)
}
