// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::{c, ket_bra, sigma_x, sigma_z};
use crate::error::{Error, Result};
use crate::liouville::{
    collision_superop, hamiltonian_superop, lindblad_superop, validate_density, Bounds, CMatrix,
    ChannelKind, ControlChannel, HermitianBasis, QuantumModel,
};

/// Detailed-balance relaxation toward `ρ_td = p|0⟩⟨0| + (1−p)|1⟩⟨1|`.
///
/// With `Δ > 0`, `|1⟩` is the ground state of `(Δ/2)σz` and `p` is the
/// excited-state population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermalization {
    /// Total relaxation rate `γ↓ + γ↑`.
    pub rate: f64,
    pub excited_population: f64,
}

impl Thermalization {
    pub fn state(&self) -> CMatrix {
        let p = self.excited_population;
        ket_bra(2, 0, 0) * c(p, 0.0) + ket_bra(2, 1, 1) * c(1.0 - p, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionChannelSpec {
    pub name: String,
    pub target: CMatrix,
    pub bounds: Bounds,
}

/// `H₀ = (Δ/2)σz`, an optional coherent `σx` channel, optional thermal
/// relaxation and any number of collision channels.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelSpec {
    pub delta: f64,
    pub coherent: Option<Bounds>,
    pub thermal: Option<Thermalization>,
    pub collisions: Vec<CollisionChannelSpec>,
    pub observable: CMatrix,
}

pub fn build_two_level(spec: &TwoLevelSpec) -> Result<QuantumModel> {
    if !spec.delta.is_finite() {
        return Err(Error::Parameter(format!(
            "splitting {} must be finite",
            spec.delta
        )));
    }
    let basis = Arc::new(HermitianBasis::new(2)?);
    let mut drift = hamiltonian_superop(&(sigma_z() * c(spec.delta / 2.0, 0.0)), &basis)?;
    if let Some(th) = spec.thermal {
        let p = th.excited_population;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!(
                "excited population {p} outside [0, 1]"
            )));
        }
        if th.rate < 0.0 {
            return Err(Error::NegativeRate(th.rate));
        }
        let down = lindblad_superop(&ket_bra(2, 1, 0), th.rate * (1.0 - p), &basis)?;
        let up = lindblad_superop(&ket_bra(2, 0, 1), th.rate * p, &basis)?;
        drift = &(&drift + &down) + &up;
    }
    let mut channels = Vec::new();
    if let Some(b) = spec.coherent {
        let g = hamiltonian_superop(&sigma_x(), &basis)?;
        channels.push(ControlChannel::new("x", g, b, ChannelKind::Coherent));
    }
    for col in &spec.collisions {
        validate_density(&col.target)?;
        let g = collision_superop(&col.target, &basis)?;
        let target = basis.density(&col.target)?;
        channels.push(ControlChannel::new(
            col.name.clone(),
            g,
            col.bounds,
            ChannelKind::Collision { target },
        ));
    }
    if channels.is_empty() {
        return Err(Error::Parameter(
            "two-level model needs at least one control channel".into(),
        ));
    }
    let o = basis.vectorize(&spec.observable)?;
    QuantumModel::new(basis, drift, channels, o)
}

/// Closed qubit with a `σx` control bounded by `±limit`.
pub fn two_level_closed(delta: f64, limit: f64, observable: &CMatrix) -> Result<QuantumModel> {
    build_two_level(&TwoLevelSpec {
        delta,
        coherent: Some(Bounds::symmetric(limit)),
        thermal: None,
        collisions: Vec::new(),
        observable: observable.clone(),
    })
}

/// Dissipative qubit relaxing toward `ρ_td`; returns the model and `ρ_td`.
pub fn two_level_thermal(
    delta: f64,
    thermal: Thermalization,
    limit: f64,
    observable: &CMatrix,
) -> Result<(QuantumModel, CMatrix)> {
    let model = build_two_level(&TwoLevelSpec {
        delta,
        coherent: Some(Bounds::symmetric(limit)),
        thermal: Some(thermal),
        collisions: Vec::new(),
        observable: observable.clone(),
    })?;
    Ok((model, thermal.state()))
}

/// Collision-only qubit: channel `k` pumps toward `targets[k]` with rate in `bounds[k]`.
pub fn two_level_collision(
    delta: f64,
    targets: &[CMatrix],
    bounds: &[Bounds],
    observable: &CMatrix,
) -> Result<QuantumModel> {
    if targets.len() != bounds.len() {
        return Err(Error::Shape {
            expected: targets.len(),
            found: bounds.len(),
        });
    }
    for (k, b) in bounds.iter().enumerate() {
        if b.lower < 0.0 {
            return Err(Error::Parameter(format!(
                "collision channel {k} has negative lower rate {}",
                b.lower
            )));
        }
    }
    build_two_level(&TwoLevelSpec {
        delta,
        coherent: None,
        thermal: None,
        collisions: targets
            .iter()
            .zip(bounds)
            .enumerate()
            .map(|(k, (t, b))| CollisionChannelSpec {
                name: format!("collision{}", k + 1),
                target: t.clone(),
                bounds: *b,
            })
            .collect(),
        observable: observable.clone(),
    })
}
