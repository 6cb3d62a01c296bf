// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Three-level Λ system: ground doublet `|1⟩, |2⟩` coupled through the
//! excited level `|3⟩` in the rotating frame, with the excited-level
//! detuning as the control.
//!
//! Time is in μs. Table frequencies are in MHz and kHz, rates in ms⁻¹.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{c, ket_bra};
use crate::dynamics::ControlPolicy;
use crate::error::{Error, Result};
use crate::liouville::{
    hamiltonian_superop, lindblad_superop, Bounds, CMatrix, ChannelKind, ControlChannel,
    HermitianBasis, QuantumModel,
};

/// How table frequencies become angular rates in rad/μs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitConvention {
    /// Frequencies are ordinary (cycles per μs) and are multiplied by 2π.
    #[default]
    OrdinaryFrequency,
    /// Frequencies are already angular.
    Angular,
}

impl UnitConvention {
    pub fn factor(self) -> f64 {
        match self {
            UnitConvention::OrdinaryFrequency => 2.0 * PI,
            UnitConvention::Angular => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSystemParams {
    /// Ground-doublet splitting in MHz.
    pub delta: f64,
    /// Coupling `1↔3` in kHz.
    pub g1: f64,
    /// Coupling `2↔3` in kHz.
    pub g2: f64,
    /// Decay `3⇝1` in ms⁻¹.
    pub gamma1: f64,
    /// Decay `3⇝2` in ms⁻¹.
    pub gamma2: f64,
    /// Decay `2⇝1` in ms⁻¹.
    pub gamma3: f64,
    pub convention: UnitConvention,
    /// Relative sign of the `2↔3` coupling (±1).
    pub coupling_sign: f64,
    /// `+1` puts `|2⟩` at `−Δ`, `−1` at `+Δ`.
    pub detuning_sign: f64,
    /// Bound on the detuning control in rad/μs; `None` means 100× the drift spectral scale.
    pub control_limit: Option<f64>,
}

impl Default for LambdaSystemParams {
    fn default() -> Self {
        Self {
            delta: 1.59,
            g1: 159.0,
            g2: 127.0,
            gamma1: 554.0,
            gamma2: 554.0,
            gamma3: 236.0,
            convention: UnitConvention::default(),
            coupling_sign: -1.0,
            detuning_sign: 1.0,
            control_limit: None,
        }
    }
}

impl LambdaSystemParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!(
                    "{name} = {v} must be a finite non-negative rate"
                )));
            }
        }
        for (name, v) in [("delta", self.delta), ("g1", self.g1), ("g2", self.g2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!(
                    "{name} = {v} must be a finite non-negative magnitude"
                )));
            }
        }
        for (name, v) in [
            ("coupling_sign", self.coupling_sign),
            ("detuning_sign", self.detuning_sign),
        ] {
            if v != 1.0 && v != -1.0 {
                return Err(Error::Parameter(format!("{name} = {v} must be +1 or -1")));
            }
        }
        if let Some(l) = self.control_limit {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Parameter(format!(
                    "control limit {l} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Builds the Λ model; the objective is the ground coherence `|1⟩⟨2| + |2⟩⟨1|`
/// and the single control `u` (rad/μs) multiplies `−i[|3⟩⟨3|, ·]`.
pub fn build_lambda_system(params: &LambdaSystemParams) -> Result<QuantumModel> {
    params.validate()?;
    let f = params.convention.factor();
    let delta = f * params.delta;
    let g1 = f * params.g1 * 1e-3;
    let g2 = params.coupling_sign * f * params.g2 * 1e-3;
    let basis = Arc::new(HermitianBasis::new(3)?);
    let sym = |i, j| ket_bra(3, i, j) + ket_bra(3, j, i);
    let h: CMatrix = ket_bra(3, 1, 1) * c(-params.detuning_sign * delta, 0.0)
        + sym(0, 2) * c(g1, 0.0)
        + sym(1, 2) * c(g2, 0.0);
    let mut drift = hamiltonian_superop(&h, &basis)?;
    for (jump, rate) in [
        (ket_bra(3, 0, 2), params.gamma1),
        (ket_bra(3, 1, 2), params.gamma2),
        (ket_bra(3, 0, 1), params.gamma3),
    ] {
        drift = &drift + &lindblad_superop(&jump, rate * 1e-3, &basis)?;
    }
    let control = hamiltonian_superop(&ket_bra(3, 2, 2), &basis)?;
    let o = basis.vectorize(&sym(0, 1))?;
    let redundancy = control.apply_left(&o).norm();
    if redundancy >= 1e-12 {
        return Err(Error::Precondition(format!(
            "expected <O|L1> = 0, found norm {redundancy:e}"
        )));
    }
    let placeholder = Bounds::symmetric(1.0);
    let model = QuantumModel::new(
        basis,
        drift,
        vec![ControlChannel::new(
            "detuning",
            control,
            placeholder,
            ChannelKind::Coherent,
        )],
        o,
    )?;
    let limit = params
        .control_limit
        .unwrap_or_else(|| 100.0 * model.drift_spectral_scale());
    model.with_bounds(0, Bounds::symmetric(limit))
}

/// `u(t) = f·(−1.58 + 1.61 cos(2πt / 0.626))` sampled at interval midpoints
/// over `[0, period]`, with `f` the convention factor.
pub fn lambda_harmonic_reference(
    params: &LambdaSystemParams,
    model: &QuantumModel,
    period: f64,
    intervals: usize,
) -> Result<ControlPolicy> {
    let f = params.convention.factor();
    ControlPolicy::uniform(0.0, period, intervals, model.bounds(), |_, t| {
        f * (-1.58 + 1.61 * (2.0 * PI * t / 0.626).cos())
    })
}
