// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{HermitianBasis, LiouvilleVector, Superoperator};
use crate::error::{Error, Result};

/// Admissible range `[lower, upper]` of one control channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn symmetric(limit: f64) -> Self {
        Self::new(-limit, limit)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, u: f64, slack: f64) -> bool {
        u >= self.lower - slack && u <= self.upper + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    /// Hamiltonian coupling, `−i[μ, ·]` up to sign.
    Coherent,
    /// Any other dissipative coupling.
    Dissipative,
    /// `ρ ↦ ρₖ − ρ`; the target coefficients are kept for the QRE checks.
    Collision { target: LiouvilleVector },
}

#[derive(Debug, Clone)]
pub struct ControlChannel {
    pub name: String,
    pub generator: Superoperator,
    pub bounds: Bounds,
    pub kind: ChannelKind,
}

impl ControlChannel {
    pub fn new(
        name: impl Into<String>,
        generator: Superoperator,
        bounds: Bounds,
        kind: ChannelKind,
    ) -> Self {
        Self {
            name: name.into(),
            generator,
            bounds,
            kind,
        }
    }

    pub fn is_collision(&self) -> bool {
        matches!(self.kind, ChannelKind::Collision { .. })
    }
}

/// Drift `𝕃₀`, bounded controls `𝕃ₖ` and the objective observable `|O⟩`,
/// all in one shared basis.
#[derive(Debug, Clone)]
pub struct QuantumModel {
    basis: Arc<HermitianBasis>,
    drift: Superoperator,
    channels: Vec<ControlChannel>,
    observable: LiouvilleVector,
}

impl QuantumModel {
    pub fn new(
        basis: Arc<HermitianBasis>,
        drift: Superoperator,
        channels: Vec<ControlChannel>,
        observable: LiouvilleVector,
    ) -> Result<Self> {
        let d = basis.size();
        let check = |found: usize| {
            if found != d {
                Err(Error::Shape { expected: d, found })
            } else {
                Ok(())
            }
        };
        check(drift.size())?;
        check(observable.len())?;
        for (k, ch) in channels.iter().enumerate() {
            check(ch.generator.size())?;
            if ch.bounds.lower > ch.bounds.upper
                || !ch.bounds.lower.is_finite()
                || !ch.bounds.upper.is_finite()
            {
                return Err(Error::InvalidBounds {
                    channel: k,
                    lower: ch.bounds.lower,
                    upper: ch.bounds.upper,
                });
            }
        }
        Ok(Self {
            basis,
            drift,
            channels,
            observable,
        })
    }

    pub fn basis(&self) -> &Arc<HermitianBasis> {
        &self.basis
    }

    pub fn size(&self) -> usize {
        self.basis.size()
    }

    pub fn drift(&self) -> &Superoperator {
        &self.drift
    }

    pub fn channels(&self) -> &[ControlChannel] {
        &self.channels
    }

    pub fn channel(&self, k: usize) -> &ControlChannel {
        &self.channels[k]
    }

    pub fn num_controls(&self) -> usize {
        self.channels.len()
    }

    pub fn observable(&self) -> &LiouvilleVector {
        &self.observable
    }

    pub fn bounds(&self) -> Vec<Bounds> {
        self.channels.iter().map(|c| c.bounds).collect()
    }

    pub fn with_observable(mut self, observable: LiouvilleVector) -> Result<Self> {
        if observable.len() != self.size() {
            return Err(Error::Shape {
                expected: self.size(),
                found: observable.len(),
            });
        }
        self.observable = observable;
        Ok(self)
    }

    pub fn with_bounds(mut self, channel: usize, bounds: Bounds) -> Result<Self> {
        if channel >= self.channels.len() {
            return Err(Error::Parameter(format!("no control channel {channel}")));
        }
        if bounds.lower > bounds.upper {
            return Err(Error::InvalidBounds {
                channel,
                lower: bounds.lower,
                upper: bounds.upper,
            });
        }
        self.channels[channel].bounds = bounds;
        Ok(self)
    }

    /// `𝕃₀ + Σₖ uₖ𝕃ₖ` as a dense matrix.
    pub fn generator(&self, u: &[f64]) -> DMatrix<f64> {
        let mut g = self.drift.matrix().clone();
        for (ch, &uk) in self.channels.iter().zip(u) {
            if uk != 0.0 {
                g.zip_apply(ch.generator.matrix(), |a, b| *a += uk * b);
            }
        }
        g
    }

    /// Generator with channel `k` removed and the others frozen at `u`.
    pub fn frozen_remainder(&self, u: &[f64], k: usize) -> DMatrix<f64> {
        let mut g = self.drift.matrix().clone();
        for (l, (ch, &ul)) in self.channels.iter().zip(u).enumerate() {
            if l != k && ul != 0.0 {
                g.zip_apply(ch.generator.matrix(), |a, b| *a += ul * b);
            }
        }
        g
    }

    /// True when drift and every control generate orthogonal (unitary) flows.
    pub fn is_closed(&self) -> bool {
        let tol = 1e-12;
        let scale = |s: &Superoperator| tol * s.matrix().norm().max(1.0);
        self.drift.symmetric_part_norm() <= scale(&self.drift)
            && self
                .channels
                .iter()
                .all(|c| c.generator.symmetric_part_norm() <= scale(&c.generator))
    }

    /// Largest eigenvalue modulus of the drift; the frequency scale of the model.
    pub fn drift_spectral_scale(&self) -> f64 {
        self.drift
            .matrix()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}
