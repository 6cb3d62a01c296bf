// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::ControlPolicy;
use crate::error::{Error, Result};
use crate::liouville::{LiouvilleVector, QuantumModel};

/// Tolerance on `⟨1|ρ⟩ = 1` for initial states.
pub const TRACE_TOL: f64 = 1e-9;

/// One-interval propagators `Pₘ = exp(hₘ𝕃ₘ)` and, optionally, their
/// derivatives with respect to each control value.
#[derive(Debug, Clone)]
pub struct Propagators {
    steps: Vec<DMatrix<f64>>,
    /// `derivatives[m][k] = ∂Pₘ/∂u[k][m]`.
    derivatives: Option<Vec<Vec<DMatrix<f64>>>>,
}

impl Propagators {
    pub fn new(
        model: &QuantumModel,
        policy: &ControlPolicy,
        with_derivatives: bool,
    ) -> Result<Self> {
        check_policy(model, policy)?;
        let d = model.size();
        let nc = model.num_controls();
        let results: Vec<Result<(DMatrix<f64>, Vec<DMatrix<f64>>)>> = (0..policy.intervals())
            .into_par_iter()
            .map(|m| {
                let h = policy.step(m);
                let g = model.generator(&policy.at(m));
                let out = if with_derivatives && nc > 0 {
                    interval_with_derivatives(model, &g, h, d)
                } else {
                    ((g * h).exp(), Vec::new())
                };
                if out.0.iter().all(|x| x.is_finite())
                    && out.1.iter().all(|f| f.iter().all(|x| x.is_finite()))
                {
                    Ok(out)
                } else {
                    Err(Error::Propagation {
                        interval: m,
                        reason: "non-finite matrix exponential".into(),
                    })
                }
            })
            .collect();
        let mut steps = Vec::with_capacity(results.len());
        let mut derivs = Vec::with_capacity(results.len());
        for r in results {
            let (p, f) = r?;
            steps.push(p);
            derivs.push(f);
        }
        Ok(Self {
            steps,
            derivatives: (with_derivatives && nc > 0).then_some(derivs),
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step(&self, m: usize) -> &DMatrix<f64> {
        &self.steps[m]
    }

    pub fn derivative(&self, m: usize, k: usize) -> Option<&DMatrix<f64>> {
        self.derivatives.as_ref().map(|d| &d[m][k])
    }

    /// Ordered product `P_{b−1}⋯P_a`.
    pub fn product(&self, range: std::ops::Range<usize>) -> DMatrix<f64> {
        let d = self.steps[0].nrows();
        range.fold(DMatrix::identity(d, d), |acc, m| &self.steps[m] * acc)
    }

    /// Forward sweep from `ρ₀`; returns all `M+1` nodes.
    pub fn forward(&self, rho0: &DVector<f64>) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(rho0.clone());
        for p in &self.steps {
            let next = p * out.last().unwrap();
            out.push(next);
        }
        out
    }

    /// Backward sweep of a row vector from the final node; returns all `M+1` nodes.
    pub fn backward(&self, psi_end: &DVector<f64>) -> Vec<DVector<f64>> {
        let mut out = vec![psi_end.clone()];
        for p in self.steps.iter().rev() {
            let prev = p.tr_mul(out.last().unwrap());
            out.push(prev);
        }
        out.reverse();
        out
    }

    /// `∂J/∂u[k][m] = ⟨ψ_{m+1}|∂Pₘ/∂u[k][m]|ρₘ⟩`, channel-major.
    pub fn gradient(
        &self,
        states: &[DVector<f64>],
        costates: &[DVector<f64>],
    ) -> Option<Vec<Vec<f64>>> {
        let derivs = self.derivatives.as_ref()?;
        let nc = derivs.first().map_or(0, Vec::len);
        let mut g = vec![vec![0.0; self.len()]; nc];
        for (m, dm) in derivs.iter().enumerate() {
            for (k, f) in dm.iter().enumerate() {
                g[k][m] = costates[m + 1].dot(&(f * &states[m]));
            }
        }
        Some(g)
    }
}

/// `exp(h𝕃)` together with the Fréchet derivatives in the direction of every
/// control generator, read off one block-triangular exponential.
fn interval_with_derivatives(
    model: &QuantumModel,
    g: &DMatrix<f64>,
    h: f64,
    d: usize,
) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
    let nc = model.num_controls();
    let n = d * (nc + 1);
    let mut big = DMatrix::<f64>::zeros(n, n);
    big.view_mut((0, 0), (d, d)).copy_from(&(g * h));
    for (k, ch) in model.channels().iter().enumerate() {
        let off = d * (k + 1);
        big.view_mut((0, off), (d, d))
            .copy_from(&(ch.generator.matrix() * h));
        big.view_mut((off, off), (d, d)).copy_from(&(g * h));
    }
    let e = big.exp();
    let p = e.view((0, 0), (d, d)).into_owned();
    // Top-right block k is ∫₀ʰ e^{(h−s)𝕃} 𝕃ₖ e^{s𝕃} ds = ∂exp(h𝕃)/∂uₖ.
    let f = (0..nc)
        .map(|k| e.view((0, d * (k + 1)), (d, d)).into_owned())
        .collect();
    (p, f)
}

pub(crate) fn check_policy(model: &QuantumModel, policy: &ControlPolicy) -> Result<()> {
    if policy.channels() != model.num_controls() {
        return Err(Error::InvalidPolicy(format!(
            "policy has {} channels, model has {}",
            policy.channels(),
            model.num_controls()
        )));
    }
    Ok(())
}

pub(crate) fn check_trace_one(model: &QuantumModel, rho: &LiouvilleVector) -> Result<()> {
    if rho.len() != model.size() {
        return Err(Error::Shape {
            expected: model.size(),
            found: rho.len(),
        });
    }
    let tr = model.basis().identity().dot(rho);
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    Ok(())
}

/// State (and optionally costate) at every grid node.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<LiouvilleVector>,
    costates: Option<Vec<LiouvilleVector>>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<LiouvilleVector>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Shape {
                expected: times.len(),
                found: states.len(),
            });
        }
        Ok(Self {
            times,
            states,
            costates: None,
        })
    }

    pub fn with_costates(mut self, costates: Vec<LiouvilleVector>) -> Result<Self> {
        if costates.len() != self.times.len() {
            return Err(Error::Shape {
                expected: self.times.len(),
                found: costates.len(),
            });
        }
        self.costates = Some(costates);
        Ok(self)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[LiouvilleVector] {
        &self.states
    }

    pub fn costates(&self) -> Option<&[LiouvilleVector]> {
        self.costates.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &LiouvilleVector {
        &self.states[0]
    }

    pub fn last(&self) -> &LiouvilleVector {
        &self.states[self.states.len() - 1]
    }

    /// Largest `|⟨1|ρ(tₘ)⟩ − 1|` over the nodes.
    pub fn trace_error(&self, one: &LiouvilleVector) -> f64 {
        self.states
            .iter()
            .map(|r| (one.dot(r) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|⟨ψ(tₘ)|ρ(tₘ)⟩|`, if a costate is attached.
    pub fn normalization_error(&self) -> Option<f64> {
        let c = self.costates.as_ref()?;
        Some(
            c.iter()
                .zip(&self.states)
                .map(|(p, r)| p.dot(r).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Forward propagation with one exact matrix exponential per interval.
pub fn propagate_state(
    model: &QuantumModel,
    policy: &ControlPolicy,
    rho0: &LiouvilleVector,
) -> Result<Trajectory> {
    check_trace_one(model, rho0)?;
    let props = Propagators::new(model, policy, false)?;
    let states = props
        .forward(rho0.coeffs())
        .into_iter()
        .map(LiouvilleVector::from)
        .collect();
    Trajectory::new(policy.nodes().to_vec(), states)
}

/// Backward propagation of `⟨ψ|` under `∂⟨ψ|/∂t = −⟨ψ|𝕃`, from `ψ(t_M) = psi_end`.
pub fn propagate_costate_backward(
    model: &QuantumModel,
    policy: &ControlPolicy,
    psi_end: &LiouvilleVector,
) -> Result<Vec<LiouvilleVector>> {
    if psi_end.len() != model.size() {
        return Err(Error::Shape {
            expected: model.size(),
            found: psi_end.len(),
        });
    }
    let props = Propagators::new(model, policy, false)?;
    Ok(props
        .backward(psi_end.coeffs())
        .into_iter()
        .map(LiouvilleVector::from)
        .collect())
}
