// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Terminal and periodic Mayer problems: adjoint gradients, projected ascent,
//! periodic fixed points, free horizons and the period-doubling check.

mod ascent;
mod evaluate;
mod horizon;
mod polish;
mod solve;
mod spikes;
mod theorem2;

pub use ascent::AscentMethod;
pub use evaluate::{
    adjoint_gradient, objective, periodic_costate_fixed_point, periodic_state_fixed_point,
    ABNORMAL_TOL, DEGENERACY_TOL,
};
pub use horizon::{optimize_free_horizon, HorizonScan};
pub use solve::{
    analyze_policy, multistart, random_policy, solve, solve_periodic, solve_terminal, StartOutcome,
};
pub use spikes::{detect_spikes, refine_around_spikes, Spike, SPIKE_THRESHOLD};
pub use theorem2::{theorem2_consistency_check, Theorem2Report};

pub(crate) use evaluate::{evaluate, fixed_point_of, node_gradient};

use crate::dynamics::{check_trace_one, ControlPolicy, DiagnosticsTrace, Trajectory};
use crate::error::{Error, Result};
use crate::liouville::{LiouvilleVector, QuantumModel};

#[derive(Debug, Clone)]
pub enum BoundaryMode {
    /// Fixed initial state, objective read at the final time.
    Terminal {
        initial: LiouvilleVector,
        horizon: f64,
        free_time: bool,
    },
    /// Objective read on the quasistationary orbit of period `period`.
    Periodic { period: f64, free_period: bool },
}

/// Model, objective `|O⟩` (the model's observable) and boundary conditions.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub model: QuantumModel,
    pub mode: BoundaryMode,
}

impl ProblemSpec {
    pub fn new(model: QuantumModel, mode: BoundaryMode) -> Result<Self> {
        let horizon = match &mode {
            BoundaryMode::Terminal {
                initial, horizon, ..
            } => {
                check_trace_one(&model, initial)?;
                *horizon
            }
            BoundaryMode::Periodic { period, .. } => *period,
        };
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Parameter(format!(
                "horizon {horizon} must be positive"
            )));
        }
        Ok(Self { model, mode })
    }

    pub fn terminal(model: QuantumModel, initial: LiouvilleVector, horizon: f64) -> Result<Self> {
        Self::new(
            model,
            BoundaryMode::Terminal {
                initial,
                horizon,
                free_time: false,
            },
        )
    }

    pub fn periodic(model: QuantumModel, period: f64) -> Result<Self> {
        Self::new(
            model,
            BoundaryMode::Periodic {
                period,
                free_period: false,
            },
        )
    }

    pub fn horizon(&self) -> f64 {
        match &self.mode {
            BoundaryMode::Terminal { horizon, .. } => *horizon,
            BoundaryMode::Periodic { period, .. } => *period,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.mode, BoundaryMode::Periodic { .. })
    }

    pub fn free_horizon(&self) -> bool {
        match &self.mode {
            BoundaryMode::Terminal { free_time, .. } => *free_time,
            BoundaryMode::Periodic { free_period, .. } => *free_period,
        }
    }

    /// Same problem with a different horizon.
    pub fn with_horizon(&self, t: f64) -> Result<Self> {
        let mode = match &self.mode {
            BoundaryMode::Terminal {
                initial, free_time, ..
            } => BoundaryMode::Terminal {
                initial: initial.clone(),
                horizon: t,
                free_time: *free_time,
            },
            BoundaryMode::Periodic { free_period, .. } => BoundaryMode::Periodic {
                period: t,
                free_period: *free_period,
            },
        };
        Self::new(self.model.clone(), mode)
    }

    pub fn initial_state(&self) -> Option<&LiouvilleVector> {
        match &self.mode {
            BoundaryMode::Terminal { initial, .. } => Some(initial),
            BoundaryMode::Periodic { .. } => None,
        }
    }

    pub(crate) fn check_policy(&self, policy: &ControlPolicy) -> Result<()> {
        crate::dynamics::check_policy(&self.model, policy)?;
        for (k, ch) in self.model.channels().iter().enumerate() {
            let b = ch.bounds;
            if let Some(u) = policy
                .values(k)
                .iter()
                .find(|u| !b.contains(**u, crate::dynamics::BOUND_SLACK))
            {
                return Err(Error::InvalidPolicy(format!(
                    "channel {k} value {u} outside model bounds [{}, {}]",
                    b.lower, b.upper
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Grid intervals per horizon for generated initial policies.
    pub intervals: usize,
    pub method: AscentMethod,
    pub max_iterations: usize,
    /// Stop when every feasible-ascent interval mean of `K_uₖ` is below this.
    pub gradient_tol: f64,
    /// `ε_u` as a fraction of the bound width.
    pub bound_tol: f64,
    /// First projected-gradient step as a fraction of the widest bound range.
    pub initial_step: f64,
    /// Move bang-bang switch times onto the zeros of the switching function.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            intervals: 512,
            method: AscentMethod::default(),
            max_iterations: 3000,
            gradient_tol: 1e-6,
            bound_tol: 1e-6,
            initial_step: 0.05,
            polish: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub iterations: usize,
    pub evaluations: usize,
    /// Largest feasible-ascent interval mean of `K_uₖ` on the ascent grid.
    pub stationarity: f64,
    pub converged: bool,
    /// Whether the bang-bang switch polish was applied.
    pub polished: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// `‖ψ(t_f) − O_n‖` (terminal) or `‖ψ(0) − ψ(T) + O_n‖` (periodic).
    pub transversality: f64,
    /// `‖Prop·ρ̃ − ρ̃‖` (periodic only).
    pub periodicity: Option<f64>,
    /// `max |⟨ψ(tₘ)|ρ(tₘ)⟩|`.
    pub normalization: f64,
    /// `max |⟨1|ρ(tₘ)⟩ − 1|`.
    pub trace: f64,
    /// `max K − min K` over the intervals.
    pub pf_spread: f64,
    /// `K` on the first interval.
    pub pf_initial: f64,
    /// `K` on the last interval; `∂J/∂T` when the grid stretches with the horizon.
    pub pf_final: f64,
    /// `max |⟨ψ|𝕃₀|ρ⟩|` over the nodes, the scale for transversality tests.
    pub pf_scale: f64,
    /// Largest `|K(τ−) − K(τ+)|` over interior nodes.
    pub max_pf_jump: f64,
}

impl Residuals {
    /// `(max K − min K) / max(1, |K(0)|)`.
    pub fn relative_pf_spread(&self) -> f64 {
        self.pf_spread / self.pf_initial.abs().max(1.0)
    }
}

/// A converged (or best-effort) extremal with its PMP diagnostics.
#[derive(Debug, Clone)]
pub struct ExtremalSolution {
    pub periodic: bool,
    pub policy: ControlPolicy,
    /// State and costate at every node.
    pub trajectory: Trajectory,
    pub diagnostics: DiagnosticsTrace,
    pub objective: f64,
    pub convergence: Convergence,
    pub residuals: Residuals,
    /// `∂J/∂u[k][m]` on the final policy.
    pub gradient: Vec<Vec<f64>>,
    /// `⟨O_n|`.
    pub normalized_observable: LiouvilleVector,
}

impl ExtremalSolution {
    pub fn horizon(&self) -> f64 {
        self.policy.duration()
    }

    pub fn states(&self) -> &[LiouvilleVector] {
        self.trajectory.states()
    }

    pub fn costates(&self) -> &[LiouvilleVector] {
        self.trajectory
            .costates()
            .expect("extremal solutions carry a costate")
    }
}
