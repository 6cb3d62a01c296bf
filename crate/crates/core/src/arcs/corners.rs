// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use super::classify::{ArcSegmentation, JunctionKind};
use crate::liouville::QuantumModel;
use crate::solver::ExtremalSolution;

#[derive(Debug, Clone, PartialEq)]
pub struct CornerResidual {
    pub channel: usize,
    pub time: f64,
    pub kind: JunctionKind,
    /// `|K(τ−) − K(τ+)|`.
    pub pf_jump: f64,
    /// `‖ψ(τ−) − ψ(τ+)‖` with `ψ(τ−)` carried across the preceding interval.
    pub costate_jump: f64,
    /// `|K_u(τ)|`.
    pub switching: f64,
    /// `|dK_u/dt|` on the singular side; junctions into or out of singular arcs only.
    pub switching_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerReport {
    pub junctions: Vec<CornerResidual>,
    /// Largest `|K_u|` over singular intervals, per channel-interval mean.
    pub singular_switching: f64,
}

impl CornerReport {
    pub fn max_pf_jump(&self) -> f64 {
        self.junctions.iter().fold(0.0, |a, j| a.max(j.pf_jump))
    }

    pub fn max_costate_jump(&self) -> f64 {
        self.junctions
            .iter()
            .fold(0.0, |a, j| a.max(j.costate_jump))
    }

    pub fn max_switching(&self) -> f64 {
        self.junctions.iter().fold(0.0, |a, j| a.max(j.switching))
    }

    pub fn max_switching_rate(&self) -> f64 {
        self.junctions
            .iter()
            .filter_map(|j| j.switching_rate)
            .fold(0.0, f64::max)
    }
}

/// Weierstrass–Erdmann and sewing residuals at every junction.
///
/// A junction on a grid node compares the two neighbouring intervals; one
/// inside a junction cell compares the intervals on either side of the cell.
pub fn verify_corner_conditions(
    model: &QuantumModel,
    solution: &ExtremalSolution,
    segmentation: &ArcSegmentation,
) -> CornerReport {
    let policy = &solution.policy;
    let diag = &solution.diagnostics;
    let (states, costates) = (solution.states(), solution.costates());
    let m_int = policy.intervals();
    let junctions = segmentation
        .junctions
        .iter()
        .map(|j| {
            let (left, right) = if j.on_node {
                (j.node - 1, j.node)
            } else {
                let cell = policy.nodes().partition_point(|&t| t <= j.time) - 1;
                (cell.saturating_sub(1), (cell + 1).min(m_int - 1))
            };
            let pf_jump = (diag.pf[left] - diag.pf[right]).abs();
            let i = j.node.clamp(1, m_int);
            let g = model.generator(&policy.at(i - 1));
            let carried = (-g.transpose() * policy.step(i - 1)).exp() * costates[i - 1].coeffs();
            let costate_jump = (carried - costates[i].coeffs()).norm();
            let switching = diag.switching[j.channel][j.node].abs();
            let switching_rate = match j.kind {
                JunctionKind::RegularToSingular | JunctionKind::SingularToSingular => Some(right),
                JunctionKind::SingularToRegular => Some(left),
                _ => None,
            }
            .map(|interval| {
                let lk = model.channel(j.channel).generator.matrix();
                let g = model.generator(&policy.at(interval));
                let (psi, rho) = (costates[j.node].coeffs(), states[j.node].coeffs());
                // dK_u/dt = ⟨ψ|[𝕃ₖ, 𝕃]|ρ⟩ with the singular-side generator.
                (psi.dot(&(lk * (&g * rho))) - psi.dot(&(&g * (lk * rho)))).abs()
            });
            CornerResidual {
                channel: j.channel,
                time: j.time,
                kind: j.kind,
                pf_jump,
                costate_jump,
                switching,
                switching_rate,
            }
        })
        .collect();
    let singular_switching = segmentation
        .singular_segments()
        .flat_map(|s| {
            s.intervals
                .clone()
                .map(move |m| diag.switching_on(s.channel, m).abs())
        })
        .fold(0.0, f64::max);
    CornerReport {
        junctions,
        singular_switching,
    }
}
