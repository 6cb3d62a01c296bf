// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::classify::{classify_arcs, ArcLabel, ArcSegmentation, ArcTolerances, JunctionKind};
use super::corners::{verify_corner_conditions, CornerReport};
use super::counting::{count_parameters_constraints, ParameterBalance, StructureCounts};
use super::smoothness::{smoothness_probe, SmoothnessReport, MIN_PROBE_INTERVALS};
use super::BranchOrder;
use crate::error::Result;
use crate::solver::{ExtremalSolution, ProblemSpec};

/// Relative size below which a commutator or bracket counts as zero when
/// looking for constraint redundancies.
pub const REDUNDANCY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Degenerate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NotApplicable => "NOT-APPLICABLE",
            Self::Degenerate => "DEGENERATE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Known sources of redundant equality constraints, which void the
/// parameter count.
#[derive(Debug, Clone, PartialEq)]
pub enum Redundancy {
    /// Closed model with `[ρ(t), ψ(t)] = 0` along the extremal.
    KinematicCriticalPoint { commutator: f64 },
    /// `⟨O_n|𝕃ₖ = 0`, so one transversality condition is implied by the others.
    ObservableAnnihilatesChannel { channel: usize, norm: f64 },
    /// Start in a stationary state of the drift with vanishing `K`.
    ThermalizedStart { pf: f64 },
    /// `K_uₖ ≡ 0`: the channel has no influence on `J`.
    NoAuthority { channel: usize },
}

impl fmt::Display for Redundancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::KinematicCriticalPoint { commutator } => {
                write!(
                    f,
                    "kinematic critical point, max ||[rho, psi]|| = {commutator:.3e}"
                )
            }
            Self::ObservableAnnihilatesChannel { channel, norm } => {
                write!(
                    f,
                    "observable annihilates channel {channel}, ||<O_n|L_k|| = {norm:.3e}"
                )
            }
            Self::ThermalizedStart { pf } => {
                write!(f, "stationary initial state with K = {pf:.3e}")
            }
            Self::NoAuthority { channel } => write!(
                f,
                "switching function of channel {channel} vanishes identically"
            ),
        }
    }
}

/// Scans a solution for the redundancies that exempt it from the count.
pub fn detect_redundancies(spec: &ProblemSpec, solution: &ExtremalSolution) -> Vec<Redundancy> {
    let model = &spec.model;
    let mut out = Vec::new();
    if let Some(deg) = &solution.diagnostics.degeneracy {
        let rel = deg
            .iter()
            .zip(solution.states().iter().zip(solution.costates()))
            .map(|(d, (r, p))| d / (r.coeffs().norm() * p.coeffs().norm()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if rel <= REDUNDANCY_TOL {
            out.push(Redundancy::KinematicCriticalPoint {
                commutator: deg.iter().fold(0.0, |a, x| a.max(*x)),
            });
        }
    }
    let o_n = solution.normalized_observable.coeffs();
    for k in 0..model.num_controls() {
        let l = model.channel(k).generator.matrix();
        let norm = l.tr_mul(o_n).norm();
        // Only the terminal costate equals ⟨O_n|; a periodic one does not.
        if !spec.is_periodic() && norm <= REDUNDANCY_TOL * l.norm() * o_n.norm() {
            out.push(Redundancy::ObservableAnnihilatesChannel { channel: k, norm });
        }
        if solution.diagnostics.max_abs_switching(k) <= f64::MIN_POSITIVE.max(1e-14 * o_n.norm()) {
            out.push(Redundancy::NoAuthority { channel: k });
        }
    }
    if let Some(rho0) = spec.initial_state() {
        let drift = model.drift().matrix();
        let stationary =
            (drift * rho0.coeffs()).norm() <= REDUNDANCY_TOL * drift.norm() * rho0.coeffs().norm();
        let pf = solution.residuals.pf_initial;
        if stationary
            && pf.abs() <= REDUNDANCY_TOL * solution.residuals.pf_scale.max(f64::MIN_POSITIVE)
        {
            out.push(Redundancy::ThermalizedStart { pf });
        }
    }
    out
}

/// Arc structure, parameter count and Theorem-1 verdict of one extremal.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub segmentation: ArcSegmentation,
    pub counts: StructureCounts,
    pub balance: ParameterBalance,
    pub branch_orders: Vec<BranchOrder>,
    pub starts_regular: bool,
    pub ends_regular: bool,
    pub verdict: Verdict,
    pub reason: String,
    pub redundancies: Vec<Redundancy>,
    pub corners: CornerReport,
    /// Probes of the singular segments long enough to probe.
    pub smoothness: Vec<SmoothnessReport>,
    /// `(max K − min K) / max(1, |K(0)|)`.
    pub relative_pf_spread: f64,
}

/// Classifies the arcs of `solution`, counts parameters against constraints
/// and checks that a resolvable structure starts and ends with regular arcs.
///
/// The verdict is `DEGENERATE` when a known redundancy voids the count,
/// `NOT-APPLICABLE` when the segmentation is ambiguous, `PASS` when the
/// count balances (which forces regular ends and no branch points) and
/// `FAIL` otherwise.
pub fn structure_report(
    spec: &ProblemSpec,
    solution: &ExtremalSolution,
    tol: &ArcTolerances,
) -> Result<StructureReport> {
    let model = &spec.model;
    let segmentation = classify_arcs(model, solution, tol);
    let nc = solution.policy.channels();
    let starts_regular =
        (0..nc).all(|k| segmentation.first(k).is_some_and(|s| s.label.is_regular()));
    let ends_regular = (0..nc).all(|k| segmentation.last(k).is_some_and(|s| s.label.is_regular()));
    let singular_at = |first: bool| {
        (0..nc).any(|k| {
            let s = if first {
                segmentation.first(k)
            } else {
                segmentation.last(k)
            };
            s.is_some_and(|s| s.label == ArcLabel::Singular)
        })
    };
    let branch_orders: Vec<BranchOrder> = segmentation
        .junctions
        .iter()
        .filter_map(|j| j.branch)
        .collect();
    let n_sing = segmentation
        .junctions
        .iter()
        .filter(|j| j.branch.is_some() && j.kind == JunctionKind::SingularToSingular)
        .count();
    let counts = StructureCounts {
        dim: model.basis().dim() as i64,
        n_spec: segmentation.junctions.len() as i64,
        branch_orders: branch_orders.iter().map(|o| o.value() as i64).collect(),
        alpha: spec.free_horizon() as i64,
        beta: singular_at(true) as i64 + singular_at(false) as i64,
        n_sing: n_sing as i64,
    };
    let balance = count_parameters_constraints(&counts)?;
    let redundancies = detect_redundancies(spec, solution);
    let corners = verify_corner_conditions(model, solution, &segmentation);
    let bounds = solution.policy.bounds();
    let smoothness = segmentation
        .singular_segments()
        .filter(|s| s.intervals.len() >= MIN_PROBE_INTERVALS)
        .map(|s| smoothness_probe(&solution.policy, s, tol.eps_u * bounds[s.channel].width()))
        .collect::<Result<Vec<_>>>()?;
    let (verdict, reason) = if !redundancies.is_empty() {
        let list: Vec<String> = redundancies.iter().map(ToString::to_string).collect();
        (Verdict::Degenerate, list.join("; "))
    } else if segmentation.is_ambiguous() {
        (
            Verdict::NotApplicable,
            format!(
                "{} intervals fit no arc label",
                segmentation.ambiguous.len()
            ),
        )
    } else if balance.resolvable() {
        (
            Verdict::Pass,
            format!(
                "P_total = C_total = {}, regular at both ends",
                balance.c_total
            ),
        )
    } else {
        (
            Verdict::Fail,
            format!(
                "P_total - C_total = {} without a detected redundancy (starts regular: {starts_regular}, ends regular: {ends_regular}, {} branch points)",
                balance.surplus(),
                branch_orders.len()
            ),
        )
    };
    Ok(StructureReport {
        segmentation,
        counts,
        balance,
        branch_orders,
        starts_regular,
        ends_regular,
        verdict,
        reason,
        redundancies,
        corners,
        smoothness,
        relative_pf_spread: solution.residuals.relative_pf_spread(),
    })
}
