// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use crate::arcs::{classify_arcs, ArcLabel, ArcTolerances};
use crate::error::{Error, Result};
use crate::solver::{multistart, ExtremalSolution, ProblemSpec, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStructure {
    /// Dissipation at its maximum, then off while the coherent drive acts.
    TwoPhase,
    /// Dissipation on throughout, no coherent action.
    DissipationOnly,
    /// Dissipation off throughout, coherent drive only.
    CoherentOnly,
    Other,
}

impl fmt::Display for CcStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TwoPhase => "dissipation on -> dissipation off + coherent drive",
            Self::DissipationOnly => "dissipation on throughout",
            Self::CoherentOnly => "coherent drive only",
            Self::Other => "other",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CcProtocolReport {
    pub structure: CcStructure,
    pub collision_channel: usize,
    /// Arc labels of the collision channel.
    pub phases: Vec<(f64, f64, ArcLabel)>,
    /// End of the initial dissipation phase.
    pub switch_off: Option<f64>,
    pub solution: ExtremalSolution,
}

/// Solves a problem with one collision channel and coherent channels and
/// reports whether the schedule cools first and drives coherently afterwards.
pub fn cc_protocol_demo(
    spec: &ProblemSpec,
    config: &SolverConfig,
    starts: usize,
    seed: u64,
) -> Result<CcProtocolReport> {
    let model = &spec.model;
    let k = (0..model.num_controls())
        .find(|&k| model.channel(k).is_collision())
        .ok_or_else(|| Error::Precondition("model has no collision channel".into()))?;
    let solution = multistart(spec, config, &[], starts, seed)
        .into_iter()
        .filter_map(|o| o.result.ok())
        .max_by(|a, b| a.objective.total_cmp(&b.objective))
        .ok_or_else(|| Error::Precondition("no start produced a solution".into()))?;
    let policy = &solution.policy;
    let tol = ArcTolerances::default();
    let seg = classify_arcs(model, &solution, &tol);
    let phases: Vec<(f64, f64, ArcLabel)> = seg
        .channel_segments(k)
        .map(|s| (s.start, s.end, s.label))
        .collect();
    let b = policy.bounds()[k];
    let slack = tol.eps_u * b.width();
    let on = |m: usize| b.width() > 0.0 && policy.value(k, m) >= b.upper - slack && b.upper > 0.0;
    let off =
        |m: usize| (policy.value(k, m) <= b.lower + slack && b.lower == 0.0) || b.upper == 0.0;
    let coherent_active = |m: usize| {
        (0..policy.channels()).filter(|&c| c != k).any(|c| {
            let cb = policy.bounds()[c];
            cb.width() > 0.0 && policy.value(c, m).abs() > tol.eps_u * cb.width()
        })
    };
    let m_int = policy.intervals();
    let first_off = (0..m_int).find(|&m| !on(m)).unwrap_or(m_int);
    let structure = if first_off == m_int {
        if (0..m_int).any(coherent_active) {
            CcStructure::Other
        } else {
            CcStructure::DissipationOnly
        }
    } else if (first_off..m_int).all(off) {
        let drive_after = (first_off..m_int).any(coherent_active);
        match (first_off > 0, drive_after) {
            (true, true) => CcStructure::TwoPhase,
            (false, true) => CcStructure::CoherentOnly,
            _ => CcStructure::Other,
        }
    } else {
        CcStructure::Other
    };
    let switch_off = (first_off > 0 && first_off < m_int).then(|| policy.nodes()[first_off]);
    Ok(CcProtocolReport {
        structure,
        collision_channel: k,
        phases,
        switch_off,
        solution,
    })
}
