// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};

/// Structure of an extremal as seen by the parameter/constraint count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructureCounts {
    /// Hilbert-space dimension `N`.
    pub dim: i64,
    /// Number of special junction points (corners and branch points).
    pub n_spec: i64,
    /// Orders `sₖ ≥ 1` of the branch points.
    pub branch_orders: Vec<i64>,
    /// 1 with a free horizon, else 0.
    pub alpha: i64,
    /// Number of singular terminating arcs, `0..=2`.
    pub beta: i64,
    /// Branch points connecting two singular arcs.
    pub n_sing: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParameterBalance {
    pub p_total: i64,
    pub c_total: i64,
    pub p_branch: i64,
    pub c_branch: i64,
}

impl ParameterBalance {
    /// `P_total − C_total`.
    pub fn surplus(&self) -> i64 {
        self.p_total - self.c_total
    }

    /// `P_total ≥ C_total`; otherwise the extremal needs redundant constraints.
    pub fn resolvable(&self) -> bool {
        self.p_total >= self.c_total
    }
}

/// `P_total = N_spec + 2N² + P_branch + α` and
/// `C_total = 2N² + α + N_spec − N_sing + C_branch + β` with
/// `P_branch = Σ(sₖ−1)` and `C_branch = Σ(½(sₖ+1)(sₖ+2) − 1)`.
pub fn count_parameters_constraints(s: &StructureCounts) -> Result<ParameterBalance> {
    let fields = [
        ("N", s.dim),
        ("N_spec", s.n_spec),
        ("alpha", s.alpha),
        ("beta", s.beta),
        ("N_sing", s.n_sing),
    ];
    if let Some((name, v)) = fields.iter().find(|(_, v)| *v < 0) {
        return Err(Error::Parameter(format!("{name} = {v} is negative")));
    }
    if s.alpha > 1 {
        return Err(Error::Parameter(format!(
            "alpha = {} must be 0 or 1",
            s.alpha
        )));
    }
    if s.beta > 2 {
        return Err(Error::Parameter(format!(
            "beta = {} exceeds the two terminating arcs",
            s.beta
        )));
    }
    if let Some(o) = s.branch_orders.iter().find(|&&o| o < 1) {
        return Err(Error::Parameter(format!(
            "branch order {o} must be at least 1"
        )));
    }
    let n_branch = s.branch_orders.len() as i64;
    if s.n_sing > n_branch {
        return Err(Error::Parameter(format!(
            "N_sing = {} exceeds the {n_branch} branch points",
            s.n_sing
        )));
    }
    if n_branch > s.n_spec {
        return Err(Error::Parameter(format!(
            "{n_branch} branch points but only {} junctions",
            s.n_spec
        )));
    }
    let p_branch: i64 = s.branch_orders.iter().map(|o| o - 1).sum();
    let c_branch: i64 = s
        .branch_orders
        .iter()
        .map(|o| (o + 1) * (o + 2) / 2 - 1)
        .sum();
    let boundary = 2 * s.dim * s.dim;
    Ok(ParameterBalance {
        p_total: s.n_spec + boundary + p_branch + s.alpha,
        c_total: boundary + s.alpha + s.n_spec - s.n_sing + c_branch + s.beta,
        p_branch,
        c_branch,
    })
}
