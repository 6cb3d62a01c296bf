// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;

use super::ascent::stationarity;
use super::{evaluate, ExtremalSolution, ProblemSpec};
use crate::dynamics::Propagators;
use crate::error::{Error, Result};

/// Periodic extremal viewed as a terminal problem over `n` periods.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Report {
    pub repetitions: usize,
    pub periodic_objective: f64,
    /// `J` of the terminal problem from `ρ̃(0)` under the repeated policy.
    pub terminal_objective: f64,
    /// Largest feasible-ascent interval mean of `K_uₖ` in the terminal problem;
    /// positive means the repeated policy is not a terminal extremal.
    pub violation: f64,
    /// `‖⟨O_n|Propʲ‖` on the traceless subspace for `j = 1..=repetitions`.
    pub costate_norms: Vec<f64>,
    /// Geometric mean ratio of consecutive `costate_norms`.
    pub decay_rate: f64,
    /// Second-largest eigenvalue modulus of the one-period propagator.
    pub contraction: f64,
}

/// Builds the terminal problem over `nT` from `ρ̃(0)` with the `n`-fold
/// repeated policy and measures how far it is from a terminal extremal.
pub fn theorem2_consistency_check(
    spec: &ProblemSpec,
    solution: &ExtremalSolution,
    n: usize,
    bound_tol: f64,
) -> Result<Theorem2Report> {
    if n < 2 {
        return Err(Error::Parameter(format!(
            "repetition count {n} must be at least 2"
        )));
    }
    if !spec.is_periodic() {
        return Err(Error::Precondition(
            "consistency check needs a periodic solution".into(),
        ));
    }
    let model = &spec.model;
    let policy = solution.policy.repeated(n)?;
    let terminal = ProblemSpec::terminal(
        model.clone(),
        solution.states()[0].clone(),
        policy.duration(),
    )?;
    let e = evaluate(&terminal, &policy, true)?;
    let (mut lo, mut hi, mut w, mut x, mut g) = (vec![], vec![], vec![], vec![], vec![]);
    for (k, b) in policy.bounds().iter().enumerate() {
        for m in 0..policy.intervals() {
            lo.push(b.lower);
            hi.push(b.upper);
            w.push(policy.step(m));
            x.push(policy.value(k, m));
            g.push(e.gradient[k][m]);
        }
    }
    let violation = stationarity(&x, &g, &w, &lo, &hi, bound_tol);

    let props = Propagators::new(model, &solution.policy, false)?;
    let p = props.product(0..props.len());
    let d = p.nrows();
    let a: DMatrix<f64> = p.view((1, 1), (d - 1, d - 1)).into_owned();
    let contraction = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let o_n = solution
        .normalized_observable
        .coeffs()
        .rows(1, d - 1)
        .into_owned();
    let mut row = o_n;
    let mut costate_norms = Vec::with_capacity(n);
    for _ in 0..n {
        row = a.tr_mul(&row);
        costate_norms.push(row.norm());
    }
    let decay_rate = if costate_norms[0] > 0.0 {
        (costate_norms[n - 1] / costate_norms[0]).powf(1.0 / (n - 1) as f64)
    } else {
        0.0
    };
    Ok(Theorem2Report {
        repetitions: n,
        periodic_objective: solution.objective,
        terminal_objective: e.objective,
        violation,
        costate_norms,
        decay_rate,
        contraction,
    })
}
