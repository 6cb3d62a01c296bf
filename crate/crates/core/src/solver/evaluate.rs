// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use super::{BoundaryMode, ProblemSpec};
use crate::dynamics::{check_policy, ControlPolicy, Propagators};
use crate::error::{Error, Result};
use crate::liouville::{LiouvilleVector, QuantumModel};

/// Spectral radius of the traceless block within this distance of one is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Relative size of `⟨O_n|` below which the problem counts as abnormal.
pub const ABNORMAL_TOL: f64 = 1e-12;

/// Objective, trajectory, costate and gradient for one policy.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub objective: f64,
    pub props: Propagators,
    pub states: Vec<DVector<f64>>,
    pub costates: Vec<DVector<f64>>,
    /// `∂J/∂u[k][m]`; empty when not requested.
    pub gradient: Vec<Vec<f64>>,
    /// `⟨O_n| = ⟨O| − J⟨1|`.
    pub normalized_observable: DVector<f64>,
}

/// Splits a trace-preserving propagator `[[1, 0], [b, A]]` at the trace coordinate.
fn traceless_blocks(p: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let d = p.nrows();
    (
        p.view((1, 0), (d - 1, 1)).column(0).into_owned(),
        p.view((1, 1), (d - 1, d - 1)).into_owned(),
    )
}

fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Unique trace-one fixed point of the one-period propagator `p`.
pub(crate) fn fixed_point_of(p: &DMatrix<f64>, dim: usize) -> Result<DVector<f64>> {
    let (b, a) = traceless_blocks(p);
    let radius = spectral_radius(&a);
    if (radius - 1.0).abs() <= DEGENERACY_TOL || radius > 1.0 {
        return Err(Error::DegenerateSpectrum { modulus: radius });
    }
    let n = a.nrows();
    let inv_sqrt = 1.0 / (dim as f64).sqrt();
    let lhs = DMatrix::identity(n, n) - &a;
    let y = lhs
        .lu()
        .solve(&(b * inv_sqrt))
        .ok_or_else(|| Error::NumericalRank("state fixed-point system is singular".into()))?;
    let mut rho = DVector::zeros(n + 1);
    rho[0] = inv_sqrt;
    rho.rows_mut(1, n).copy_from(&y);
    Ok(rho)
}

/// Terminal costate `⟨ψ(T)|` of the periodic problem for the fixed point `rho`.
pub(crate) fn periodic_costate_of(
    p: &DMatrix<f64>,
    rho: &DVector<f64>,
    o_n: &DVector<f64>,
    dim: usize,
) -> Result<DVector<f64>> {
    let (_, a) = traceless_blocks(p);
    let n = a.nrows();
    let rhs = o_n.rows(1, n).into_owned();
    let lhs = DMatrix::identity(n, n) - a.transpose();
    let w = lhs
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalRank("costate fixed-point system is singular".into()))?;
    let resid = (&lhs * &w - &rhs).norm();
    if !(resid <= 1e-8 * (1.0 + rhs.norm())) {
        return Err(Error::NumericalRank(format!(
            "costate fixed-point residual {resid:e}"
        )));
    }
    let y = rho.rows(1, n);
    let mut psi = DVector::zeros(n + 1);
    psi[0] = -(dim as f64).sqrt() * w.dot(&y);
    psi.rows_mut(1, n).copy_from(&w);
    Ok(psi)
}

fn check_abnormal(o: &DVector<f64>, o_n: &DVector<f64>) -> Result<()> {
    if o_n.norm() <= ABNORMAL_TOL * o.norm().max(1.0) {
        return Err(Error::Abnormal(o_n.norm()));
    }
    Ok(())
}

/// Evaluates `J`, the trajectory and (optionally) the exact gradient.
pub(crate) fn evaluate(
    spec: &ProblemSpec,
    policy: &ControlPolicy,
    with_gradient: bool,
) -> Result<Evaluation> {
    let model = &spec.model;
    let props = Propagators::new(model, policy, with_gradient)?;
    let dim = model.basis().dim();
    let o = model.observable().coeffs();
    let one = model.basis().identity().into_inner();
    let (states, objective, psi_end, o_n) = match &spec.mode {
        BoundaryMode::Terminal { initial, .. } => {
            let states = props.forward(initial.coeffs());
            let j = o.dot(states.last().unwrap());
            let o_n = o - &one * j;
            check_abnormal(o, &o_n)?;
            (states, j, o_n.clone(), o_n)
        }
        BoundaryMode::Periodic { .. } => {
            let p = props.product(0..props.len());
            let rho = fixed_point_of(&p, dim)?;
            let j = o.dot(&rho);
            let o_n = o - &one * j;
            check_abnormal(o, &o_n)?;
            let psi_end = periodic_costate_of(&p, &rho, &o_n, dim)?;
            let mut states = props.forward(&rho);
            // Close the orbit exactly; the computed end differs by round-off only.
            *states.last_mut().unwrap() = rho;
            (states, j, psi_end, o_n)
        }
    };
    if !objective.is_finite() {
        return Err(Error::Propagation {
            interval: policy.intervals(),
            reason: "non-finite objective".into(),
        });
    }
    let costates = props.backward(&psi_end);
    let gradient = if with_gradient {
        props.gradient(&states, &costates).unwrap_or_default()
    } else {
        Vec::new()
    };
    Ok(Evaluation {
        objective,
        props,
        states,
        costates,
        gradient,
        normalized_observable: o_n,
    })
}

/// `J` of a policy: `⟨O|ρ(t_f)⟩` (terminal) or `⟨O|ρ̃⟩` on the periodic orbit.
pub fn objective(spec: &ProblemSpec, policy: &ControlPolicy) -> Result<f64> {
    let model = &spec.model;
    let props = Propagators::new(model, policy, false)?;
    let o = model.observable().coeffs();
    match &spec.mode {
        BoundaryMode::Terminal { initial, .. } => {
            let end = props.product(0..props.len()) * initial.coeffs();
            Ok(o.dot(&end))
        }
        BoundaryMode::Periodic { .. } => {
            let p = props.product(0..props.len());
            Ok(o.dot(&fixed_point_of(&p, model.basis().dim())?))
        }
    }
}

/// `∂J/∂u[k][m]` by the adjoint method.
pub fn adjoint_gradient(spec: &ProblemSpec, policy: &ControlPolicy) -> Result<Vec<Vec<f64>>> {
    spec.check_policy(policy)?;
    Ok(evaluate(spec, policy, true)?.gradient)
}

/// `∂J/∂tᵢ` for every node: the jump `K(tᵢ−) − K(tᵢ+)` at interior nodes,
/// `K` on the last interval at the end node and `−K` on the first at the start.
pub(crate) fn node_gradient(
    model: &QuantumModel,
    policy: &ControlPolicy,
    eval: &Evaluation,
) -> Vec<f64> {
    let m = policy.intervals();
    let pf_at = |interval: usize, node: usize| {
        let g = model.generator(&policy.at(interval));
        eval.costates[node].dot(&(g * &eval.states[node]))
    };
    let mut out = vec![0.0; m + 1];
    out[0] = -pf_at(0, 0);
    out[m] = pf_at(m - 1, m);
    for i in 1..m {
        out[i] = pf_at(i - 1, i) - pf_at(i, i);
    }
    out
}

/// Unique trace-one fixed point `ρ̃ = Prop(T)ρ̃` of the one-period propagator.
pub fn periodic_state_fixed_point(
    model: &QuantumModel,
    policy: &ControlPolicy,
) -> Result<LiouvilleVector> {
    check_policy(model, policy)?;
    let props = Propagators::new(model, policy, false)?;
    let p = props.product(0..props.len());
    Ok(fixed_point_of(&p, model.basis().dim())?.into())
}

/// Terminal costate `⟨ψ(T)|` solving `⟨ψ(T)|(Prop − 𝕀) = −⟨O_n|` with `⟨ψ(T)|ρ̃⟩ = 0`.
pub fn periodic_costate_fixed_point(
    model: &QuantumModel,
    policy: &ControlPolicy,
    fixed_point: &LiouvilleVector,
) -> Result<LiouvilleVector> {
    check_policy(model, policy)?;
    let props = Propagators::new(model, policy, false)?;
    let p = props.product(0..props.len());
    let o = model.observable().coeffs();
    let o_n = o - model.basis().identity().coeffs() * o.dot(fixed_point.coeffs());
    check_abnormal(o, &o_n)?;
    Ok(periodic_costate_of(&p, fixed_point.coeffs(), &o_n, model.basis().dim())?.into())
}
