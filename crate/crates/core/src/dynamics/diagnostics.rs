// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use super::ControlPolicy;
use crate::error::{Error, Result};
use crate::liouville::{LiouvilleVector, QuantumModel};

/// Default relative tolerance on the singular-control denominator.
pub const BRANCH_TOL: f64 = 1e-10;

fn check_len(model: &QuantumModel, v: &LiouvilleVector) -> Result<()> {
    model.basis().check_vector(v)
}

fn check_channel(model: &QuantumModel, k: usize) -> Result<()> {
    if k >= model.num_controls() {
        return Err(Error::Parameter(format!("no control channel {k}")));
    }
    Ok(())
}

/// `K = ⟨ψ|(𝕃₀ + Σₖuₖ𝕃ₖ)|ρ⟩`.
pub fn pontryagin_function(
    model: &QuantumModel,
    psi: &LiouvilleVector,
    rho: &LiouvilleVector,
    u: &[f64],
) -> Result<f64> {
    check_len(model, psi)?;
    check_len(model, rho)?;
    if u.len() != model.num_controls() {
        return Err(Error::Shape {
            expected: model.num_controls(),
            found: u.len(),
        });
    }
    Ok(psi.coeffs().dot(&(model.generator(u) * rho.coeffs())))
}

/// `K_uₖ = ⟨ψ|𝕃ₖ|ρ⟩`.
pub fn switching_function(
    model: &QuantumModel,
    psi: &LiouvilleVector,
    rho: &LiouvilleVector,
    k: usize,
) -> Result<f64> {
    check_len(model, psi)?;
    check_len(model, rho)?;
    check_channel(model, k)?;
    Ok(psi
        .coeffs()
        .dot(&(model.channel(k).generator.matrix() * rho.coeffs())))
}

/// Time derivatives of `K_uₖ` along the flow with `𝕃_c` the frozen remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingDerivatives {
    /// `⟨ψ|[𝕃ₖ, 𝕃_c]|ρ⟩ = dK_uₖ/dt`.
    pub first: f64,
    /// `⟨ψ|[[𝕃ₖ, 𝕃_c], 𝕃_c]|ρ⟩`.
    pub drift_term: f64,
    /// `⟨ψ|[[𝕃ₖ, 𝕃_c], 𝕃ₖ]|ρ⟩`; `d²K_uₖ/dt² = drift_term + uₖ·control_term`.
    pub control_term: f64,
    /// `‖[[𝕃ₖ, 𝕃_c], 𝕃ₖ]‖_F·‖ψ‖·‖ρ‖`, the scale for branch-point tests.
    pub control_scale: f64,
}

impl SwitchingDerivatives {
    pub fn second(&self, uk: f64) -> f64 {
        self.drift_term + uk * self.control_term
    }
}

fn derivatives_raw(
    lk: &DMatrix<f64>,
    lc: &DMatrix<f64>,
    psi: &DVector<f64>,
    rho: &DVector<f64>,
) -> SwitchingDerivatives {
    let (lr, cr) = (lk * rho, lc * rho);
    let (lp, cp) = (lk.tr_mul(psi), lc.tr_mul(psi));
    let first = lp.dot(&cr) - cp.dot(&lr);
    // C = [𝕃ₖ, 𝕃_c] applied from both sides without forming it.
    let c_rho = lk * &cr - lc * &lr;
    let c_psi = lc.tr_mul(&lp) - lk.tr_mul(&cp);
    let drift_term = c_psi.dot(&cr) - cp.dot(&c_rho);
    let control_term = c_psi.dot(&lr) - lp.dot(&c_rho);
    let c = lk * lc - lc * lk;
    let cc = &c * lk - lk * &c;
    SwitchingDerivatives {
        first,
        drift_term,
        control_term,
        control_scale: cc.norm() * psi.norm() * rho.norm(),
    }
}

/// First derivative and second-derivative coefficients of `K_uₖ` at `(ψ, ρ)`
/// with the other channels held at `u`.
pub fn switching_derivatives(
    model: &QuantumModel,
    psi: &LiouvilleVector,
    rho: &LiouvilleVector,
    u: &[f64],
    k: usize,
) -> Result<SwitchingDerivatives> {
    check_len(model, psi)?;
    check_len(model, rho)?;
    check_channel(model, k)?;
    let lc = model.frozen_remainder(u, k);
    Ok(derivatives_raw(
        model.channel(k).generator.matrix(),
        &lc,
        psi.coeffs(),
        rho.coeffs(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularControl {
    /// Root of `d²K_uₖ/dt² = 0`; `within_bounds` is false on an infeasible singular arc.
    Value { value: f64, within_bounds: bool },
    /// Denominator below the branch tolerance.
    BranchPoint { denominator: f64 },
}

/// Singular control value `uₖ = −⟨ψ|[[𝕃ₖ,𝕃_c],𝕃_c]|ρ⟩ / ⟨ψ|[[𝕃ₖ,𝕃_c],𝕃ₖ]|ρ⟩`.
///
/// `switching_tol` is the absolute threshold below which `K_uₖ` and its first
/// derivative count as vanishing; `branch_tol` is relative to the commutator scale.
pub fn singular_control_value(
    model: &QuantumModel,
    psi: &LiouvilleVector,
    rho: &LiouvilleVector,
    u: &[f64],
    k: usize,
    switching_tol: f64,
    branch_tol: f64,
) -> Result<SingularControl> {
    let ku = switching_function(model, psi, rho, k)?;
    let d = switching_derivatives(model, psi, rho, u, k)?;
    if ku.abs() > switching_tol || d.first.abs() > switching_tol {
        return Err(Error::Precondition(format!(
            "not a singular point: K_u = {ku:e}, dK_u/dt = {:e}",
            d.first
        )));
    }
    if d.control_term.abs() <= branch_tol * d.control_scale.max(f64::MIN_POSITIVE) {
        return Ok(SingularControl::BranchPoint {
            denominator: d.control_term,
        });
    }
    let value = -d.drift_term / d.control_term;
    Ok(SingularControl::Value {
        value,
        within_bounds: model.channel(k).bounds.contains(value, 0.0),
    })
}

/// `‖[ρ, Õ]‖_F` for the matrix forms of a state and a propagated observable.
pub fn kinematic_degeneracy(
    model: &QuantumModel,
    rho: &LiouvilleVector,
    observable: &LiouvilleVector,
) -> Result<f64> {
    if !model.is_closed() {
        return Err(Error::NotApplicable(
            "kinematic degeneracy is defined for closed models only".into(),
        ));
    }
    check_len(model, rho)?;
    check_len(model, observable)?;
    let b = model.basis();
    let (r, o) = (b.devectorize(rho), b.devectorize(observable));
    Ok((&r * &o - &o * &r).norm())
}

/// PMP quantities along a jointly propagated state/costate pair.
#[derive(Debug, Clone)]
pub struct DiagnosticsTrace {
    pub times: Vec<f64>,
    /// `K` on each interval (exactly constant within it).
    pub pf: Vec<f64>,
    /// `K_uₖ(tₘ)` at every node, `[k][m]`.
    pub switching: Vec<Vec<f64>>,
    /// Interval means of `K_uₖ`, `[k][m]`, when the exact gradient is available.
    pub switching_mean: Option<Vec<Vec<f64>>>,
    /// Right derivative of `K_uₖ` at the start of each interval, `[k][m]`.
    pub switching_rate: Vec<Vec<f64>>,
    /// Second-derivative coefficients at the start of each interval, `[k][m]`.
    pub second_order: Vec<Vec<SwitchingDerivatives>>,
    /// `‖[ρ(tₘ), ψ(tₘ)]‖_F` for closed models.
    pub degeneracy: Option<Vec<f64>>,
}

impl DiagnosticsTrace {
    /// `gradient`, when given, is `∂J/∂u[k][m]` and yields the interval means.
    pub fn new(
        model: &QuantumModel,
        policy: &ControlPolicy,
        states: &[LiouvilleVector],
        costates: &[LiouvilleVector],
        gradient: Option<&[Vec<f64>]>,
    ) -> Result<Self> {
        let m_int = policy.intervals();
        if states.len() != m_int + 1 || costates.len() != m_int + 1 {
            return Err(Error::Shape {
                expected: m_int + 1,
                found: states.len().min(costates.len()),
            });
        }
        let nc = model.num_controls();
        let mut pf = Vec::with_capacity(m_int);
        let mut rate = vec![Vec::with_capacity(m_int); nc];
        let mut second = vec![Vec::with_capacity(m_int); nc];
        for m in 0..m_int {
            let u = policy.at(m);
            let (psi, rho) = (costates[m].coeffs(), states[m].coeffs());
            pf.push(psi.dot(&(model.generator(&u) * rho)));
            for k in 0..nc {
                let lc = model.frozen_remainder(&u, k);
                let d = derivatives_raw(model.channel(k).generator.matrix(), &lc, psi, rho);
                rate[k].push(d.first);
                second[k].push(d);
            }
        }
        let switching = (0..nc)
            .map(|k| {
                let l = model.channel(k).generator.matrix();
                states
                    .iter()
                    .zip(costates)
                    .map(|(r, p)| p.coeffs().dot(&(l * r.coeffs())))
                    .collect()
            })
            .collect();
        let switching_mean = gradient.map(|g| {
            g.iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(m, x)| x / policy.step(m))
                        .collect()
                })
                .collect()
        });
        let degeneracy = if model.is_closed() {
            let b = model.basis();
            Some(
                states
                    .iter()
                    .zip(costates)
                    .map(|(r, p)| {
                        let (r, o) = (b.devectorize(r), b.devectorize(p));
                        (&r * &o - &o * &r).norm()
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            times: policy.nodes().to_vec(),
            pf,
            switching,
            switching_mean,
            switching_rate: rate,
            second_order: second,
            degeneracy,
        })
    }

    pub fn intervals(&self) -> usize {
        self.pf.len()
    }

    /// `max K − min K` over the intervals.
    pub fn pf_spread(&self) -> f64 {
        let (lo, hi) = self
            .pf
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| {
                (lo.min(k), hi.max(k))
            });
        hi - lo
    }

    /// Duration-weighted mean of `K`.
    pub fn pf_mean(&self) -> f64 {
        let t = self.times[self.times.len() - 1] - self.times[0];
        self.pf
            .iter()
            .enumerate()
            .map(|(m, k)| k * (self.times[m + 1] - self.times[m]))
            .sum::<f64>()
            / t
    }

    /// Interval value of `K_uₖ`: the exact mean when available, else the node average.
    pub fn switching_on(&self, k: usize, m: usize) -> f64 {
        match &self.switching_mean {
            Some(s) => s[k][m],
            None => 0.5 * (self.switching[k][m] + self.switching[k][m + 1]),
        }
    }

    pub fn max_abs_switching(&self, k: usize) -> f64 {
        self.switching[k]
            .iter()
            .fold(0.0, |a, x| f64::max(a, x.abs()))
    }
}
