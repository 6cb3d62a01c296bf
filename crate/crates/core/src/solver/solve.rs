// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ascent::{maximize_box, stationarity, AscentSettings};
use super::polish::polish_junctions;
use super::{
    evaluate, node_gradient, objective, Convergence, ExtremalSolution, ProblemSpec, Residuals,
    SolverConfig,
};
use crate::dynamics::{ControlPolicy, DiagnosticsTrace, Trajectory};
use crate::error::{Error, Result};
use crate::liouville::LiouvilleVector;

fn flat_bounds(policy: &ControlPolicy) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = policy.intervals();
    let mut lo = Vec::with_capacity(m * policy.channels());
    let mut hi = Vec::with_capacity(lo.capacity());
    let mut w = Vec::with_capacity(lo.capacity());
    for b in policy.bounds() {
        for i in 0..m {
            lo.push(b.lower);
            hi.push(b.upper);
            w.push(policy.step(i));
        }
    }
    (lo, hi, w)
}

fn policy_stationarity(policy: &ControlPolicy, gradient: &[Vec<f64>], bound_tol: f64) -> f64 {
    let (lo, hi, w) = flat_bounds(policy);
    let g: Vec<f64> = gradient.iter().flatten().copied().collect();
    stationarity(&policy.flat(), &g, &w, &lo, &hi, bound_tol)
}

/// Solves the problem of `spec` (terminal or periodic) from `initial`.
pub fn solve(
    spec: &ProblemSpec,
    initial: &ControlPolicy,
    config: &SolverConfig,
) -> Result<ExtremalSolution> {
    spec.check_policy(initial)?;
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut ascent_stat = 0.0;
    let mut policy = initial.clone();
    if spec.model.num_controls() > 0 {
        let (lo, hi, w) = flat_bounds(initial);
        let f = |x: &[f64], grad: bool| -> Result<(f64, Vec<f64>)> {
            let p = initial.with_flat(x);
            if grad {
                let e = evaluate(spec, &p, true)?;
                Ok((e.objective, e.gradient.into_iter().flatten().collect()))
            } else {
                Ok((objective(spec, &p)?, Vec::new()))
            }
        };
        let settings = AscentSettings {
            method: config.method,
            max_iterations: config.max_iterations,
            tolerance: config.gradient_tol,
            bound_tol: config.bound_tol,
            initial_step: config.initial_step,
        };
        let out = maximize_box(f, &initial.flat(), &lo, &hi, &w, &settings)?;
        iterations = out.iterations;
        evaluations = out.evaluations;
        ascent_stat = out.stationarity;
        policy = initial.with_flat(&out.x);
    }
    let mut polished = false;
    if config.polish && spec.model.num_controls() > 0 {
        let before = objective(spec, &policy)?;
        if let Some(p) = polish_junctions(spec, &policy, config.bound_tol, false)? {
            let p = p.subdivided(initial.duration() / initial.intervals() as f64)?;
            if objective(spec, &p)? >= before - 1e-12 * before.abs().max(1.0) {
                policy = p;
                polished = true;
            }
        }
    }
    let mut sol = build_solution(spec, &policy, config.bound_tol)?;
    let final_stat = policy_stationarity(&policy, &sol.gradient, config.bound_tol);
    sol.convergence = Convergence {
        iterations,
        evaluations,
        stationarity: if polished {
            final_stat
        } else {
            ascent_stat.max(final_stat)
        },
        converged: final_stat <= config.gradient_tol,
        polished,
    };
    Ok(sol)
}

/// Terminal problem: maximize `⟨O|ρ(t_f)⟩` from the fixed initial state.
pub fn solve_terminal(
    spec: &ProblemSpec,
    initial: &ControlPolicy,
    config: &SolverConfig,
) -> Result<ExtremalSolution> {
    if spec.is_periodic() {
        return Err(Error::Precondition(
            "solve_terminal needs a terminal problem".into(),
        ));
    }
    solve(spec, initial, config)
}

/// Periodic problem: maximize `⟨O|ρ̃⟩` on the quasistationary orbit.
pub fn solve_periodic(
    spec: &ProblemSpec,
    initial: &ControlPolicy,
    config: &SolverConfig,
) -> Result<ExtremalSolution> {
    if !spec.is_periodic() {
        return Err(Error::Precondition(
            "solve_periodic needs a periodic problem".into(),
        ));
    }
    solve(spec, initial, config)
}

/// Evaluates a policy and packages it with all boundary residuals.
pub(crate) fn build_solution(
    spec: &ProblemSpec,
    policy: &ControlPolicy,
    bound_tol: f64,
) -> Result<ExtremalSolution> {
    spec.check_policy(policy)?;
    let model = &spec.model;
    let e = evaluate(spec, policy, true)?;
    let m = policy.intervals();
    let one = model.basis().identity();
    let o_n = &e.normalized_observable;
    let (transversality, periodicity) = if spec.is_periodic() {
        let prop = e.props.product(0..m);
        let rho = &e.states[0];
        (
            (&e.costates[0] - &e.costates[m] + o_n).norm(),
            Some((prop * rho - rho).norm()),
        )
    } else {
        ((&e.costates[m] - o_n).norm(), None)
    };
    let states: Vec<LiouvilleVector> = e.states.iter().cloned().map(Into::into).collect();
    let costates: Vec<LiouvilleVector> = e.costates.iter().cloned().map(Into::into).collect();
    let trajectory = Trajectory::new(policy.nodes().to_vec(), states.clone())?
        .with_costates(costates.clone())?;
    let diagnostics = DiagnosticsTrace::new(model, policy, &states, &costates, Some(&e.gradient))?;
    let jumps = node_gradient(model, policy, &e);
    let pf_scale = e
        .states
        .iter()
        .zip(&e.costates)
        .map(|(r, p)| p.dot(&(model.drift().matrix() * r)).abs())
        .fold(0.0, f64::max);
    let residuals = Residuals {
        transversality,
        periodicity,
        normalization: trajectory.normalization_error().unwrap_or(0.0),
        trace: trajectory.trace_error(&one),
        pf_spread: diagnostics.pf_spread(),
        pf_initial: diagnostics.pf[0],
        pf_final: diagnostics.pf[m - 1],
        pf_scale,
        max_pf_jump: jumps[1..m].iter().fold(0.0, |a, x| a.max(x.abs())),
    };
    let stat = policy_stationarity(policy, &e.gradient, bound_tol);
    Ok(ExtremalSolution {
        periodic: spec.is_periodic(),
        policy: policy.clone(),
        trajectory,
        diagnostics,
        objective: e.objective,
        convergence: Convergence {
            iterations: 0,
            evaluations: 1,
            stationarity: stat,
            converged: false,
            polished: false,
        },
        residuals,
        gradient: e.gradient,
        normalized_observable: e.normalized_observable.clone().into(),
    })
}

/// Evaluates a given policy without optimizing it: trajectory, costate,
/// diagnostics and residuals, with `converged` left false.
pub fn analyze_policy(spec: &ProblemSpec, policy: &ControlPolicy) -> Result<ExtremalSolution> {
    build_solution(spec, policy, SolverConfig::default().bound_tol)
}

/// Smooth random initial policy: a random level plus three random harmonics
/// per channel, with amplitude capped by the bound range and the drift scale.
pub fn random_policy(
    spec: &ProblemSpec,
    intervals: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ControlPolicy> {
    let model = &spec.model;
    let t = spec.horizon();
    let scale = 2.0 * model.drift_spectral_scale().max(1.0);
    let coeffs: Vec<(f64, f64, Vec<(f64, f64)>)> = model
        .bounds()
        .iter()
        .map(|b| {
            let center = if b.contains(0.0, 0.0) {
                0.0
            } else {
                0.5 * (b.lower + b.upper)
            };
            let amp = (0.5 * b.width()).min(scale);
            let level = rng.random_range(-1.0..1.0);
            let mut modes = vec![(level, 0.0)];
            modes
                .extend((0..3).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            (center, amp, modes)
        })
        .collect();
    ControlPolicy::uniform(0.0, t, intervals, model.bounds(), |k, time| {
        let (center, amp, modes) = &coeffs[k];
        let w = 2.0 * std::f64::consts::PI * time / t;
        let s: f64 = modes
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                if j == 0 {
                    *a
                } else {
                    a * (j as f64 * w).cos() + b * (j as f64 * w).sin()
                }
            })
            .sum();
        center + amp * s / 2.0
    })
}

/// Result of one multi-start run.
#[derive(Debug)]
pub struct StartOutcome {
    pub index: usize,
    /// Seed of a random start; `None` for supplied initial policies.
    pub seed: Option<u64>,
    pub result: Result<ExtremalSolution>,
}

/// Runs the supplied initial policies followed by `random_starts` seeded
/// random ones, concurrently; results come back in start order.
pub fn multistart(
    spec: &ProblemSpec,
    config: &SolverConfig,
    supplied: &[ControlPolicy],
    random_starts: usize,
    seed: u64,
) -> Vec<StartOutcome> {
    let jobs: Vec<(Option<u64>, Result<ControlPolicy>)> = supplied
        .iter()
        .map(|p| (None, Ok(p.clone())))
        .chain((0..random_starts).map(|i| {
            let s = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (Some(s), random_policy(spec, config.intervals, &mut rng))
        }))
        .collect();
    jobs.into_par_iter()
        .enumerate()
        .map(|(index, (seed, p))| StartOutcome {
            index,
            seed,
            result: p.and_then(|p| solve(spec, &p, config)),
        })
        .collect()
}
