// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::{brute_force_bangbang, BangBangResult, BangBangSearch};
use super::screen::{collision_chain, controllability_screen, ChainTerm, ControllabilityScreen};
use crate::arcs::{classify_arcs, ArcLabel, ArcTolerances, Verdict};
use crate::dynamics::ControlPolicy;
use crate::error::{Error, Result};
use crate::solver::{multistart, objective, ExtremalSolution, ProblemSpec, SolverConfig};

/// Depth of the collision derivative chain reported on singular windows.
pub const CHAIN_DEPTH: usize = 5;

/// Fraction of the horizon on which every channel sits within
/// `bound_tol·width` of one of its bounds.
pub fn bang_fraction(policy: &ControlPolicy, bound_tol: f64) -> f64 {
    let total = policy.duration();
    (0..policy.channels())
        .map(|k| {
            let b = policy.bounds()[k];
            let slack = bound_tol * b.width();
            (0..policy.intervals())
                .filter(|&m| {
                    let u = policy.value(k, m);
                    u >= b.upper - slack || u <= b.lower + slack
                })
                .map(|m| policy.step(m))
                .sum::<f64>()
                / total
        })
        .fold(1.0, f64::min)
}

/// Largest `|J[u + δu] − J[u]|` over `count` random perturbations of channel
/// `k` supported on `window`, each `δuₘ` uniform in `±amplitude·width` and
/// clipped to the bounds.
pub fn perturbation_invariance(
    spec: &ProblemSpec,
    policy: &ControlPolicy,
    k: usize,
    window: Range<usize>,
    amplitude: f64,
    count: usize,
    seed: u64,
) -> Result<f64> {
    let base = objective(spec, policy)?;
    let b = policy.bounds()[k];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let mut p = policy.clone();
        for m in window.clone() {
            let du = amplitude * b.width() * rng.random_range(-1.0..=1.0);
            p.set(k, m, b.clamp(policy.value(k, m) + du));
        }
        worst = worst.max((objective(spec, &p)? - base).abs());
    }
    Ok(worst)
}

fn best_converged(
    spec: &ProblemSpec,
    config: &SolverConfig,
    starts: usize,
    seed: u64,
) -> (usize, Vec<ExtremalSolution>) {
    let outcomes = multistart(spec, config, &[], starts, seed);
    let mut converged: Vec<ExtremalSolution> = outcomes
        .into_iter()
        .filter_map(|o| o.result.ok())
        .filter(|s| s.convergence.converged)
        .collect();
    converged.sort_by(|a, b| b.objective.total_cmp(&a.objective));
    (starts, converged)
}

#[derive(Debug, Clone)]
pub struct Theorem3Settings {
    pub starts: usize,
    pub seed: u64,
    pub search: BangBangSearch,
    /// Required fraction of the horizon at a bound.
    pub min_bang_fraction: f64,
    /// Allowed relative shortfall of the solver against the oracle.
    pub match_tol: f64,
}

impl Default for Theorem3Settings {
    fn default() -> Self {
        Self {
            starts: 4,
            seed: 0,
            search: BangBangSearch::default(),
            min_bang_fraction: 0.99,
            match_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Theorem3Report {
    pub verdict: Verdict,
    pub evidence: String,
    pub screen: ControllabilityScreen,
    pub oracle: BangBangResult,
    pub starts: usize,
    /// Converged solutions, best first.
    pub solutions: Vec<ExtremalSolution>,
    pub bang_fractions: Vec<f64>,
    /// `(J_oracle − J_solver) / |J_oracle|`; negative when the solver is better.
    pub relative_gap: f64,
}

/// Checks that every converged extremal of an all-collision problem is
/// bang-bang and that the best of them reaches the switch-grid oracle.
pub fn verify_theorem3(
    spec: &ProblemSpec,
    config: &SolverConfig,
    settings: &Theorem3Settings,
) -> Result<Theorem3Report> {
    let model = &spec.model;
    if model.channels().iter().any(|c| !c.is_collision()) {
        return Err(Error::Precondition(
            "every channel must be of collision type".into(),
        ));
    }
    let screen = controllability_screen(model)?;
    let oracle = brute_force_bangbang(spec, &settings.search)?;
    let (starts, solutions) = best_converged(spec, config, settings.starts, settings.seed);
    let bang_fractions: Vec<f64> = solutions
        .iter()
        .map(|s| bang_fraction(&s.policy, config.bound_tol))
        .collect();
    let j_oracle = oracle.objective;
    let relative_gap = solutions.first().map_or(f64::INFINITY, |s| {
        (j_oracle - s.objective) / j_oracle.abs().max(f64::MIN_POSITIVE)
    });
    let all_bang = bang_fractions
        .iter()
        .all(|&f| f >= settings.min_bang_fraction);
    let reaches = relative_gap <= settings.match_tol;
    let min_fraction = bang_fractions.iter().copied().fold(1.0, f64::min);
    let summary = format!(
        "{} of {starts} starts converged; min bang fraction {min_fraction:.6}; J_solver - J_oracle = {:.3e} relative; Krylov rank {}/{}",
        solutions.len(),
        -relative_gap,
        screen.rank,
        screen.dimension
    );
    let verdict = if !solutions.is_empty() && all_bang && reaches {
        Verdict::Pass
    } else if !screen.is_full() {
        Verdict::NotApplicable
    } else {
        Verdict::Fail
    };
    Ok(Theorem3Report {
        verdict,
        evidence: summary,
        screen,
        oracle,
        starts,
        solutions,
        bang_fractions,
        relative_gap,
    })
}

#[derive(Debug, Clone)]
pub struct Theorem4Settings {
    pub starts: usize,
    pub seed: u64,
    pub perturbations: usize,
    /// Perturbation size as a fraction of the bound width.
    pub amplitude: f64,
    pub invariance_tol: f64,
    pub tolerances: ArcTolerances,
}

impl Default for Theorem4Settings {
    fn default() -> Self {
        Self {
            starts: 4,
            seed: 0,
            perturbations: 20,
            amplitude: 0.5,
            invariance_tol: 1e-8,
            tolerances: ArcTolerances::default(),
        }
    }
}

/// A stretch of the collision control that is not regular.
#[derive(Debug, Clone)]
pub struct WindowCheck {
    pub start: f64,
    pub end: f64,
    pub intervals: Range<usize>,
    pub label: ArcLabel,
    pub max_delta_j: f64,
    /// Collision chain at the first node of the window.
    pub chain: Vec<ChainTerm>,
}

impl WindowCheck {
    /// Largest `|⟨ψ|𝕃_cⁿ|ρₖ⟩| / scale` over the chain.
    pub fn max_relative_chain(&self) -> f64 {
        self.chain
            .iter()
            .map(|t| t.value.abs() / t.scale.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Theorem4Report {
    pub verdict: Verdict,
    pub evidence: String,
    pub channel: usize,
    pub screen: ControllabilityScreen,
    pub solution: Option<ExtremalSolution>,
    /// Arc labels of the collision channel, in time order.
    pub labels: Vec<(f64, f64, ArcLabel)>,
    pub windows: Vec<WindowCheck>,
}

/// Non-regular windows of channel `k` with their perturbation and chain checks.
pub fn irregular_windows(
    spec: &ProblemSpec,
    solution: &ExtremalSolution,
    k: usize,
    settings: &Theorem4Settings,
) -> Result<Vec<WindowCheck>> {
    let seg = classify_arcs(&spec.model, solution, &settings.tolerances);
    seg.channel_segments(k)
        .filter(|s| !s.label.is_regular())
        .enumerate()
        .map(|(i, s)| {
            let max_delta_j = perturbation_invariance(
                spec,
                &solution.policy,
                k,
                s.intervals.clone(),
                settings.amplitude,
                settings.perturbations,
                settings.seed.wrapping_add(i as u64),
            )?;
            let node = s.intervals.start;
            let chain = collision_chain(
                &spec.model,
                &solution.costates()[node],
                &solution.policy.at(node),
                k,
                CHAIN_DEPTH,
            )?;
            Ok(WindowCheck {
                start: s.start,
                end: s.end,
                intervals: s.intervals.clone(),
                label: s.label,
                max_delta_j,
                chain,
            })
        })
        .collect()
}

/// Checks that collision channel `k` of a mixed problem is bang-bang except
/// on windows where it does not influence `J`.
pub fn verify_theorem4(
    spec: &ProblemSpec,
    k: usize,
    config: &SolverConfig,
    settings: &Theorem4Settings,
) -> Result<Theorem4Report> {
    let model = &spec.model;
    if k >= model.num_controls() || !model.channel(k).is_collision() {
        return Err(Error::Precondition(format!(
            "channel {k} is not a collision channel"
        )));
    }
    let screen = controllability_screen(model)?;
    let (starts, solutions) = best_converged(spec, config, settings.starts, settings.seed);
    let Some(best) = solutions.into_iter().next() else {
        let verdict = if screen.is_full() {
            Verdict::Fail
        } else {
            Verdict::NotApplicable
        };
        return Ok(Theorem4Report {
            verdict,
            evidence: format!("none of {starts} starts converged"),
            channel: k,
            screen,
            solution: None,
            labels: Vec::new(),
            windows: Vec::new(),
        });
    };
    let seg = classify_arcs(model, &best, &settings.tolerances);
    let labels = seg
        .channel_segments(k)
        .map(|s| (s.start, s.end, s.label))
        .collect();
    let windows = irregular_windows(spec, &best, k, settings)?;
    let worst = windows.iter().map(|w| w.max_delta_j).fold(0.0, f64::max);
    let invariant = windows
        .iter()
        .all(|w| w.max_delta_j < settings.invariance_tol);
    let name = &model.channel(k).name;
    let evidence = if windows.is_empty() {
        format!(
            "collision channel {name:?} is bang-bang (J = {:.12})",
            best.objective
        )
    } else {
        format!(
            "{} non-regular windows on channel {name:?}; max |dJ| over {} perturbations = {worst:.3e}",
            windows.len(),
            settings.perturbations
        )
    };
    let verdict = if invariant {
        Verdict::Pass
    } else if !screen.is_full() {
        Verdict::NotApplicable
    } else {
        Verdict::Fail
    };
    Ok(Theorem4Report {
        verdict,
        evidence,
        channel: k,
        screen,
        solution: Some(best),
        labels,
        windows,
    })
}
