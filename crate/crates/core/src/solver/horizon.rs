// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use super::polish::polish_junctions;
use super::solve::{build_solution, solve};
use super::{ExtremalSolution, ProblemSpec, SolverConfig};
use crate::dynamics::ControlPolicy;
use crate::error::{Error, Result};

/// Inner solutions visited by the outer horizon search.
#[derive(Debug, Clone, Default)]
pub struct HorizonScan {
    pub horizons: Vec<f64>,
    pub objectives: Vec<f64>,
    /// Duration-weighted mean of `K`, i.e. `dJ/dT` with the grid stretched.
    pub mean_pf: Vec<f64>,
}

impl HorizonScan {
    fn record(&mut self, s: &ExtremalSolution) {
        self.horizons.push(s.horizon());
        self.objectives.push(s.objective);
        self.mean_pf.push(s.diagnostics.pf_mean());
    }
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Free final time or free period: coarse scan of `[t_lower, t_upper]`, a
/// root search for `dJ/dT = 0` next to the best interior scan point
/// (golden section on `J` when the derivative does not change sign there),
/// then a joint junction-time and horizon polish that drives `K` to zero.
pub fn optimize_free_horizon(
    spec: &ProblemSpec,
    initial: &ControlPolicy,
    config: &SolverConfig,
    t_lower: f64,
    t_upper: f64,
    scan_points: usize,
) -> Result<(ExtremalSolution, HorizonScan)> {
    if !spec.free_horizon() {
        return Err(Error::Precondition(
            "problem does not have a free horizon".into(),
        ));
    }
    if !(t_lower > 0.0 && t_upper > t_lower) || scan_points < 3 {
        return Err(Error::Parameter(format!(
            "need 0 < t_lower < t_upper and at least 3 scan points (got [{t_lower}, {t_upper}], {scan_points})"
        )));
    }
    let mut scan = HorizonScan::default();
    // Junctions are refined once, on the final horizon.
    let inner_config = SolverConfig {
        polish: false,
        ..config.clone()
    };
    let inner =
        |t: f64, warm: &ControlPolicy, scan: &mut HorizonScan| -> Result<ExtremalSolution> {
            let s = solve(
                &spec.with_horizon(t)?,
                &warm.rescaled(t)?.resampled(initial.intervals())?,
                &inner_config,
            )?;
            scan.record(&s);
            Ok(s)
        };

    let grid: Vec<f64> = (0..scan_points)
        .map(|i| t_lower + (t_upper - t_lower) * i as f64 / (scan_points - 1) as f64)
        .collect();
    let mut sols = Vec::with_capacity(scan_points);
    let mut warm = initial.clone();
    for &t in &grid {
        let s = inner(t, &warm, &mut scan)?;
        warm = s.policy.clone();
        sols.push(s);
    }
    let js: Vec<f64> = sols.iter().map(|s| s.objective).collect();
    let (jmin, jmax) = js
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &j| {
            (a.min(j), b.max(j))
        });
    let best = js
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    let bracket_err = || Error::Bracket {
        lower: t_lower,
        upper: t_upper,
        j_lower: js[0],
        j_upper: js[scan_points - 1],
        best: grid[best],
    };
    if jmax - jmin <= 1e-10 * jmax.abs().max(1.0) || best == 0 || best == scan_points - 1 {
        return Err(bracket_err());
    }

    // dJ/dT changes sign next to the best scan point; Illinois iteration on it.
    let pf: Vec<f64> = sols.iter().map(|s| s.diagnostics.pf_mean()).collect();
    let (lo, hi) = if pf[best] > 0.0 {
        (best, best + 1)
    } else {
        (best - 1, best)
    };
    let mut best_sol = sols.swap_remove(best);
    if pf[lo] > 0.0 && pf[hi] < 0.0 {
        let (mut a, mut fa) = (grid[lo], pf[lo]);
        let (mut b, mut fb) = (grid[hi], pf[hi]);
        let mut side = 0i8;
        let scale = best_sol.residuals.pf_scale.max(1e-300);
        let mut width = b - a;
        for it in 0..40 {
            // Bisect whenever two interpolation steps failed to halve the bracket.
            let t = if it % 2 == 1 && b - a > 0.5 * width {
                0.5 * (a + b)
            } else {
                (a * fb - b * fa) / (fb - fa)
            };
            if it % 2 == 1 {
                width = b - a;
            }
            let s = inner(t, &best_sol.policy, &mut scan)?;
            let k = s.diagnostics.pf_mean();
            if s.objective >= best_sol.objective {
                best_sol = s;
            }
            if k.abs() <= 1e-9 * scale || (b - a) <= 1e-10 * b {
                break;
            }
            if k > 0.0 {
                a = t;
                fa = k;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            } else {
                b = t;
                fb = k;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
        }
    } else {
        // Noisy derivative: golden section on J instead.
        let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
        let mut c = b - (1.0 - GOLDEN) * (b - a);
        let mut d = a + (1.0 - GOLDEN) * (b - a);
        let mut sc = inner(c, &best_sol.policy, &mut scan)?;
        let mut sd = inner(d, &best_sol.policy, &mut scan)?;
        for _ in 0..40 {
            if (b - a) <= 1e-6 * b {
                break;
            }
            if sc.objective >= sd.objective {
                b = d;
                d = c;
                sd = sc;
                c = b - (1.0 - GOLDEN) * (b - a);
                sc = inner(c, &sd.policy, &mut scan)?;
            } else {
                a = c;
                c = d;
                sc = sd;
                d = a + (1.0 - GOLDEN) * (b - a);
                sd = inner(d, &sc.policy, &mut scan)?;
            }
        }
        for s in [sc, sd] {
            if s.objective > best_sol.objective {
                best_sol = s;
            }
        }
    }

    if config.polish {
        let t = best_sol.horizon();
        let spec_t = spec.with_horizon(t)?;
        if let Some(p) = polish_junctions(&spec_t, &best_sol.policy, config.bound_tol, true)? {
            let t_new = p.duration();
            let spec_new = spec.with_horizon(t_new)?;
            let p = p.subdivided(t_new / initial.intervals() as f64)?;
            let mut s = build_solution(&spec_new, &p, config.bound_tol)?;
            if s.objective >= best_sol.objective - 1e-12 * best_sol.objective.abs().max(1.0) {
                s.convergence.iterations = best_sol.convergence.iterations;
                s.convergence.evaluations = best_sol.convergence.evaluations;
                s.convergence.converged = s.convergence.stationarity <= config.gradient_tol;
                s.convergence.polished = true;
                scan.record(&s);
                best_sol = s;
            }
        }
    }
    Ok((best_sol, scan))
}
