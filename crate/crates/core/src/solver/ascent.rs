// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Box-constrained ascent: projected gradient with an optional limited-memory
//! quasi-Newton direction on the free variables.

use std::collections::VecDeque;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AscentMethod {
    /// Projected gradient with backtracking line search.
    ProjectedGradient,
    /// Projected L-BFGS with `memory` correction pairs.
    Lbfgs { memory: usize },
}

impl Default for AscentMethod {
    fn default() -> Self {
        Self::Lbfgs { memory: 12 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AscentSettings {
    pub method: AscentMethod,
    pub max_iterations: usize,
    /// Stop when the weighted feasible-ascent gradient falls below this.
    pub tolerance: f64,
    /// Variables within `bound_tol · width` of a bound count as active.
    pub bound_tol: f64,
    /// First trial step as a fraction of the largest box width.
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct AscentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub stationarity: f64,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;
const STALL_ITERATIONS: usize = 25;

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// True when ascent along coordinate `i` is blocked by a bound.
fn blocked(x: f64, g: f64, lo: f64, hi: f64, tol: f64) -> bool {
    let slack = tol * (hi - lo);
    (g > 0.0 && x >= hi - slack) || (g < 0.0 && x <= lo + slack)
}

/// Largest `|gᵢ|/wᵢ` over coordinates whose ascent is not blocked by a bound.
pub(crate) fn stationarity(
    x: &[f64],
    g: &[f64],
    weights: &[f64],
    lower: &[f64],
    upper: &[f64],
    bound_tol: f64,
) -> f64 {
    (0..x.len())
        .filter(|&i| !blocked(x[i], g[i], lower[i], upper[i], bound_tol))
        .map(|i| (g[i] / weights[i]).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `f` over the box `[lower, upper]`.
///
/// `f(x, true)` returns the value and gradient, `f(x, false)` may return an
/// empty gradient. `weights` rescale gradient components for the stopping test.
pub(crate) fn maximize_box(
    mut f: impl FnMut(&[f64], bool) -> Result<(f64, Vec<f64>)>,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    weights: &[f64],
    settings: &AscentSettings,
) -> Result<AscentOutcome> {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let (mut value, mut g) = f(&x, true)?;
    let mut evaluations = 1;
    let width = (0..n).map(|i| upper[i] - lower[i]).fold(0.0, f64::max);
    let memory = match settings.method {
        AscentMethod::Lbfgs { memory } => memory,
        AscentMethod::ProjectedGradient => 0,
    };
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut pg_step = settings.initial_step * width;
    let mut stall = 0;
    let mut iterations = 0;
    let mut stat = stationarity(&x, &g, weights, lower, upper, settings.bound_tol);

    while iterations < settings.max_iterations && stat > settings.tolerance && n > 0 {
        iterations += 1;
        let free: Vec<bool> = (0..n)
            .map(|i| !blocked(x[i], g[i], lower[i], upper[i], settings.bound_tol))
            .collect();
        let mut accepted = None;
        for attempt in 0..2 {
            let quasi_newton = attempt == 0 && !pairs.is_empty();
            let mut d: Vec<f64> = (0..n).map(|i| if free[i] { g[i] } else { 0.0 }).collect();
            if quasi_newton {
                // Two-loop recursion for the ascent direction H·g.
                let mut alpha = Vec::with_capacity(pairs.len());
                for (s, y, rho) in pairs.iter().rev() {
                    let a = rho * dot(s, &d);
                    for i in 0..n {
                        d[i] -= a * y[i];
                    }
                    alpha.push(a);
                }
                let (s, y, _) = pairs.back().unwrap();
                let gamma = dot(s, y) / dot(y, y);
                d.iter_mut().for_each(|v| *v *= gamma);
                for ((s, y, rho), a) in pairs.iter().zip(alpha.iter().rev()) {
                    let b = rho * dot(y, &d);
                    for i in 0..n {
                        d[i] += (a - b) * s[i];
                    }
                }
                for i in 0..n {
                    if !free[i] {
                        d[i] = 0.0;
                    }
                }
                if dot(&d, &g) <= 0.0 {
                    pairs.clear();
                    continue;
                }
            }
            let dmax = d.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
            if dmax == 0.0 {
                break;
            }
            let mut step = if quasi_newton { 1.0 } else { pg_step / dmax };
            let noise = 16.0 * f64::EPSILON * value.abs().max(1.0);
            for _ in 0..MAX_BACKTRACKS {
                let mut trial: Vec<f64> = (0..n).map(|i| x[i] + step * d[i]).collect();
                project(&mut trial, lower, upper);
                let moved: Vec<f64> = (0..n).map(|i| trial[i] - x[i]).collect();
                let predicted = dot(&g, &moved);
                if predicted <= 0.0 {
                    step *= 0.5;
                    continue;
                }
                let (v, _) = f(&trial, false)?;
                evaluations += 1;
                if v.is_finite() && v > value + noise && v >= value + ARMIJO * predicted {
                    accepted = Some((trial, v, step, dmax, None));
                    break;
                }
                if v.is_finite() && v >= value - noise {
                    // Gain below round-off: accept if the slope along the
                    // step is still non-negative at the trial point.
                    let (vg, gt) = f(&trial, true)?;
                    evaluations += 1;
                    if dot(&gt, &moved) >= 0.0 {
                        accepted = Some((trial, vg, step, dmax, Some(gt)));
                        break;
                    }
                }
                step *= 0.5;
            }
            if accepted.is_some() {
                if !quasi_newton {
                    let (_, _, s, dm, _) = accepted.as_ref().unwrap();
                    pg_step = (2.0 * s * dm)
                        .min(settings.initial_step * width)
                        .max(1e-300);
                }
                break;
            }
            pairs.clear();
            if !quasi_newton {
                break;
            }
        }
        let Some((x_new, v_new, _, _, g_known)) = accepted else {
            break;
        };
        let (v_check, g_new) = match g_known {
            Some(g) => (v_new, g),
            None => {
                evaluations += 1;
                f(&x_new, true)?
            }
        };
        debug_assert!((v_check - v_new).abs() <= 1e-9 * v_new.abs().max(1.0));
        if memory > 0 {
            // Curvature pair for the minimization of −f.
            let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
            let y: Vec<f64> = (0..n).map(|i| g[i] - g_new[i]).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                pairs.push_back((s, y, 1.0 / sy));
                if pairs.len() > memory {
                    pairs.pop_front();
                }
            }
        }
        let stat_new = stationarity(&x_new, &g_new, weights, lower, upper, settings.bound_tol);
        if v_new - value <= 1e-15 * value.abs().max(1.0) && stat_new >= 0.9 * stat {
            stall += 1;
        } else {
            stall = 0;
        }
        x = x_new;
        value = v_check;
        g = g_new;
        stat = stat_new;
        if stall >= STALL_ITERATIONS {
            break;
        }
    }
    Ok(AscentOutcome {
        x,
        value,
        iterations,
        evaluations,
        stationarity: stat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(method: AscentMethod) -> AscentSettings {
        AscentSettings {
            method,
            max_iterations: 5000,
            tolerance: 1e-9,
            bound_tol: 1e-9,
            initial_step: 0.1,
        }
    }

    /// Concave quadratic with its maximizer outside the box in two coordinates.
    fn quad(x: &[f64], _: bool) -> Result<(f64, Vec<f64>)> {
        let c = [0.3, 2.0, -3.0, -0.1];
        let a = [1.0, 4.0, 0.5, 10.0];
        let v = -(0..4).map(|i| a[i] * (x[i] - c[i]).powi(2)).sum::<f64>();
        let g = (0..4).map(|i| -2.0 * a[i] * (x[i] - c[i])).collect();
        Ok((v, g))
    }

    #[test]
    fn box_constrained_quadratic() {
        for method in [AscentMethod::ProjectedGradient, AscentMethod::default()] {
            let lo = [-1.0; 4];
            let hi = [1.0; 4];
            let out =
                maximize_box(quad, &[0.0; 4], &lo, &hi, &[1.0; 4], &settings(method)).unwrap();
            assert!(out.stationarity <= 1e-9, "{method:?} {out:?}");
            let expect = [0.3, 1.0, -1.0, -0.1];
            for i in 0..4 {
                assert!(
                    (out.x[i] - expect[i]).abs() < 1e-8,
                    "{method:?} {i}: {}",
                    out.x[i]
                );
            }
        }
    }

    #[test]
    fn quasi_newton_needs_fewer_iterations_on_ill_conditioned_problems() {
        let a: Vec<f64> = (0..20).map(|i| 10f64.powf(i as f64 / 6.0)).collect();
        let f = |x: &[f64], _: bool| -> Result<(f64, Vec<f64>)> {
            let v = -(0..20).map(|i| a[i] * (x[i] - 0.1).powi(2)).sum::<f64>();
            Ok((v, (0..20).map(|i| -2.0 * a[i] * (x[i] - 0.1)).collect()))
        };
        let lo = vec![-1.0; 20];
        let hi = vec![1.0; 20];
        let w = vec![1.0; 20];
        let pg = maximize_box(
            f,
            &[0.5; 20],
            &lo,
            &hi,
            &w,
            &settings(AscentMethod::ProjectedGradient),
        )
        .unwrap();
        let qn = maximize_box(
            f,
            &[0.5; 20],
            &lo,
            &hi,
            &w,
            &settings(AscentMethod::default()),
        )
        .unwrap();
        assert!(qn.stationarity <= 1e-9);
        assert!(qn.iterations < pg.iterations);
    }

    #[test]
    fn values_never_decrease() {
        let mut seen = Vec::new();
        let f = |x: &[f64], _: bool| -> Result<(f64, Vec<f64>)> {
            // Rosenbrock, negated.
            let (a, b) = (x[0], x[1]);
            let v = -((1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2));
            let g = vec![
                2.0 * (1.0 - a) + 400.0 * a * (b - a * a),
                -200.0 * (b - a * a),
            ];
            Ok((v, g))
        };
        let wrapped = |x: &[f64], grad: bool| {
            let r = f(x, grad);
            if grad {
                seen.push(r.as_ref().unwrap().0);
            }
            r
        };
        let out = maximize_box(
            wrapped,
            &[-1.2, 1.0],
            &[-2.0; 2],
            &[2.0; 2],
            &[1.0; 2],
            &settings(AscentMethod::default()),
        )
        .unwrap();
        assert!(seen.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] - 1.0).abs() < 1e-5);
    }
}
