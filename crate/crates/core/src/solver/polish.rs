// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Junction refinement of grid solutions.
//!
//! On a fixed grid a switch or a regular/singular junction falls inside an
//! interval whose value is an average, and `K` jumps across it. `∂J/∂tᵢ`
//! for an interior node equals the jump `K(tᵢ−) − K(tᵢ+)`, so splitting such
//! intervals at the junction and maximizing `J` jointly over the junction
//! times and the interior-valued controls drives the Weierstrass–Erdmann
//! jumps, and with a free end `K` itself, to zero.

use super::ascent::{maximize_box, AscentMethod, AscentSettings};
use super::{evaluate, node_gradient, ProblemSpec};
use crate::dynamics::ControlPolicy;
use crate::error::Result;

/// How far a junction may move, as a fraction of the adjacent interval.
const NODE_REACH: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Level {
    Lower,
    Upper,
    Interior,
}

fn level(u: f64, lo: f64, hi: f64, tol: f64) -> Level {
    let slack = tol * (hi - lo);
    if u <= lo + slack {
        Level::Lower
    } else if u >= hi - slack {
        Level::Upper
    } else {
        Level::Interior
    }
}

/// A policy with its junction intervals split, plus which values and nodes
/// the refinement may move.
#[derive(Debug, Clone)]
pub(crate) struct Junctions {
    pub policy: ControlPolicy,
    /// `(channel, interval)` of every interior-valued piece.
    pub free_values: Vec<(usize, usize)>,
    /// Interior nodes across which some channel changes level.
    pub free_nodes: Vec<usize>,
}

/// Splits every interior-valued interval that sits between a bang interval
/// and either the opposite bang or an interior-valued interval into two
/// pieces with the same area, then merges identical neighbours.
pub(crate) fn split_junctions(policy: &ControlPolicy, bound_tol: f64) -> Option<Junctions> {
    let nc = policy.channels();
    let m_int = policy.intervals();
    let bounds = policy.bounds().to_vec();
    let levels: Vec<Vec<Level>> = (0..nc)
        .map(|k| {
            let b = bounds[k];
            policy
                .values(k)
                .iter()
                .map(|&u| level(u, b.lower, b.upper, bound_tol))
                .collect()
        })
        .collect();
    let bang = |k: usize, m: usize| match levels[k][m] {
        Level::Lower => Some(bounds[k].lower),
        Level::Upper => Some(bounds[k].upper),
        Level::Interior => None,
    };
    let mut nodes = vec![policy.start()];
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); nc];
    let mut any_bang = false;
    for m in 0..m_int {
        let (a, b) = (policy.nodes()[m], policy.nodes()[m + 1]);
        // (cut time, channel, value after the cut)
        let mut cuts: Vec<(f64, usize, f64)> = Vec::new();
        let mut base = vec![0.0; nc];
        for k in 0..nc {
            let u = policy.value(k, m);
            base[k] = u;
            if let Some(v) = bang(k, m) {
                base[k] = v;
                any_bang = true;
                continue;
            }
            if m == 0 || m + 1 == m_int {
                continue;
            }
            let (left, right) = (bang(k, m - 1), bang(k, m + 1));
            let (before, after) = match (left, right) {
                (Some(l), Some(r)) if l != r => (l, r),
                (Some(l), None) => (l, policy.value(k, m + 1)),
                (None, Some(r)) => (policy.value(k, m - 1), r),
                _ => continue,
            };
            if before == after {
                continue;
            }
            let frac = (u - after) / (before - after);
            if frac > 0.0 && frac < 1.0 {
                cuts.push((a + frac * (b - a), k, after));
                base[k] = before;
            }
        }
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut current = base;
        for (tau, k, after) in cuts {
            if tau > *nodes.last().unwrap() && tau < b {
                nodes.push(tau);
                for (kk, row) in values.iter_mut().enumerate() {
                    row.push(current[kk]);
                }
            }
            current[k] = after;
        }
        nodes.push(b);
        for (kk, row) in values.iter_mut().enumerate() {
            row.push(current[kk]);
        }
    }
    if !any_bang {
        return None;
    }
    let split = ControlPolicy::new(nodes, values, bounds.clone())
        .ok()?
        .merged();
    let lv = |k: usize, m: usize| {
        let b = bounds[k];
        level(split.value(k, m), b.lower, b.upper, bound_tol)
    };
    let mut free_values = Vec::new();
    for k in 0..nc {
        for m in 0..split.intervals() {
            if lv(k, m) == Level::Interior {
                free_values.push((k, m));
            }
        }
    }
    let free_nodes = (1..split.intervals())
        .filter(|&i| (0..nc).any(|k| lv(k, i - 1) != lv(k, i)))
        .collect();
    Some(Junctions {
        policy: split,
        free_values,
        free_nodes,
    })
}

/// Optimizes the junction times (with `free_end` also the horizon) and the
/// interior-valued controls of a policy with at least one bang interval.
/// `None` when there is nothing to refine or a junction would cross a
/// neighbouring node, i.e. the arc structure would change.
pub(crate) fn polish_junctions(
    spec: &ProblemSpec,
    policy: &ControlPolicy,
    bound_tol: f64,
    free_end: bool,
) -> Result<Option<ControlPolicy>> {
    let Some(j) = split_junctions(policy, bound_tol) else {
        return Ok(None);
    };
    let reduced = j.policy;
    let nodes0 = reduced.nodes().to_vec();
    let m = reduced.intervals();
    let movable: Vec<usize> = j
        .free_nodes
        .iter()
        .copied()
        .chain(free_end.then_some(m))
        .collect();
    if movable.is_empty() && j.free_values.is_empty() {
        return Ok(Some(reduced));
    }
    let nv = j.free_values.len();
    let mut lower: Vec<f64> = j
        .free_values
        .iter()
        .map(|&(k, _)| reduced.bounds()[k].lower)
        .collect();
    let mut upper: Vec<f64> = j
        .free_values
        .iter()
        .map(|&(k, _)| reduced.bounds()[k].upper)
        .collect();
    // Interior values stop at |mean K_u| ≈ 1e-9 scale, junction times at 1e-12 scale.
    let mut weights: Vec<f64> = j
        .free_values
        .iter()
        .map(|&(_, i)| 1e3 * reduced.step(i))
        .collect();
    let mut x0: Vec<f64> = j
        .free_values
        .iter()
        .map(|&(k, i)| reduced.value(k, i))
        .collect();
    for &i in &movable {
        // Boxes of neighbouring movable nodes must not touch.
        lower.push(nodes0[i] - NODE_REACH * (nodes0[i] - nodes0[i - 1]));
        upper.push(if i == m {
            nodes0[m] + 2.0 * (nodes0[m] - nodes0[m - 1])
        } else {
            nodes0[i] + NODE_REACH * (nodes0[i + 1] - nodes0[i])
        });
        weights.push(1.0);
        x0.push(nodes0[i]);
    }
    let build = |x: &[f64]| -> Result<ControlPolicy> {
        let mut nodes = nodes0.clone();
        for (&i, &t) in movable.iter().zip(&x[nv..]) {
            nodes[i] = t;
        }
        let mut p = reduced.with_nodes(nodes)?;
        for (&(k, i), &u) in j.free_values.iter().zip(&x[..nv]) {
            p.set(k, i, u);
        }
        Ok(p)
    };
    let f = |x: &[f64], grad: bool| -> Result<(f64, Vec<f64>)> {
        let p = build(x)?;
        let e = evaluate(spec, &p, grad && nv > 0)?;
        let mut g: Vec<f64> = if nv > 0 && grad {
            j.free_values
                .iter()
                .map(|&(k, i)| e.gradient[k][i])
                .collect()
        } else {
            vec![0.0; nv]
        };
        let ng = node_gradient(&spec.model, &p, &e);
        g.extend(movable.iter().map(|&i| ng[i]));
        Ok((e.objective, g))
    };
    let start = evaluate(spec, &reduced, false)?;
    let scale = start
        .states
        .iter()
        .zip(&start.costates)
        .map(|(r, p)| p.dot(&(spec.model.drift().matrix() * r)).abs())
        .fold(1e-300, f64::max);
    let settings = AscentSettings {
        method: AscentMethod::Lbfgs { memory: 12 },
        max_iterations: 500,
        tolerance: 1e-12 * scale.max(1.0),
        bound_tol: 0.0,
        initial_step: 0.1,
    };
    let out = maximize_box(f, &x0, &lower, &upper, &weights, &settings)?;
    let touching = out.x[nv..]
        .iter()
        .zip(lower[nv..].iter().zip(&upper[nv..]))
        .any(|(x, (lo, hi))| {
            (x - lo).abs() <= 1e-12 * hi.abs().max(1.0)
                || (hi - x).abs() <= 1e-12 * hi.abs().max(1.0)
        });
    if touching || out.value < start.objective - 1e-12 * start.objective.abs().max(1.0) {
        return Ok(None);
    }
    Ok(Some(build(&out.x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::Bounds;

    fn policy(values: &[f64]) -> ControlPolicy {
        let n = values.len();
        let nodes = (0..=n).map(|i| i as f64).collect();
        ControlPolicy::new(nodes, vec![values.to_vec()], vec![Bounds::symmetric(1.0)]).unwrap()
    }

    #[test]
    fn bang_bang_switch_is_split_preserving_area() {
        let p = policy(&[1.0, 1.0, 0.5, -1.0, -1.0]);
        let j = split_junctions(&p, 1e-9).unwrap();
        assert_eq!(j.policy.values(0), &[1.0, -1.0]);
        assert!((j.policy.nodes()[1] - 2.75).abs() < 1e-15);
        assert!(j.free_values.is_empty());
        assert_eq!(j.free_nodes, vec![1]);
        assert!((j.policy.area(0, 0..2) - p.area(0, 0..5)).abs() < 1e-14);
    }

    #[test]
    fn bang_singular_junction_is_split() {
        let p = policy(&[1.0, 0.6, 0.2, 0.2, 0.2]);
        let j = split_junctions(&p, 1e-9).unwrap();
        assert_eq!(j.policy.values(0), &[1.0, 0.2]);
        assert!((j.policy.nodes()[1] - 1.5).abs() < 1e-15);
        assert_eq!(j.free_values, vec![(0, 1)]);
        assert_eq!(j.free_nodes, vec![1]);
    }

    #[test]
    fn policies_without_bang_pieces_are_left_alone() {
        assert!(split_junctions(&policy(&[0.1, 0.2, 0.3]), 1e-9).is_none());
    }
}
