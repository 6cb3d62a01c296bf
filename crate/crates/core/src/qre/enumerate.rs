// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Exhaustive search over bang-bang schedules with switches on a uniform grid.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::sequence::{ChannelSchedule, SwitchSequence};
use crate::error::{Error, Result};
use crate::solver::{fixed_point_of, BoundaryMode, ProblemSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct BangBangSearch {
    /// Most switches per channel.
    pub max_switches: usize,
    /// Number of grid cells; switches sit on the interior grid points.
    pub grid: usize,
    /// Largest number of candidates enumerated.
    pub cap: u128,
    /// Keep the objective of every candidate.
    pub keep_table: bool,
}

impl Default for BangBangSearch {
    fn default() -> Self {
        Self {
            max_switches: 2,
            grid: 64,
            cap: 1_000_000,
            keep_table: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BangBangResult {
    pub best: SwitchSequence,
    pub objective: f64,
    pub best_index: u64,
    pub candidates: u64,
    /// Objective per candidate index when requested; `−∞` where the
    /// periodic fixed point does not exist.
    pub table: Option<Vec<f64>>,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Candidates of one channel: (starts at the upper bound, switch cells).
/// Ordered by switch count, then start level (lower first), then positions.
fn channel_candidates(max_switches: usize, grid: usize, fixed: bool) -> Vec<(bool, Vec<usize>)> {
    if fixed {
        return vec![(false, Vec::new())];
    }
    let mut out = Vec::new();
    for s in 0..=max_switches.min(grid - 1) {
        for upper in [false, true] {
            let mut pos: Vec<usize> = (1..=s).collect();
            loop {
                out.push((upper, pos.clone()));
                // Next s-combination of 1..grid-1 in lexicographic order.
                let Some(i) = (0..s).rev().find(|&i| pos[i] < grid - s + i) else {
                    break;
                };
                pos[i] += 1;
                for j in i + 1..s {
                    pos[j] = pos[j - 1] + 1;
                }
            }
        }
    }
    out
}

fn channel_count(max_switches: usize, grid: usize, fixed: bool) -> u128 {
    if fixed {
        return 1;
    }
    (0..=max_switches.min(grid - 1) as u128)
        .map(|s| 2 * binomial(grid as u128 - 1, s))
        .sum()
}

/// Enumerates every bang-bang schedule with at most `max_switches` switches
/// per channel on the grid and returns the best one. Ties go to the lowest
/// candidate index. Channels with zero-width bounds stay constant.
pub fn brute_force_bangbang(spec: &ProblemSpec, search: &BangBangSearch) -> Result<BangBangResult> {
    if search.grid < 1 {
        return Err(Error::Parameter(
            "switch grid needs at least one cell".into(),
        ));
    }
    let model = &spec.model;
    let nc = model.num_controls();
    let bounds = model.bounds();
    let fixed: Vec<bool> = bounds.iter().map(|b| b.width() == 0.0).collect();
    let count = fixed
        .iter()
        .map(|&f| channel_count(search.max_switches, search.grid, f))
        .try_fold(1u128, |acc, c| acc.checked_mul(c))
        .unwrap_or(u128::MAX);
    if count > search.cap {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: search.cap,
        });
    }
    let lists: Vec<Vec<(bool, Vec<usize>)>> = fixed
        .iter()
        .map(|&f| channel_candidates(search.max_switches, search.grid, f))
        .collect();
    let (t0, t1) = (0.0, spec.horizon());
    let h = (t1 - t0) / search.grid as f64;
    // Propagator of each level combination (bit k set: channel k at its
    // upper bound) over every run length.
    let combos = 1usize << nc;
    let props: Vec<Vec<DMatrix<f64>>> = (0..combos)
        .map(|c| {
            let u: Vec<f64> = (0..nc)
                .map(|k| {
                    if c >> k & 1 == 1 {
                        bounds[k].upper
                    } else {
                        bounds[k].lower
                    }
                })
                .collect();
            let g = model.generator(&u);
            (0..=search.grid)
                .map(|len| (&g * (h * len as f64)).exp())
                .collect()
        })
        .collect();
    let o = model.observable().coeffs();
    let dim = model.basis().dim();
    let decode = |mut index: u64| -> Vec<usize> {
        let mut picks = vec![0; nc];
        for k in (0..nc).rev() {
            let n = lists[k].len() as u64;
            picks[k] = (index % n) as usize;
            index /= n;
        }
        picks
    };
    let score = |index: u64| -> f64 {
        let picks = decode(index);
        let cand: Vec<&(bool, Vec<usize>)> = (0..nc).map(|k| &lists[k][picks[k]]).collect();
        let mut cuts: Vec<usize> = cand.iter().flat_map(|c| c.1.iter().copied()).collect();
        cuts.push(search.grid);
        cuts.sort_unstable();
        cuts.dedup();
        let mut pieces = Vec::with_capacity(cuts.len());
        let mut prev = 0;
        for &cut in &cuts {
            let mut combo = 0;
            for (k, c) in cand.iter().enumerate() {
                let flips = c.1.partition_point(|&p| p <= prev);
                if c.0 ^ (flips % 2 == 1) {
                    combo |= 1 << k;
                }
            }
            pieces.push(&props[combo][cut - prev]);
            prev = cut;
        }
        match &spec.mode {
            BoundaryMode::Terminal { initial, .. } => {
                let mut v: DVector<f64> = initial.coeffs().clone();
                for p in &pieces {
                    v = *p * v;
                }
                o.dot(&v)
            }
            BoundaryMode::Periodic { .. } => {
                let mut p = DMatrix::identity(o.len(), o.len());
                for q in &pieces {
                    p = *q * p;
                }
                fixed_point_of(&p, dim).map_or(f64::NEG_INFINITY, |r| o.dot(&r))
            }
        }
    };
    let total = count as u64;
    let better = |a: (u64, f64), b: (u64, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) || a.1.is_nan() {
            b
        } else {
            a
        }
    };
    let (table, (best_index, objective)) = if search.keep_table {
        let table: Vec<f64> = (0..total).into_par_iter().map(score).collect();
        let best = table
            .iter()
            .enumerate()
            .fold((0, f64::NAN), |a, (i, &j)| better(a, (i as u64, j)));
        (Some(table), best)
    } else {
        let best = (0..total)
            .into_par_iter()
            .map(|i| (i, score(i)))
            .reduce(|| (u64::MAX, f64::NAN), better);
        (None, best)
    };
    if !objective.is_finite() {
        return Err(Error::NumericalRank(
            "no candidate schedule has a finite objective".into(),
        ));
    }
    let picks = decode(best_index);
    let channels = (0..nc)
        .map(|k| {
            let (upper, pos) = &lists[k][picks[k]];
            let b = bounds[k];
            let values = (0..=pos.len())
                .map(|i| {
                    if *upper ^ (i % 2 == 1) {
                        b.upper
                    } else {
                        b.lower
                    }
                })
                .collect();
            ChannelSchedule {
                switch_times: pos.iter().map(|&p| t0 + p as f64 * h).collect(),
                values,
            }
        })
        .collect();
    Ok(BangBangResult {
        best: SwitchSequence::new(t0, t1, channels)?,
        objective,
        best_index,
        candidates: total,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_lists_match_counts() {
        for (s, g) in [(0, 5), (1, 5), (2, 7), (3, 6), (4, 3)] {
            let list = channel_candidates(s, g, false);
            assert_eq!(list.len() as u128, channel_count(s, g, false), "{s} {g}");
            let mut sorted = list.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), list.len());
            assert!(list
                .iter()
                .all(|(_, p)| p.windows(2).all(|w| w[0] < w[1])
                    && p.iter().all(|&x| x >= 1 && x < g)));
        }
        assert_eq!(channel_candidates(3, 8, true), vec![(false, vec![])]);
    }
}
