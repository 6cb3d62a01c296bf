// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::branch::{branch_order, BranchOrder};
use crate::liouville::QuantumModel;
use crate::solver::ExtremalSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcLabel {
    /// Pinned to the upper bound with `K_u ≥ 0`.
    RegularMax,
    /// Pinned to the lower bound with `K_u ≤ 0`.
    RegularMin,
    /// `K_u` vanishes over a run of intervals.
    Singular,
    /// Fails both tests.
    Ambiguous,
}

impl ArcLabel {
    pub fn is_regular(self) -> bool {
        matches!(self, Self::RegularMax | Self::RegularMin)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::RegularMax => "regular-max",
            Self::RegularMin => "regular-min",
            Self::Singular => "singular",
            Self::Ambiguous => "ambiguous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::RegularMax,
            Self::RegularMin,
            Self::Singular,
            Self::Ambiguous,
        ]
        .into_iter()
        .find(|l| l.as_str() == s)
    }
}

impl fmt::Display for ArcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcTolerances {
    /// Distance to a bound, relative to the bound width, that counts as pinned.
    pub eps_u: f64,
    /// `|K_u|` relative to `max |K_u|` that counts as vanishing.
    pub eps_k: f64,
    /// Shortest run of vanishing `K_u` labelled singular.
    pub min_run: usize,
    /// Relative threshold for the branch-point commutator conditions.
    pub branch_tol: f64,
}

impl Default for ArcTolerances {
    fn default() -> Self {
        Self {
            eps_u: 1e-6,
            eps_k: 1e-5,
            min_run: 3,
            branch_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcSegment {
    pub channel: usize,
    pub start: f64,
    pub end: f64,
    pub label: ArcLabel,
    /// Grid intervals overlapping the segment.
    pub intervals: std::ops::Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JunctionKind {
    Corner,
    RegularToSingular,
    SingularToRegular,
    /// Between two singular arcs.
    SingularToSingular,
    /// Next to an ambiguous stretch.
    Unresolved,
}

impl JunctionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Corner => "corner",
            Self::RegularToSingular => "regular-to-singular",
            Self::SingularToRegular => "singular-to-regular",
            Self::SingularToSingular => "singular-to-singular",
            Self::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub channel: usize,
    pub time: f64,
    pub kind: JunctionKind,
    /// Grid node at (or nearest to) the junction.
    pub node: usize,
    /// Whether the junction lies on a grid node rather than inside an interval.
    pub on_node: bool,
    /// Set when the singular-control denominator vanishes there.
    pub branch: Option<BranchOrder>,
}

/// Regular/singular partition of every control channel over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSegmentation {
    pub segments: Vec<ArcSegment>,
    pub junctions: Vec<Junction>,
    /// `(channel, interval)` pairs that fit no label.
    pub ambiguous: Vec<(usize, usize)>,
}

impl ArcSegmentation {
    pub fn is_ambiguous(&self) -> bool {
        !self.ambiguous.is_empty()
    }

    pub fn channel_segments(&self, k: usize) -> impl Iterator<Item = &ArcSegment> {
        self.segments.iter().filter(move |s| s.channel == k)
    }

    pub fn first(&self, k: usize) -> Option<&ArcSegment> {
        self.channel_segments(k).next()
    }

    pub fn last(&self, k: usize) -> Option<&ArcSegment> {
        self.channel_segments(k).last()
    }

    pub fn singular_segments(&self) -> impl Iterator<Item = &ArcSegment> {
        self.segments
            .iter()
            .filter(|s| s.label == ArcLabel::Singular)
    }
}

/// Interval labels of one channel from its values and interval-mean `K_u`.
pub(crate) fn label_intervals(
    values: &[f64],
    ku: &[f64],
    lower: f64,
    upper: f64,
    tol: &ArcTolerances,
) -> Vec<ArcLabel> {
    let n = values.len();
    let scale = ku.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    let k_tol = tol.eps_k * scale;
    let slack = tol.eps_u * (upper - lower);
    let small: Vec<bool> = ku.iter().map(|x| x.abs() <= k_tol).collect();
    let mut labels: Vec<ArcLabel> = (0..n)
        .map(|m| {
            if values[m] >= upper - slack && ku[m] >= -k_tol {
                ArcLabel::RegularMax
            } else if values[m] <= lower + slack && ku[m] <= k_tol {
                ArcLabel::RegularMin
            } else {
                ArcLabel::Ambiguous
            }
        })
        .collect();
    let mut m = 0;
    while m < n {
        if !small[m] {
            m += 1;
            continue;
        }
        let start = m;
        while m < n && small[m] {
            m += 1;
        }
        if m - start >= tol.min_run {
            labels[start..m]
                .iter_mut()
                .for_each(|l| *l = ArcLabel::Singular);
        }
    }
    labels
}

/// Value a label implies next to a switch cell.
fn side_value(label: ArcLabel, u: f64, lower: f64, upper: f64) -> Option<f64> {
    match label {
        ArcLabel::RegularMax => Some(upper),
        ArcLabel::RegularMin => Some(lower),
        ArcLabel::Singular => Some(u),
        ArcLabel::Ambiguous => None,
    }
}

fn junction_kind(left: ArcLabel, right: ArcLabel) -> JunctionKind {
    use ArcLabel::*;
    match (left, right) {
        (Ambiguous, _) | (_, Ambiguous) => JunctionKind::Unresolved,
        (Singular, Singular) => JunctionKind::SingularToSingular,
        (Singular, _) => JunctionKind::SingularToRegular,
        (_, Singular) => JunctionKind::RegularToSingular,
        _ => JunctionKind::Corner,
    }
}

/// Labels every interval of every channel and groups them into arcs.
///
/// An interval is regular when its control sits within `eps_u` of a bound
/// and the interval-mean switching function has the matching sign, singular
/// when `|K_u| ≤ eps_k·max|K_u|` over at least `min_run` consecutive
/// intervals. A single unlabelled interval between two different arcs is a
/// junction cell and is split where the two side values reproduce its area;
/// any other unlabelled interval is reported as ambiguous.
pub fn classify_arcs(
    model: &QuantumModel,
    solution: &ExtremalSolution,
    tol: &ArcTolerances,
) -> ArcSegmentation {
    let policy = &solution.policy;
    let diag = &solution.diagnostics;
    let nodes = policy.nodes();
    let m_int = policy.intervals();
    let mut out = ArcSegmentation {
        segments: Vec::new(),
        junctions: Vec::new(),
        ambiguous: Vec::new(),
    };
    for k in 0..policy.channels() {
        let b = policy.bounds()[k];
        let values = policy.values(k);
        let ku: Vec<f64> = (0..m_int).map(|m| diag.switching_on(k, m)).collect();
        let mut labels = label_intervals(values, &ku, b.lower, b.upper, tol);
        // Junction cells: (interval, cut time).
        let mut cells: Vec<(usize, f64)> = Vec::new();
        for m in 1..m_int.saturating_sub(1) {
            let (l, r) = (labels[m - 1], labels[m + 1]);
            if labels[m] != ArcLabel::Ambiguous || l == r {
                continue;
            }
            let (Some(before), Some(after)) = (
                side_value(l, values[m - 1], b.lower, b.upper),
                side_value(r, values[m + 1], b.lower, b.upper),
            ) else {
                continue;
            };
            if before == after {
                continue;
            }
            let frac = (values[m] - after) / (before - after);
            if (0.0..=1.0).contains(&frac) {
                cells.push((m, nodes[m] + frac * (nodes[m + 1] - nodes[m])));
            }
        }
        for &(m, _) in &cells {
            labels[m] = labels[m - 1];
        }
        out.ambiguous.extend(
            labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == ArcLabel::Ambiguous)
                .map(|(m, _)| (k, m)),
        );

        let mut start = 0;
        let mut seg_start = nodes[0];
        let mut first_interval = 0;
        for m in 1..=m_int {
            if m < m_int && labels[m] == labels[start] {
                continue;
            }
            // Arc `labels[start]` covers intervals start..m, possibly ending inside a cell.
            let cell = cells.iter().find(|c| c.0 == m - 1);
            let end = match (cell, m == m_int) {
                (_, true) => nodes[m_int],
                (Some(&(_, tau)), _) => tau,
                (None, _) => nodes[m],
            };
            out.segments.push(ArcSegment {
                channel: k,
                start: seg_start,
                end,
                label: labels[start],
                intervals: first_interval..m,
            });
            if m < m_int {
                let on_node = cell.is_none();
                let node = if on_node {
                    m
                } else if end - nodes[m - 1] <= nodes[m] - end {
                    m - 1
                } else {
                    m
                };
                let kind = junction_kind(labels[start], labels[m]);
                let branch = if matches!(kind, JunctionKind::Corner | JunctionKind::Unresolved) {
                    None
                } else {
                    // Evaluate on the singular side of the junction.
                    let interval = if labels[m] == ArcLabel::Singular {
                        m
                    } else {
                        m - 1
                    };
                    let u = policy.at(interval);
                    let lk = model.channel(k).generator.matrix();
                    let lc = model.frozen_remainder(&u, k);
                    branch_order(
                        lk,
                        &lc,
                        solution.costates()[node].coeffs(),
                        solution.states()[node].coeffs(),
                        tol.branch_tol,
                    )
                };
                out.junctions.push(Junction {
                    channel: k,
                    time: end,
                    kind,
                    node,
                    on_node,
                    branch,
                });
                seg_start = end;
                first_interval = if on_node { m } else { m - 1 };
                start = m;
            }
        }
    }
    out.junctions
        .sort_by(|a, b| a.time.total_cmp(&b.time).then(a.channel.cmp(&b.channel)));
    out
}
