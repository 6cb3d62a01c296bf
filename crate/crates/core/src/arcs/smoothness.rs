// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use super::classify::ArcSegment;
use crate::dynamics::ControlPolicy;
use crate::error::{Error, Result};

/// Fewest intervals a segment needs for the probe.
pub const MIN_PROBE_INTERVALS: usize = 8;
/// Highest difference order probed.
pub const PROBE_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub channel: usize,
    pub start: f64,
    pub end: f64,
    /// `max |Δ^{r+1} u|` over the segment for `r = 0..=3`; `r = 0` is the
    /// largest jump between neighbouring intervals.
    pub jumps: [f64; PROBE_ORDER + 1],
    /// `jumps` divided by the segment scale `max |u|` (at least `floor`).
    pub normalized: [f64; PROBE_ORDER + 1],
}

impl SmoothnessReport {
    pub fn max_normalized(&self) -> f64 {
        self.normalized.iter().fold(0.0, |a, x| a.max(*x))
    }
}

/// Finite-difference probe of the control on one segment: a smooth control
/// has `Δ^{r+1} u = O(h^{r+1})`, a step of size `A` shows up as `A` in `jumps[0]`.
/// `floor` keeps the normalization finite on segments where `u ≈ 0`.
pub fn smoothness_probe(
    policy: &ControlPolicy,
    segment: &ArcSegment,
    floor: f64,
) -> Result<SmoothnessReport> {
    let range = segment.intervals.clone();
    if range.len() < MIN_PROBE_INTERVALS {
        return Err(Error::InsufficientResolution(format!(
            "segment [{}, {}] spans {} intervals, the probe needs {MIN_PROBE_INTERVALS}",
            segment.start,
            segment.end,
            range.len()
        )));
    }
    let mut d: Vec<f64> = policy.values(segment.channel)[range].to_vec();
    let scale = d.iter().fold(floor, |a, x| a.max(x.abs()));
    let mut jumps = [0.0; PROBE_ORDER + 1];
    for j in jumps.iter_mut() {
        d = d.windows(2).map(|w| w[1] - w[0]).collect();
        *j = d.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    }
    Ok(SmoothnessReport {
        channel: segment.channel,
        start: segment.start,
        end: segment.end,
        jumps,
        normalized: jumps.map(|j| j / scale),
    })
}
