// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Near-δ features of controls with very wide bounds.

use crate::dynamics::ControlPolicy;
use crate::error::{Error, Result};

/// Default detection threshold as a fraction of the channel's bound magnitude.
pub const SPIKE_THRESHOLD: f64 = 0.1;

/// A maximal run of intervals on which `|u|` exceeds the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Spike {
    pub channel: usize,
    /// Interval indices in time order; a periodic spike may wrap past the end.
    pub intervals: Vec<usize>,
    pub start: f64,
    pub end: f64,
    pub peak_time: f64,
    pub peak: f64,
    /// `∫u dt` over the run.
    pub area: f64,
}

impl Spike {
    pub fn width(&self, period: f64) -> f64 {
        if self.end >= self.start {
            self.end - self.start
        } else {
            self.end - self.start + period
        }
    }
}

fn spike_of(policy: &ControlPolicy, k: usize, intervals: Vec<usize>) -> Spike {
    let nodes = policy.nodes();
    let (mut peak, mut peak_time) = (0.0f64, nodes[intervals[0]]);
    let mut area = 0.0;
    for &m in &intervals {
        let u = policy.value(k, m);
        area += u * policy.step(m);
        if u.abs() > peak.abs() {
            peak = u;
            peak_time = 0.5 * (nodes[m] + nodes[m + 1]);
        }
    }
    Spike {
        channel: k,
        start: nodes[intervals[0]],
        end: nodes[intervals[intervals.len() - 1] + 1],
        intervals,
        peak_time,
        peak,
        area,
    }
}

/// Runs of channel `k` with `|u| ≥ threshold·max(|u_min|, |u_max|)`. With
/// `periodic` a run touching both ends of the horizon is one spike.
pub fn detect_spikes(
    policy: &ControlPolicy,
    k: usize,
    threshold: f64,
    periodic: bool,
) -> Result<Vec<Spike>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Parameter(format!(
            "spike threshold {threshold} must lie in (0, 1)"
        )));
    }
    let b = policy.bounds()[k];
    let level = threshold * b.lower.abs().max(b.upper.abs());
    let m_int = policy.intervals();
    let high: Vec<bool> = policy.values(k).iter().map(|u| u.abs() >= level).collect();
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut m = 0;
    while m < m_int {
        if !high[m] {
            m += 1;
            continue;
        }
        let s = m;
        // A sign change inside a run separates two spikes.
        let sign = policy.value(k, m) > 0.0;
        while m < m_int && high[m] && (policy.value(k, m) > 0.0) == sign {
            m += 1;
        }
        runs.push((s..m).collect());
    }
    if periodic && runs.len() > 1 {
        let first = &runs[0];
        let last = &runs[runs.len() - 1];
        let same_sign = (policy.value(k, first[0]) > 0.0) == (policy.value(k, last[0]) > 0.0);
        if first[0] == 0 && last[last.len() - 1] == m_int - 1 && same_sign {
            let head = runs.remove(0);
            runs.last_mut().unwrap().extend(head);
        }
    }
    Ok(runs.into_iter().map(|r| spike_of(policy, k, r)).collect())
}

/// Splits every spike interval and `pad` neighbours on each side into
/// `factor` pieces (neighbours wrap around for periodic policies).
pub fn refine_around_spikes(
    policy: &ControlPolicy,
    spikes: &[Spike],
    factor: usize,
    pad: usize,
    periodic: bool,
) -> Result<ControlPolicy> {
    let m_int = policy.intervals();
    let mut select = vec![false; m_int];
    for s in spikes {
        for &m in &s.intervals {
            for d in -(pad as isize)..=pad as isize {
                let j = m as isize + d;
                if (0..m_int as isize).contains(&j) {
                    select[j as usize] = true;
                } else if periodic {
                    select[j.rem_euclid(m_int as isize) as usize] = true;
                }
            }
        }
    }
    policy.refined_where(factor, |m| select[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::Bounds;

    fn policy(values: Vec<f64>) -> ControlPolicy {
        let n = values.len();
        ControlPolicy::uniform(0.0, n as f64, n, vec![Bounds::symmetric(100.0)], |_, t| {
            values[t as usize]
        })
        .unwrap()
    }

    #[test]
    fn spikes_are_runs_above_threshold() {
        let p = policy(vec![1.0, 50.0, 80.0, 2.0, -3.0, -40.0, 0.0, 20.0]);
        let s = detect_spikes(&p, 0, 0.1, false).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].intervals, vec![1, 2]);
        assert_eq!((s[0].start, s[0].end), (1.0, 3.0));
        assert_eq!(s[0].area, 130.0);
        assert_eq!((s[0].peak, s[0].peak_time), (80.0, 2.5));
        assert_eq!(s[1].area, -40.0);
        assert_eq!(s[2].intervals, vec![7]);
    }

    #[test]
    fn periodic_spike_wraps() {
        let p = policy(vec![30.0, 1.0, 1.0, 60.0]);
        assert_eq!(detect_spikes(&p, 0, 0.1, false).unwrap().len(), 2);
        let s = detect_spikes(&p, 0, 0.1, true).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].intervals, vec![3, 0]);
        assert_eq!(s[0].area, 90.0);
        assert_eq!(s[0].width(4.0), 2.0);
    }

    #[test]
    fn opposite_signs_split() {
        let p = policy(vec![0.0, 50.0, -50.0, 0.0]);
        let s = detect_spikes(&p, 0, 0.1, false).unwrap();
        assert_eq!(s.len(), 2);
        assert!(detect_spikes(&p, 0, 0.0, false).is_err());
    }

    #[test]
    fn refinement_preserves_area() {
        let p = policy(vec![0.0, 0.0, 50.0, 80.0, 0.0, 0.0, 0.0, 30.0]);
        let s = detect_spikes(&p, 0, 0.1, true).unwrap();
        let r = refine_around_spikes(&p, &s, 8, 1, true).unwrap();
        // Intervals 1..=4 and 6, 7, 0 are split.
        assert_eq!(r.intervals(), 8 + 7 * 7);
        let rs = detect_spikes(&r, 0, 0.1, true).unwrap();
        assert_eq!(rs.len(), s.len());
        for (a, b) in s.iter().zip(&rs) {
            assert!((a.area - b.area).abs() < 1e-12);
            assert_eq!((a.start, a.end), (b.start, b.end));
        }
    }
}
