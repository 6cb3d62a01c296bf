// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use crate::dynamics::ControlPolicy;
use crate::error::{Error, Result};
use crate::liouville::Bounds;

/// Piecewise-constant schedule of one channel: `values[i]` holds between
/// `switch_times[i-1]` and `switch_times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSchedule {
    pub switch_times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ChannelSchedule {
    pub fn constant(value: f64) -> Self {
        Self {
            switch_times: Vec::new(),
            values: vec![value],
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.switch_times.partition_point(|&s| s <= t)]
    }
}

/// Bang-bang schedule of every channel over `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSequence {
    pub start: f64,
    pub end: f64,
    pub channels: Vec<ChannelSchedule>,
}

impl SwitchSequence {
    pub fn new(start: f64, end: f64, channels: Vec<ChannelSchedule>) -> Result<Self> {
        if !(start < end) {
            return Err(Error::InvalidPolicy(format!(
                "empty horizon [{start}, {end}]"
            )));
        }
        for (k, c) in channels.iter().enumerate() {
            if c.values.len() != c.switch_times.len() + 1 {
                return Err(Error::InvalidPolicy(format!(
                    "channel {k}: {} switches need {} leg values, found {}",
                    c.switch_times.len(),
                    c.switch_times.len() + 1,
                    c.values.len()
                )));
            }
            let mut prev = start;
            for &t in &c.switch_times {
                if !(t > prev && t < end) {
                    return Err(Error::InvalidPolicy(format!(
                        "channel {k}: switch times must increase strictly inside ({start}, {end})"
                    )));
                }
                prev = t;
            }
        }
        Ok(Self {
            start,
            end,
            channels,
        })
    }

    pub fn switch_count(&self) -> usize {
        self.channels.iter().map(|c| c.switch_times.len()).sum()
    }

    /// Exact piecewise-constant policy with nodes at every switch time.
    pub fn to_policy(&self, bounds: Vec<Bounds>) -> Result<ControlPolicy> {
        let mut nodes: Vec<f64> = self
            .channels
            .iter()
            .flat_map(|c| c.switch_times.iter().copied())
            .chain([self.start, self.end])
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let values = self
            .channels
            .iter()
            .map(|c| {
                nodes
                    .windows(2)
                    .map(|w| c.value_at(0.5 * (w[0] + w[1])))
                    .collect()
            })
            .collect();
        ControlPolicy::new(nodes, values, bounds)
    }

    /// The schedule of a policy that sits within `bound_tol·width` of a bound
    /// on every interval; `None` otherwise.
    pub fn from_policy(policy: &ControlPolicy, bound_tol: f64) -> Option<Self> {
        let nodes = policy.nodes();
        let mut channels = Vec::with_capacity(policy.channels());
        for (k, b) in policy.bounds().iter().enumerate() {
            let slack = bound_tol * b.width();
            let mut schedule = ChannelSchedule {
                switch_times: Vec::new(),
                values: Vec::new(),
            };
            for (m, &u) in policy.values(k).iter().enumerate() {
                let v = if (u - b.upper).abs() <= slack {
                    b.upper
                } else if (u - b.lower).abs() <= slack {
                    b.lower
                } else {
                    return None;
                };
                match schedule.values.last() {
                    Some(&last) if last == v => {}
                    Some(_) => {
                        schedule.switch_times.push(nodes[m]);
                        schedule.values.push(v);
                    }
                    None => schedule.values.push(v),
                }
            }
            channels.push(schedule);
        }
        Some(Self {
            start: policy.start(),
            end: policy.end(),
            channels,
        })
    }
}
