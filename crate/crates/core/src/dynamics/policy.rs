// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::liouville::Bounds;

/// Slack allowed on channel bounds.
pub const BOUND_SLACK: f64 = 1e-12;

/// Piecewise-constant multi-channel control.
///
/// `values[k][m]` is the value of channel `k` on `[nodes[m], nodes[m+1])`.
/// Grids are uniform unless refined locally with [`ControlPolicy::refined_where`].
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPolicy {
    nodes: Vec<f64>,
    values: Vec<Vec<f64>>,
    bounds: Vec<Bounds>,
}

impl ControlPolicy {
    pub fn new(nodes: Vec<f64>, values: Vec<Vec<f64>>, bounds: Vec<Bounds>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPolicy("need at least one interval".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidPolicy(
                "time grid must be strictly increasing".into(),
            ));
        }
        if values.len() != bounds.len() {
            return Err(Error::InvalidPolicy(format!(
                "{} value rows for {} channels",
                values.len(),
                bounds.len()
            )));
        }
        let m = nodes.len() - 1;
        for (k, (row, b)) in values.iter().zip(&bounds).enumerate() {
            if row.len() != m {
                return Err(Error::InvalidPolicy(format!(
                    "channel {k} has {} values for {m} intervals",
                    row.len()
                )));
            }
            if b.lower > b.upper {
                return Err(Error::InvalidBounds {
                    channel: k,
                    lower: b.lower,
                    upper: b.upper,
                });
            }
            if let Some((i, u)) = row
                .iter()
                .enumerate()
                .find(|(_, u)| !b.contains(**u, BOUND_SLACK) || !u.is_finite())
            {
                return Err(Error::InvalidPolicy(format!(
                    "channel {k} interval {i}: value {u} outside [{}, {}]",
                    b.lower, b.upper
                )));
            }
        }
        Ok(Self {
            nodes,
            values,
            bounds,
        })
    }

    /// Uniform grid on `[t0, t1]`; `fill(k, t_mid)` is clamped into the bounds.
    pub fn uniform(
        t0: f64,
        t1: f64,
        intervals: usize,
        bounds: Vec<Bounds>,
        fill: impl Fn(usize, f64) -> f64,
    ) -> Result<Self> {
        if intervals == 0 || !(t1 > t0) {
            return Err(Error::InvalidPolicy(format!(
                "need intervals >= 1 and t1 > t0 (got {intervals}, [{t0}, {t1}])"
            )));
        }
        let h = (t1 - t0) / intervals as f64;
        let nodes: Vec<f64> = (0..=intervals)
            .map(|m| {
                if m == intervals {
                    t1
                } else {
                    t0 + h * m as f64
                }
            })
            .collect();
        let values = bounds
            .iter()
            .enumerate()
            .map(|(k, b)| {
                (0..intervals)
                    .map(|m| b.clamp(fill(k, 0.5 * (nodes[m] + nodes[m + 1]))))
                    .collect()
            })
            .collect();
        Self::new(nodes, values, bounds)
    }

    pub fn constant(
        t0: f64,
        t1: f64,
        intervals: usize,
        bounds: Vec<Bounds>,
        levels: &[f64],
    ) -> Result<Self> {
        Self::uniform(t0, t1, intervals, bounds, |k, _| levels[k])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn channels(&self) -> usize {
        self.values.len()
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn step(&self, m: usize) -> f64 {
        self.nodes[m + 1] - self.nodes[m]
    }

    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn all_values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, k: usize, m: usize) -> f64 {
        self.values[k][m]
    }

    /// Control vector on interval `m`.
    pub fn at(&self, m: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[m]).collect()
    }

    /// Value of channel `k` at time `t` (right-continuous).
    pub fn sample(&self, k: usize, t: f64) -> f64 {
        let m = match self.nodes.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i.min(self.intervals() - 1),
            Err(i) => i.saturating_sub(1).min(self.intervals() - 1),
        };
        self.values[k][m]
    }

    pub fn is_uniform(&self) -> bool {
        let h0 = self.step(0);
        (0..self.intervals()).all(|m| (self.step(m) - h0).abs() <= 1e-12 * h0.max(1.0))
    }

    /// Sets a value, clamping into the channel bounds.
    pub fn set(&mut self, k: usize, m: usize, u: f64) {
        self.values[k][m] = self.bounds[k].clamp(u);
    }

    /// Flattened values, channel-major.
    pub fn flat(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    /// Replaces values from a channel-major flat vector, clamping into bounds.
    pub fn set_flat(&mut self, x: &[f64]) {
        let m = self.intervals();
        for (k, row) in self.values.iter_mut().enumerate() {
            let b = self.bounds[k];
            for (i, v) in row.iter_mut().enumerate() {
                *v = b.clamp(x[k * m + i]);
            }
        }
    }

    pub fn with_flat(&self, x: &[f64]) -> Self {
        let mut p = self.clone();
        p.set_flat(x);
        p
    }

    /// Same values on a grid stretched to the new duration.
    pub fn rescaled(&self, duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::InvalidPolicy(format!(
                "duration {duration} must be positive"
            )));
        }
        let t0 = self.start();
        let s = duration / self.duration();
        let nodes = self.nodes.iter().map(|t| t0 + (t - t0) * s).collect();
        Self::new(nodes, self.values.clone(), self.bounds.clone())
    }

    /// `n` consecutive copies of the policy.
    pub fn repeated(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("repetition count must be positive".into()));
        }
        let t0 = self.start();
        let period = self.duration();
        let mut nodes = Vec::with_capacity(n * self.intervals() + 1);
        nodes.push(t0);
        for r in 0..n {
            let shift = r as f64 * period;
            nodes.extend(self.nodes[1..].iter().map(|t| t + shift));
        }
        let values = self
            .values
            .iter()
            .map(|row| row.iter().copied().cycle().take(n * row.len()).collect())
            .collect();
        Self::new(nodes, values, self.bounds.clone())
    }

    /// Splits every interval `m` with `select(m)` into `factor` equal pieces.
    pub fn refined_where(&self, factor: usize, select: impl Fn(usize) -> bool) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Parameter(
                "refinement factor must be positive".into(),
            ));
        }
        let mut nodes = vec![self.start()];
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); self.channels()];
        for m in 0..self.intervals() {
            let pieces = if select(m) { factor } else { 1 };
            let (a, b) = (self.nodes[m], self.nodes[m + 1]);
            for p in 1..=pieces {
                nodes.push(if p == pieces {
                    b
                } else {
                    a + (b - a) * p as f64 / pieces as f64
                });
                for (k, row) in values.iter_mut().enumerate() {
                    row.push(self.values[k][m]);
                }
            }
        }
        Self::new(nodes, values, self.bounds.clone())
    }

    /// Splits intervals so that no step exceeds `max_step`.
    pub fn subdivided(&self, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(Error::Parameter(format!(
                "max step {max_step} must be positive"
            )));
        }
        let mut nodes = vec![self.start()];
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); self.channels()];
        for m in 0..self.intervals() {
            let (a, b) = (self.nodes[m], self.nodes[m + 1]);
            let pieces = ((b - a) / max_step).ceil().max(1.0) as usize;
            for p in 1..=pieces {
                nodes.push(if p == pieces {
                    b
                } else {
                    a + (b - a) * p as f64 / pieces as f64
                });
                for (k, row) in values.iter_mut().enumerate() {
                    row.push(self.values[k][m]);
                }
            }
        }
        Self::new(nodes, values, self.bounds.clone())
    }

    /// Merges neighbouring intervals whose control vectors are identical.
    pub fn merged(&self) -> Self {
        let mut nodes = vec![self.start()];
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); self.channels()];
        for m in 0..self.intervals() {
            let same =
                m > 0 && (0..self.channels()).all(|k| self.values[k][m] == self.values[k][m - 1]);
            if same {
                *nodes.last_mut().unwrap() = self.nodes[m + 1];
            } else {
                nodes.push(self.nodes[m + 1]);
                for (k, row) in values.iter_mut().enumerate() {
                    row.push(self.values[k][m]);
                }
            }
        }
        Self {
            nodes,
            values,
            bounds: self.bounds.clone(),
        }
    }

    /// Same values with new node positions.
    pub fn with_nodes(&self, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() != self.nodes.len() {
            return Err(Error::Shape {
                expected: self.nodes.len(),
                found: nodes.len(),
            });
        }
        Self::new(nodes, self.values.clone(), self.bounds.clone())
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        self.refined_where(factor, |_| true)
    }

    /// Resamples onto a uniform grid with `intervals` pieces over the same span.
    pub fn resampled(&self, intervals: usize) -> Result<Self> {
        let src = self.clone();
        Self::uniform(
            self.start(),
            self.end(),
            intervals,
            self.bounds.clone(),
            move |k, t| src.sample(k, t),
        )
    }

    /// Time integral of channel `k` over intervals `range`.
    pub fn area(&self, k: usize, range: std::ops::Range<usize>) -> f64 {
        range.map(|m| self.values[k][m] * self.step(m)).sum()
    }
}
