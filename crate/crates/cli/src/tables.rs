// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Comma-separated trajectory and diagnostics tables.
//!
//! Trajectory table (`# qpmp-trajectory v1` on line 1, optionally followed by
//! `# mode: terminal|periodic`), one row per node:
//!
//! ```text
//! t,u_1..u_K,K,K_u1..K_uK,arc_label,rho_1..rho_D
//! ```
//!
//! `u`, `K`, `K_u` (interval mean) and `arc_label` describe the interval
//! that starts at `t` and are empty on the final row. `arc_label` joins the
//! per-channel labels with `;`. `rho_i` are the coefficients of the state in
//! the orthonormal Hermitian basis (identity first, then generalized
//! Gell-Mann matrices).
//!
//! When reading, only `t`, `u_k` and the state of the first row are
//! required; the other cells may be empty.

use std::io::Write;

use qpmp_core::arcs::{ArcLabel, ArcSegmentation};
use qpmp_core::dynamics::ControlPolicy;
use qpmp_core::solver::ExtremalSolution;

use crate::report::fmt_f64;

pub const TRAJECTORY_HEADER: &str = "# qpmp-trajectory v1";
pub const DIAGNOSTICS_HEADER: &str = "# qpmp-diagnostics v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: u64,
    pub message: String,
}

fn table_err(line: u64, message: impl Into<String>) -> TableError {
    TableError {
        line,
        message: message.into(),
    }
}

/// Label of every interval of channel `k`, taken from the segment that
/// contains its midpoint.
pub fn interval_labels(seg: &ArcSegmentation, policy: &ControlPolicy, k: usize) -> Vec<ArcLabel> {
    let segments: Vec<_> = seg.channel_segments(k).collect();
    let nodes = policy.nodes();
    (0..policy.intervals())
        .map(|m| {
            let mid = 0.5 * (nodes[m] + nodes[m + 1]);
            segments
                .iter()
                .find(|s| s.start <= mid && mid <= s.end)
                .map_or(ArcLabel::Ambiguous, |s| s.label)
        })
        .collect()
}

fn write_rows<W: Write>(
    out: W,
    header_line: &str,
    meta: &[String],
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
) -> std::io::Result<()> {
    let mut out = out;
    writeln!(out, "{header_line}")?;
    for m in meta {
        writeln!(out, "# {m}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&columns)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the trajectory table; `labels[k][m]` is the arc label of channel `k`
/// on interval `m`.
pub fn write_trajectory<W: Write>(
    out: W,
    solution: &ExtremalSolution,
    labels: &[Vec<ArcLabel>],
) -> std::io::Result<()> {
    let policy = &solution.policy;
    let (nc, m_int) = (policy.channels(), policy.intervals());
    let states = solution.states();
    let d = states[0].len();
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=nc).map(|k| format!("u_{k}")));
    columns.push("K".into());
    columns.extend((1..=nc).map(|k| format!("K_u{k}")));
    columns.push("arc_label".into());
    columns.extend((1..=d).map(|i| format!("rho_{i}")));
    let diag = &solution.diagnostics;
    let rows = (0..=m_int)
        .map(|m| {
            let mut r = vec![fmt_f64(policy.nodes()[m])];
            if m < m_int {
                r.extend((0..nc).map(|k| fmt_f64(policy.value(k, m))));
                r.push(fmt_f64(diag.pf[m]));
                r.extend((0..nc).map(|k| fmt_f64(diag.switching_on(k, m))));
                let l: Vec<&str> = labels.iter().map(|row| row[m].as_str()).collect();
                r.push(l.join(";"));
            } else {
                r.extend(std::iter::repeat_n(String::new(), 2 * nc + 2));
            }
            r.extend(states[m].coeffs().iter().map(|&x| fmt_f64(x)));
            r
        })
        .collect();
    let mode = if solution.periodic {
        "periodic"
    } else {
        "terminal"
    };
    write_rows(
        out,
        TRAJECTORY_HEADER,
        &[format!("mode: {mode}")],
        columns,
        rows,
    )
}

/// Writes the diagnostics table, one row per node:
/// `t, K_u1..K_uK` at the node, `dK_u1..dK_uK` (right derivative on the
/// interval starting there), `K_jump = K(t−) − K(t+)` at interior nodes,
/// `commutator = ‖[ρ, ψ]‖` for closed models, and the costate `psi_1..psi_D`.
pub fn write_diagnostics<W: Write>(out: W, solution: &ExtremalSolution) -> std::io::Result<()> {
    let diag = &solution.diagnostics;
    let nc = solution.policy.channels();
    let m_int = solution.policy.intervals();
    let costates = solution.costates();
    let d = costates[0].len();
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=nc).map(|k| format!("K_u{k}")));
    columns.extend((1..=nc).map(|k| format!("dK_u{k}")));
    columns.push("K_jump".into());
    columns.push("commutator".into());
    columns.extend((1..=d).map(|i| format!("psi_{i}")));
    let rows = (0..=m_int)
        .map(|m| {
            let mut r = vec![fmt_f64(diag.times[m])];
            r.extend((0..nc).map(|k| fmt_f64(diag.switching[k][m])));
            r.extend((0..nc).map(|k| {
                if m < m_int {
                    fmt_f64(diag.switching_rate[k][m])
                } else {
                    String::new()
                }
            }));
            r.push(if m > 0 && m < m_int {
                fmt_f64(diag.pf[m - 1] - diag.pf[m])
            } else {
                String::new()
            });
            r.push(
                diag.degeneracy
                    .as_ref()
                    .map_or(String::new(), |g| fmt_f64(g[m])),
            );
            r.extend(costates[m].coeffs().iter().map(|&x| fmt_f64(x)));
            r
        })
        .collect();
    write_rows(out, DIAGNOSTICS_HEADER, &[], columns, rows)
}

/// Parsed trajectory table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    /// `controls[k][m]` on interval `m`.
    pub controls: Vec<Vec<f64>>,
    /// `K` per interval; NaN where the cell is empty.
    pub pf: Vec<f64>,
    /// Interval-mean `K_uₖ`, `[k][m]`; NaN where empty.
    pub switching: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// State coefficients per node; `None` where the row leaves them empty.
    pub states: Vec<Option<Vec<f64>>>,
    /// From a `# mode: …` line before the column header.
    pub mode: Option<String>,
}

impl TrajectoryTable {
    pub fn channels(&self) -> usize {
        self.controls.len()
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn initial_state(&self) -> &[f64] {
        self.states[0].as_deref().expect("validated on parse")
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        match text.lines().next() {
            Some(l) if l.trim_end() == TRAJECTORY_HEADER => {}
            _ => {
                return Err(table_err(
                    1,
                    format!("expected header {TRAJECTORY_HEADER:?}"),
                ))
            }
        }
        let body_start = text.find('\n').map_or(text.len(), |i| i + 1);
        let mode = text[body_start..]
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| {
                l.trim_start_matches('#')
                    .trim()
                    .strip_prefix("mode:")
                    .map(|m| m.trim().to_string())
            });
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text[body_start..].as_bytes());
        // Line numbers reported by the reader are relative to the body.
        let shift = 1u64;
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_err(e, shift, body_start as u64))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let (nc, d) = layout(&columns).map_err(|m| table_err(shift + 1, m))?;
        let mut table = TrajectoryTable {
            times: Vec::new(),
            controls: vec![Vec::new(); nc],
            pf: Vec::new(),
            switching: vec![Vec::new(); nc],
            labels: Vec::new(),
            states: Vec::new(),
            mode,
        };
        let mut closed_at = None;
        let mut last_line = shift + 1;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_err(e, shift, body_start as u64))?;
            let line = rec.position().map_or(0, |p| p.line()) + shift;
            last_line = line;
            if let Some(prev) = closed_at {
                return Err(table_err(
                    line,
                    format!("row after the final row at line {prev}"),
                ));
            }
            let cell = |i: usize| rec.get(i).unwrap_or("").trim();
            let num = |i: usize| -> Result<Option<f64>, TableError> {
                let s = cell(i);
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>().map(Some).map_err(|_| {
                    table_err(line, format!("column {:?}: cannot parse {s:?}", columns[i]))
                })
            };
            let t = num(0)?.ok_or_else(|| table_err(line, "empty time cell"))?;
            if let Some(&prev) = table.times.last() {
                if !(t > prev) {
                    return Err(table_err(
                        line,
                        format!("time {t} does not increase (previous {prev})"),
                    ));
                }
            }
            table.times.push(t);
            let u: Vec<Option<f64>> = (1..=nc).map(&num).collect::<Result<_, _>>()?;
            if u.iter().all(Option::is_none) {
                closed_at = Some(line);
            } else if u.iter().any(Option::is_none) {
                return Err(table_err(line, "some control cells are empty"));
            } else {
                for (k, v) in u.into_iter().enumerate() {
                    table.controls[k].push(v.unwrap());
                }
                table.pf.push(num(nc + 1)?.unwrap_or(f64::NAN));
                for k in 0..nc {
                    table.switching[k].push(num(nc + 2 + k)?.unwrap_or(f64::NAN));
                }
                table.labels.push(cell(2 * nc + 2).to_string());
            }
            let state: Vec<Option<f64>> = (0..d)
                .map(|i| num(2 * nc + 3 + i))
                .collect::<Result<_, _>>()?;
            table.states.push(if state.iter().all(Option::is_none) {
                None
            } else if state.iter().any(Option::is_none) {
                return Err(table_err(line, "some state cells are empty"));
            } else {
                Some(state.into_iter().map(Option::unwrap).collect())
            });
        }
        if closed_at.is_none() {
            return Err(table_err(
                last_line + 1,
                "table ends without a final row (empty control cells); the file looks truncated",
            ));
        }
        if table.times.len() < 2 {
            return Err(table_err(shift + 2, "need at least one interval"));
        }
        if table.states[0].is_none() {
            return Err(table_err(
                shift + 2,
                "the first row must carry the initial state",
            ));
        }
        Ok(table)
    }
}

fn csv_err(e: csv::Error, shift: u64, body_start: u64) -> TableError {
    let line = e.position().map_or(0, |p| p.line()) + shift;
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len,
            len,
            pos,
        } => {
            let byte = pos.as_ref().map_or(0, |p| p.byte()) + body_start;
            format!("expected {expected_len} fields, found {len} (record at byte offset {byte})")
        }
        _ => e.to_string(),
    };
    table_err(line, message)
}

/// Checks the column names and returns (channels, state length).
fn layout(columns: &[String]) -> Result<(usize, usize), String> {
    if columns.first().map(String::as_str) != Some("t") {
        return Err("first column must be `t`".into());
    }
    let nc = columns
        .iter()
        .skip(1)
        .take_while(|c| c.starts_with("u_"))
        .count();
    if nc == 0 {
        return Err("no control columns `u_1..`".into());
    }
    let mut expected: Vec<String> = vec!["t".into()];
    expected.extend((1..=nc).map(|k| format!("u_{k}")));
    expected.push("K".into());
    expected.extend((1..=nc).map(|k| format!("K_u{k}")));
    expected.push("arc_label".into());
    let d = columns.len().saturating_sub(expected.len());
    expected.extend((1..=d).map(|i| format!("rho_{i}")));
    if d == 0 || columns != expected.as_slice() {
        return Err(format!("columns must be {}", expected.join(",")));
    }
    Ok((nc, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# qpmp-trajectory v1
t,u_1,K,K_u1,arc_label,rho_1,rho_2,rho_3,rho_4
0,1,,,,0.7071067811865475,0,0,-0.7071067811865475
0.5,-1,,,,,,,
1,,,,,,,,
";

    #[test]
    fn parses_minimal_hand_written_table() {
        let t = TrajectoryTable::parse(SAMPLE).unwrap();
        assert_eq!(t.times, vec![0.0, 0.5, 1.0]);
        assert_eq!(t.controls, vec![vec![1.0, -1.0]]);
        assert!(t.pf.iter().all(|x| x.is_nan()));
        assert_eq!(t.initial_state().len(), 4);
        assert_eq!(t.states[1], None);
    }

    #[test]
    fn truncated_tables_are_rejected_with_a_line() {
        let cut = &SAMPLE[..SAMPLE.len() - 6];
        let e = TrajectoryTable::parse(cut).unwrap_err();
        assert_eq!(e.line, 5, "{e}");
        let rows_missing: String = SAMPLE.lines().take(4).map(|l| format!("{l}\n")).collect();
        let e = TrajectoryTable::parse(&rows_missing).unwrap_err();
        assert!(e.message.contains("truncated"), "{e}");
    }

    #[test]
    fn bad_cells_and_headers() {
        assert_eq!(TrajectoryTable::parse("t,u_1\n").unwrap_err().line, 1);
        let bad = SAMPLE.replace("0.5,-1", "0.5,abc");
        let e = TrajectoryTable::parse(&bad).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("u_1"));
        let cols = SAMPLE.replace("arc_label", "label");
        assert_eq!(TrajectoryTable::parse(&cols).unwrap_err().line, 2);
        let order = SAMPLE.replace("0.5,-1", "0,-1");
        assert!(TrajectoryTable::parse(&order)
            .unwrap_err()
            .message
            .contains("increase"));
    }
}
