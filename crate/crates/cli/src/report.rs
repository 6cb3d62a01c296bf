// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Line-oriented `key = value` report documents.
//!
//! Line 1 is `# qpmp-report v1`. Every following non-blank line that does
//! not start with `#` holds one key, ` = `, and a single-line value. Keys
//! are unique and keep their insertion order.

use std::fmt::{self, Display};

pub const REPORT_HEADER: &str = "# qpmp-report v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ReportParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

/// Decimal notation in `[1e-4, 1e6)`, exponent notation elsewhere; both
/// round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends or replaces `key`. Newlines in the value become spaces.
    pub fn set(&mut self, key: impl Into<String>, value: impl Display) {
        let key = key.into();
        debug_assert!(
            !key.contains('=') && !key.contains(char::is_whitespace),
            "bad key {key:?}"
        );
        let value = value.to_string().replace(['\n', '\r'], " ");
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn set_f64(&mut self, key: impl Into<String>, value: f64) {
        self.set(key, fmt_f64(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn parse(text: &str) -> Result<Self, ReportParseError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == REPORT_HEADER => {}
            _ => {
                return Err(ReportParseError {
                    line: 1,
                    message: format!("expected header {REPORT_HEADER:?}"),
                })
            }
        }
        let mut report = Report::new();
        for (i, line) in lines {
            let l = line.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let Some((k, v)) = l.split_once(" = ").or_else(|| l.split_once('=')) else {
                return Err(ReportParseError {
                    line: i + 1,
                    message: format!("expected `key = value`, found {l:?}"),
                });
            };
            let k = k.trim();
            if k.is_empty() || report.get(k).is_some() {
                return Err(ReportParseError {
                    line: i + 1,
                    message: format!("empty or duplicate key {k:?}"),
                });
            }
            report.entries.push((k.to_string(), v.trim().to_string()));
        }
        Ok(report)
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{REPORT_HEADER}")?;
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
