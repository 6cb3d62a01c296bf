// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Branch-point order from the nested commutator conditions
//! `dˡ/dαˡ ⟨ψ|ad^m_{𝕃_c+α𝕃ₖ}[𝕃ₖ, 𝕃_c]|ρ⟩ = 0` at `α = 0`, `l = 0..m`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

/// Highest order tested; orders beyond it are reported as `AtLeast`.
pub const MAX_TESTED_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchOrder {
    Exact(u32),
    /// Every tested condition vanishes; the order is at least this.
    AtLeast(u32),
}

impl BranchOrder {
    /// Order used for counting; `AtLeast(s)` counts as `s`.
    pub fn value(self) -> u32 {
        match self {
            Self::Exact(s) | Self::AtLeast(s) => s,
        }
    }
}

impl fmt::Display for BranchOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(s) => write!(f, "{s}"),
            Self::AtLeast(s) => write!(f, ">={s}"),
        }
    }
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Coefficients of `α^l` in `ad^m_{𝕃_c+α𝕃ₖ} X` for `m = 1..=depth`, indexed `[m-1][l]`.
fn ad_powers(
    lk: &DMatrix<f64>,
    lc: &DMatrix<f64>,
    x: &DMatrix<f64>,
    depth: usize,
) -> Vec<Vec<DMatrix<f64>>> {
    let mut out: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(depth);
    let mut prev = vec![x.clone()];
    for _ in 0..depth {
        let n = prev.len();
        let next: Vec<DMatrix<f64>> = (0..=n)
            .map(|l| {
                let mut term = DMatrix::zeros(x.nrows(), x.ncols());
                if l < n {
                    term += commutator(lc, &prev[l]);
                }
                if l > 0 {
                    term += commutator(lk, &prev[l - 1]);
                }
                term
            })
            .collect();
        out.push(next.clone());
        prev = next;
    }
    out
}

/// `true` when `⟨ψ|X|ρ⟩` vanishes relative to `‖X‖·‖ψ‖·‖ρ‖`.
fn vanishes(x: &DMatrix<f64>, psi: &DVector<f64>, rho: &DVector<f64>, tol: f64) -> bool {
    let v = psi.dot(&(x * rho));
    v.abs() <= tol * x.norm() * psi.norm() * rho.norm()
}

/// `None` when `⟨ψ|[[𝕃ₖ,𝕃_c],𝕃ₖ]|ρ⟩` is nonzero (an ordinary junction).
/// Otherwise order `s` is the largest `m ≤ 2` for which all conditions up to
/// `m` hold, at least 1; `AtLeast(3)` when the `m = 3` conditions hold too.
pub fn branch_order(
    lk: &DMatrix<f64>,
    lc: &DMatrix<f64>,
    psi: &DVector<f64>,
    rho: &DVector<f64>,
    tol: f64,
) -> Option<BranchOrder> {
    let c1 = commutator(lk, lc);
    let denominator = commutator(&c1, lk);
    if !vanishes(&denominator, psi, rho, tol) {
        return None;
    }
    let powers = ad_powers(lk, lc, &c1, MAX_TESTED_ORDER + 1);
    let mut order = 0;
    for level in &powers {
        if level.iter().all(|x| vanishes(x, psi, rho, tol)) {
            order += 1;
        } else {
            break;
        }
    }
    Some(if order > MAX_TESTED_ORDER {
        BranchOrder::AtLeast(MAX_TESTED_ORDER as u32 + 1)
    } else {
        BranchOrder::Exact(order.max(1) as u32)
    })
}
