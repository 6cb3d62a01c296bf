// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Regular/singular arc structure of extremals: classification, junction
//! residuals, branch points, smoothness and the parameter/constraint count.

mod branch;
mod classify;
mod corners;
mod counting;
mod smoothness;
mod structure;

pub use branch::{branch_order, BranchOrder, MAX_TESTED_ORDER};
pub use classify::{
    classify_arcs, ArcLabel, ArcSegment, ArcSegmentation, ArcTolerances, Junction, JunctionKind,
};
pub use corners::{verify_corner_conditions, CornerReport, CornerResidual};
pub use counting::{count_parameters_constraints, ParameterBalance, StructureCounts};
pub use smoothness::{smoothness_probe, SmoothnessReport, MIN_PROBE_INTERVALS, PROBE_ORDER};
pub use structure::{
    detect_redundancies, structure_report, Redundancy, StructureReport, Verdict, REDUNDANCY_TOL,
};

#[cfg(test)]
use classify::label_intervals;

#[cfg(test)]
mod tests;
