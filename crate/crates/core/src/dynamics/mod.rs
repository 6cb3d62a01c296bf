// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Forward/backward propagation under piecewise-constant controls and the
//! pointwise PMP diagnostics evaluated along it.

mod diagnostics;
mod policy;
mod propagate;

pub use diagnostics::{
    kinematic_degeneracy, pontryagin_function, singular_control_value, switching_derivatives,
    switching_function, DiagnosticsTrace, SingularControl, SwitchingDerivatives, BRANCH_TOL,
};
pub use policy::{ControlPolicy, BOUND_SLACK};
pub(crate) use propagate::{check_policy, check_trace_one};
pub use propagate::{
    propagate_costate_backward, propagate_state, Propagators, Trajectory, TRACE_TOL,
};
