// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::dynamics::{switching_function, ControlPolicy};
use crate::error::Error;
use crate::liouville::Bounds;
use crate::models::{
    ket_bra, sigma_x, sigma_z, two_level_closed, two_level_thermal, Thermalization,
};
use crate::solver::{analyze_policy, solve_terminal, ExtremalSolution, ProblemSpec, SolverConfig};

use ArcLabel::*;

fn config(intervals: usize, polish: bool) -> SolverConfig {
    SolverConfig {
        intervals,
        gradient_tol: 1e-9,
        polish,
        ..Default::default()
    }
}

fn closed_spec(t: f64) -> ProblemSpec {
    let model = two_level_closed(1.0, 1.0, &sigma_z()).unwrap();
    let rho0 = model.basis().density(&ket_bra(2, 1, 1)).unwrap();
    ProblemSpec::terminal(model, rho0, t).unwrap()
}

fn closed_solution(t: f64, m: usize, polish: bool) -> (ProblemSpec, ExtremalSolution) {
    let spec = closed_spec(t);
    let initial = ControlPolicy::constant(0.0, t, m, spec.model.bounds(), &[0.3]).unwrap();
    let sol = solve_terminal(&spec, &initial, &config(m, polish)).unwrap();
    (spec, sol)
}

fn labels_of(seg: &ArcSegmentation, k: usize) -> Vec<ArcLabel> {
    seg.channel_segments(k).map(|s| s.label).collect()
}

fn assert_partition(seg: &ArcSegmentation, k: usize, t0: f64, t1: f64) {
    let s: Vec<&ArcSegment> = seg.channel_segments(k).collect();
    assert_eq!(s[0].start, t0);
    assert_eq!(s[s.len() - 1].end, t1);
    for w in s.windows(2) {
        assert_eq!(w[0].end, w[1].start);
        assert!(w[0].start < w[0].end);
    }
}

#[test]
fn two_switch_bang_bang_labels() {
    let u = [1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
    let ku = [0.5, 0.3, 0.1, -0.1, -0.1, 0.2, 0.4];
    let labels = label_intervals(&u, &ku, -1.0, 1.0, &ArcTolerances::default());
    assert_eq!(
        labels,
        [RegularMax, RegularMax, RegularMax, RegularMin, RegularMin, RegularMax, RegularMax]
    );
}

#[test]
fn vanishing_switching_function_is_one_singular_run() {
    let labels = label_intervals(
        &[0.2, -0.4, 0.1, 1.0],
        &[0.0; 4],
        -1.0,
        1.0,
        &ArcTolerances::default(),
    );
    assert!(labels.iter().all(|&l| l == Singular));
    // A run shorter than the minimum stays unlabelled.
    let labels = label_intervals(
        &[1.0, 0.1, 0.1, 1.0],
        &[1.0, 0.0, 0.0, 1.0],
        -1.0,
        1.0,
        &ArcTolerances::default(),
    );
    assert_eq!(labels, [RegularMax, Ambiguous, Ambiguous, RegularMax]);
}

#[test]
fn wrong_sign_at_a_bound_is_not_regular() {
    let labels = label_intervals(
        &[1.0, -1.0],
        &[-0.5, 0.5],
        -1.0,
        1.0,
        &ArcTolerances::default(),
    );
    assert_eq!(labels, [Ambiguous, Ambiguous]);
}

#[test]
fn closed_short_horizon_extremal_starts_and_ends_regular() {
    let (spec, sol) = closed_solution(1.2, 48, true);
    let report = structure_report(&spec, &sol, &ArcTolerances::default()).unwrap();
    let seg = &report.segmentation;
    assert!(!seg.is_ambiguous(), "{seg:?}");
    assert_partition(seg, 0, 0.0, 1.2);
    assert!(seg.first(0).unwrap().label.is_regular() && seg.last(0).unwrap().label.is_regular());
    assert!(seg
        .junctions
        .iter()
        .all(|j| j.kind == JunctionKind::Corner && j.on_node));
    assert_eq!(report.verdict, Verdict::Pass, "{}", report.reason);
    assert_eq!(report.balance.surplus(), 0);
    let scale = sol.residuals.pf_scale;
    assert!(
        report.corners.max_pf_jump() < 1e-6 * scale,
        "{:?}",
        report.corners
    );
    assert!(
        report.corners.max_switching() < 1e-6 * scale,
        "{:?}",
        report.corners
    );
    assert!(report.corners.max_costate_jump() < 1e-10);
}

#[test]
fn unpolished_switch_cells_are_split() {
    let (_, sol) = closed_solution(1.2, 48, false);
    let (_, polished) = closed_solution(1.2, 48, true);
    let seg = classify_arcs(&closed_spec(1.2).model, &sol, &ArcTolerances::default());
    let reference = classify_arcs(
        &closed_spec(1.2).model,
        &polished,
        &ArcTolerances::default(),
    );
    assert!(!seg.is_ambiguous(), "{seg:?}");
    assert_eq!(labels_of(&seg, 0), labels_of(&reference, 0));
    assert_partition(&seg, 0, 0.0, 1.2);
    let h = 1.2 / 48.0;
    for (a, b) in seg.junctions.iter().zip(&reference.junctions) {
        assert!(!a.on_node);
        assert!((a.time - b.time).abs() < h, "{} vs {}", a.time, b.time);
    }
}

#[test]
fn constructed_pf_jump_is_reported_exactly() {
    let spec = closed_spec(1.0);
    let model = &spec.model;
    let policy = ControlPolicy::new(
        vec![0.0, 0.4, 1.0],
        vec![vec![0.7, -0.2]],
        vec![Bounds::symmetric(1.0)],
    )
    .unwrap();
    let sol = analyze_policy(&spec, &policy).unwrap();
    let seg = ArcSegmentation {
        segments: vec![
            ArcSegment {
                channel: 0,
                start: 0.0,
                end: 0.4,
                label: Ambiguous,
                intervals: 0..1,
            },
            ArcSegment {
                channel: 0,
                start: 0.4,
                end: 1.0,
                label: Ambiguous,
                intervals: 1..2,
            },
        ],
        junctions: vec![Junction {
            channel: 0,
            time: 0.4,
            kind: JunctionKind::Unresolved,
            node: 1,
            on_node: true,
            branch: None,
        }],
        ambiguous: vec![(0, 0), (0, 1)],
    };
    let report = verify_corner_conditions(model, &sol, &seg);
    let ku = switching_function(model, &sol.costates()[1], &sol.states()[1], 0).unwrap();
    let expected = (0.7 - (-0.2)) * ku.abs();
    assert!(expected > 1e-3);
    assert!(
        (report.junctions[0].pf_jump - expected).abs() < 1e-12,
        "{report:?}"
    );
    assert!(report.junctions[0].costate_jump < 1e-12);
}

#[test]
fn thermal_start_extremal_passes() {
    let th = Thermalization {
        rate: 0.4,
        excited_population: 0.1,
    };
    let (model, rho_td) = two_level_thermal(1.0, th, 1.0, &sigma_z()).unwrap();
    let rho0 = model.basis().density(&rho_td).unwrap();
    let spec = ProblemSpec::terminal(model.clone(), rho0, 1.0).unwrap();
    let initial = ControlPolicy::constant(0.0, 1.0, 40, model.bounds(), &[0.2]).unwrap();
    let sol = solve_terminal(&spec, &initial, &config(40, true)).unwrap();
    let report = structure_report(&spec, &sol, &ArcTolerances::default()).unwrap();
    assert!(report.redundancies.is_empty(), "{:?}", report.redundancies);
    assert_eq!(report.verdict, Verdict::Pass, "{}", report.reason);
    assert!(report.starts_regular && report.ends_regular);
}

#[test]
fn long_closed_horizon_is_a_kinematic_critical_point() {
    // Past the minimal time the optimum reaches ⟨σz⟩ = 1 and [ρ, ψ] = 0.
    let (spec, sol) = closed_solution(8.0, 64, true);
    assert!(sol.objective > 1.0 - 1e-8, "{}", sol.objective);
    let report = structure_report(&spec, &sol, &ArcTolerances::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Degenerate, "{}", report.reason);
    assert!(report
        .redundancies
        .iter()
        .any(|r| matches!(r, Redundancy::KinematicCriticalPoint { .. })));
}

#[test]
fn channel_without_influence_is_singular_and_degenerate() {
    // σz control on a diagonal trajectory: K_u ≡ 0.
    let model = two_level_closed(1.0, 1.0, &sigma_z()).unwrap();
    let b = model.basis().clone();
    let zc = crate::liouville::hamiltonian_superop(&sigma_z(), &b).unwrap();
    let model = crate::liouville::QuantumModel::new(
        b.clone(),
        model.drift().clone(),
        vec![crate::liouville::ControlChannel::new(
            "z",
            zc,
            Bounds::symmetric(1.0),
            crate::liouville::ChannelKind::Coherent,
        )],
        b.vectorize(&sigma_x()).unwrap(),
    )
    .unwrap();
    let rho0 = b.density(&ket_bra(2, 1, 1)).unwrap();
    let spec = ProblemSpec::terminal(model.clone(), rho0, 1.0).unwrap();
    let policy = ControlPolicy::constant(0.0, 1.0, 16, model.bounds(), &[0.3]).unwrap();
    let sol = analyze_policy(&spec, &policy).unwrap();
    let report = structure_report(&spec, &sol, &ArcTolerances::default()).unwrap();
    assert_eq!(labels_of(&report.segmentation, 0), [Singular]);
    assert_eq!(report.counts.beta, 2);
    assert_eq!(report.verdict, Verdict::Degenerate);
}

fn segment(intervals: std::ops::Range<usize>) -> ArcSegment {
    ArcSegment {
        channel: 0,
        start: intervals.start as f64,
        end: intervals.end as f64,
        label: Singular,
        intervals,
    }
}

fn line_policy(values: Vec<f64>) -> ControlPolicy {
    let n = values.len();
    ControlPolicy::new(
        (0..=n).map(|i| i as f64).collect(),
        vec![values],
        vec![Bounds::symmetric(2.0)],
    )
    .unwrap()
}

#[test]
fn smoothness_probe_of_constant_and_stepped_controls() {
    let p = line_policy(vec![0.4; 12]);
    let r = smoothness_probe(&p, &segment(0..12), 1e-6).unwrap();
    assert_eq!(r.jumps, [0.0; 4]);
    let mut v = vec![0.4; 12];
    v[7..].iter_mut().for_each(|x| *x += 0.25);
    let r = smoothness_probe(&line_policy(v), &segment(0..12), 1e-6).unwrap();
    assert!((r.jumps[0] - 0.25).abs() < 1e-15);
    assert!((r.normalized[0] - 0.25 / 0.65).abs() < 1e-12);
}

#[test]
fn smoothness_probe_needs_eight_intervals() {
    let p = line_policy(vec![0.4; 12]);
    assert!(matches!(
        smoothness_probe(&p, &segment(2..9), 1e-6),
        Err(Error::InsufficientResolution(_))
    ));
}

#[test]
fn smooth_control_has_small_high_order_differences() {
    let n = 64;
    let v: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64 * 3.0).sin()).collect();
    let r = smoothness_probe(&line_policy(v), &segment(0..n), 1e-6).unwrap();
    let h = 3.0 / n as f64;
    for (order, j) in r.jumps.iter().enumerate() {
        assert!(*j <= 1.01 * h.powi(order as i32 + 1), "order {order}: {j}");
    }
}

#[test]
fn bang_singular_bang_extremal() {
    let th = Thermalization {
        rate: 0.4,
        excited_population: 0.1,
    };
    let (model, rho_td) = two_level_thermal(1.0, th, 1.0, &sigma_z()).unwrap();
    let rho0 = model.basis().density(&rho_td).unwrap();
    let spec = ProblemSpec::terminal(model.clone(), rho0, 4.0).unwrap();
    let initial = ControlPolicy::constant(0.0, 4.0, 64, model.bounds(), &[0.2]).unwrap();
    let sol = solve_terminal(&spec, &initial, &config(64, true)).unwrap();
    let tol = ArcTolerances::default();
    let report = structure_report(&spec, &sol, &tol).unwrap();
    let seg = &report.segmentation;
    assert_eq!(labels_of(seg, 0), [RegularMin, Singular, RegularMax]);
    assert_partition(seg, 0, 0.0, 4.0);
    let kinds: Vec<JunctionKind> = seg.junctions.iter().map(|j| j.kind).collect();
    assert_eq!(
        kinds,
        [
            JunctionKind::RegularToSingular,
            JunctionKind::SingularToRegular
        ]
    );
    assert!(report.branch_orders.is_empty());
    assert_eq!(report.verdict, Verdict::Pass, "{}", report.reason);
    // Every singular interval satisfies the label's own threshold.
    let scale = (0..sol.policy.intervals())
        .map(|m| sol.diagnostics.switching_on(0, m).abs())
        .fold(0.0, f64::max);
    assert!(report.corners.singular_switching <= tol.eps_k * scale);
    let sewing = &report.corners.junctions[0];
    assert!(sewing.switching_rate.is_some());
    assert!(
        report.corners.max_pf_jump() < 1e-5 * sol.residuals.pf_scale,
        "{:?}",
        report.corners
    );
    // The singular control is a smooth ramp.
    assert_eq!(report.smoothness.len(), 1);
    assert!(
        report.smoothness[0].normalized[0] < 0.2,
        "{:?}",
        report.smoothness
    );
}
