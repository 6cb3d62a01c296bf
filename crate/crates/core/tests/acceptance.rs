// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs for several minutes in release-level optimization.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use qpmp_core::arcs::{
    count_parameters_constraints, structure_report, ArcTolerances, StructureCounts, Verdict,
};
use qpmp_core::dynamics::{propagate_state, ControlPolicy};
use qpmp_core::liouville::{Bounds, CMatrix, HermitianBasis, LiouvilleVector, QuantumModel};
use qpmp_core::models::{
    build_lambda_system, build_two_level, ket_bra, lambda_harmonic_reference, plus_state,
    random_lindblad, sigma_x, sigma_y, sigma_z, two_level_closed, two_level_collision,
    two_level_thermal, CollisionChannelSpec, LambdaSystemParams, RandomLindbladParams,
    Thermalization, TwoLevelSpec, UnitConvention,
};
use qpmp_core::qre::{
    verify_theorem3, verify_theorem4, BangBangSearch, Theorem3Settings, Theorem4Settings,
};
use qpmp_core::solver::{
    adjoint_gradient, detect_spikes, multistart, objective, optimize_free_horizon,
    refine_around_spikes, solve_periodic, theorem2_consistency_check, BoundaryMode,
    ExtremalSolution, ProblemSpec, SolverConfig, SPIKE_THRESHOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDA_PERIOD: f64 = 0.626;
const LAMBDA_GRID: usize = 512;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Converged periodic Λ extremal started from the harmonic reference, and
/// the reference objective.
struct LambdaRun {
    convention: UnitConvention,
    spec: ProblemSpec,
    reference: f64,
    solution: ExtremalSolution,
}

fn lambda_config(intervals: usize, max_iterations: usize) -> SolverConfig {
    SolverConfig {
        intervals,
        max_iterations,
        polish: false,
        ..Default::default()
    }
}

fn lambda_run(convention: UnitConvention, max_iterations: usize) -> LambdaRun {
    let params = LambdaSystemParams {
        convention,
        ..Default::default()
    };
    let model = build_lambda_system(&params).unwrap();
    let spec = ProblemSpec::periodic(model.clone(), LAMBDA_PERIOD).unwrap();
    let href = lambda_harmonic_reference(&params, &model, LAMBDA_PERIOD, LAMBDA_GRID).unwrap();
    let reference = objective(&spec, &href).unwrap();
    let solution =
        solve_periodic(&spec, &href, &lambda_config(LAMBDA_GRID, max_iterations)).unwrap();
    LambdaRun {
        convention,
        spec,
        reference,
        solution,
    }
}

fn criterion1(runs: &[LambdaRun]) -> Outcome {
    let mut pass = false;
    let mut parts = Vec::new();
    for r in runs {
        let s = &r.solution;
        let ratio = r.reference / s.objective;
        let ok = s.convergence.converged && (0.88..=0.98).contains(&ratio);
        pass |= ok;
        parts.push(format!(
            "{:?}: J_harm {:.6}, J_opt {:.6}, ratio {:.4}, converged {} ({} it, stationarity {:.1e})",
            r.convention,
            r.reference,
            s.objective,
            ratio,
            s.convergence.converged,
            s.convergence.iterations,
            s.convergence.stationarity
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion2(run: &LambdaRun) -> Outcome {
    let sol = &run.solution;
    let check = theorem2_consistency_check(&run.spec, sol, 2, 1e-6).unwrap();
    let long = run.spec.with_horizon(2.0 * LAMBDA_PERIOD).unwrap();
    let warm = sol.policy.repeated(2).unwrap();
    let re = solve_periodic(&long, &warm, &lambda_config(2 * LAMBDA_GRID, 2000)).unwrap();
    let gain = re.objective - sol.objective;
    let pass = sol.convergence.converged && gain >= -1e-8 && check.violation > 0.0;
    Outcome::new(
        pass,
        format!(
            "J(T) {:.9}, J(2T) {:.9}, gain {gain:.3e}; terminal violation of the doubled extremal {:.3e}",
            sol.objective, re.objective, check.violation
        ),
    )
}

fn criterion3(run: &LambdaRun) -> Outcome {
    let sol = &run.solution;
    let spikes = detect_spikes(&sol.policy, 0, SPIKE_THRESHOLD, true).unwrap();
    let refined = refine_around_spikes(&sol.policy, &spikes, 8, 2, true).unwrap();
    let fine = solve_periodic(
        &run.spec,
        &refined,
        &lambda_config(refined.intervals(), 20000),
    )
    .unwrap();
    let fine_spikes = detect_spikes(&fine.policy, 0, SPIKE_THRESHOLD, true).unwrap();
    let areas = |s: &[qpmp_core::solver::Spike]| {
        s.iter()
            .map(|x| format!("{:.3}π@{:.4}", x.area / PI, x.peak_time))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let within = |a: f64| (a.abs() - PI).abs() <= 0.2 * PI;
    let pass = fine.convergence.converged
        && !fine_spikes.is_empty()
        && fine_spikes.iter().all(|s| within(s.area));
    Outcome::new(
        pass,
        format!(
            "M={}: {} spikes [{}]; refined M={} (converged {}, J {:.9}): {} spikes [{}]",
            sol.policy.intervals(),
            spikes.len(),
            areas(&spikes),
            fine.policy.intervals(),
            fine.convergence.converged,
            fine.objective,
            fine_spikes.len(),
            areas(&fine_spikes)
        ),
    )
}

fn terminal_config(intervals: usize) -> SolverConfig {
    SolverConfig {
        intervals,
        gradient_tol: 1e-9,
        ..Default::default()
    }
}

fn state(model: &QuantumModel, rho: &CMatrix) -> LiouvilleVector {
    model.basis().density(rho).unwrap()
}

const THERMAL: Thermalization = Thermalization {
    rate: 0.4,
    excited_population: 0.1,
};

/// Best converged extremal over an optional constant start and seeded random starts.
fn best_terminal(
    spec: &ProblemSpec,
    intervals: usize,
    level: Option<f64>,
) -> Option<ExtremalSolution> {
    let supplied: Vec<ControlPolicy> = level
        .map(|u| {
            let levels = vec![u; spec.model.num_controls()];
            ControlPolicy::constant(0.0, spec.horizon(), intervals, spec.model.bounds(), &levels)
                .unwrap()
        })
        .into_iter()
        .collect();
    let (cfg, random) = if supplied.is_empty() {
        (
            SolverConfig {
                intervals,
                ..Default::default()
            },
            4,
        )
    } else {
        (terminal_config(intervals), 0)
    };
    multistart(spec, &cfg, &supplied, random, 0)
        .into_iter()
        .filter_map(|o| o.result.ok())
        .filter(|s| s.convergence.converged)
        .max_by(|a, b| a.objective.total_cmp(&b.objective))
}

struct Testbed {
    name: String,
    spec: ProblemSpec,
    intervals: usize,
    start: Option<f64>,
    expect_degenerate: bool,
}

fn theorem1_testbeds() -> Vec<Testbed> {
    let mut v = Vec::new();
    let closed = two_level_closed(1.0, 1.0, &sigma_z()).unwrap();
    for t in [1.0, 1.2] {
        v.push(Testbed {
            name: format!("closed T={t}"),
            spec: ProblemSpec::terminal(closed.clone(), state(&closed, &ket_bra(2, 1, 1)), t)
                .unwrap(),
            intervals: 48,
            start: Some(0.3),
            expect_degenerate: false,
        });
    }
    let (thermal, rho_td) = two_level_thermal(1.0, THERMAL, 1.0, &sigma_z()).unwrap();
    for t in [1.0, 2.0] {
        v.push(Testbed {
            name: format!("thermal start T={t}"),
            spec: ProblemSpec::terminal(thermal.clone(), state(&thermal, &rho_td), t).unwrap(),
            intervals: 48,
            start: Some(0.2),
            expect_degenerate: false,
        });
    }
    for seed in [1, 2, 4] {
        let (model, rho0) = random_lindblad(&RandomLindbladParams {
            seed,
            ..Default::default()
        })
        .unwrap();
        v.push(Testbed {
            name: format!("random 3-level seed {seed} T=2"),
            spec: ProblemSpec::terminal(model.clone(), state(&model, &rho0), 2.0).unwrap(),
            intervals: 64,
            start: None,
            expect_degenerate: false,
        });
    }
    v.push(Testbed {
        name: "closed T=8".into(),
        spec: ProblemSpec::terminal(closed.clone(), state(&closed, &ket_bra(2, 1, 1)), 8.0)
            .unwrap(),
        intervals: 64,
        start: Some(0.3),
        expect_degenerate: true,
    });
    v
}

fn criterion4(solved: &mut Vec<ExtremalSolution>) -> Outcome {
    let tol = ArcTolerances::default();
    let mut pass = true;
    let mut nondegenerate = 0;
    let mut parts = Vec::new();
    for tb in theorem1_testbeds() {
        let Some(sol) = best_terminal(&tb.spec, tb.intervals, tb.start) else {
            pass = false;
            parts.push(format!("{}: no converged start", tb.name));
            continue;
        };
        let r = structure_report(&tb.spec, &sol, &tol).unwrap();
        let ok = if tb.expect_degenerate {
            r.verdict == Verdict::Degenerate
        } else {
            r.verdict == Verdict::Pass && r.starts_regular && r.ends_regular
        };
        if ok && !tb.expect_degenerate {
            nondegenerate += 1;
        }
        pass &= ok && r.verdict != Verdict::Fail;
        let labels: Vec<&str> = r
            .segmentation
            .segments
            .iter()
            .map(|s| s.label.as_str())
            .collect();
        parts.push(format!("{}: {} [{}]", tb.name, r.verdict, labels.join(",")));
        if !tb.expect_degenerate {
            solved.push(sol);
        }
    }
    pass &= nondegenerate >= 5;
    Outcome::new(
        pass,
        format!(
            "{nondegenerate} regular-terminated PASS; {}",
            parts.join("; ")
        ),
    )
}

fn pump_pair(horizon: f64) -> ProblemSpec {
    let model = two_level_collision(
        1.0,
        &[ket_bra(2, 0, 0), plus_state()],
        &[Bounds::new(0.0, 2.0), Bounds::new(0.0, 2.0)],
        &sigma_y(),
    )
    .unwrap();
    let rho0 = state(&model, &ket_bra(2, 1, 1));
    ProblemSpec::terminal(model, rho0, horizon).unwrap()
}

fn criterion5() -> Outcome {
    let settings = Theorem3Settings {
        search: BangBangSearch {
            max_switches: 2,
            grid: 64,
            cap: 20_000_000,
            keep_table: false,
        },
        ..Default::default()
    };
    let cfg = SolverConfig {
        intervals: 64,
        ..Default::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [1.0, 3.0] {
        let r = verify_theorem3(&pump_pair(t), &cfg, &settings).unwrap();
        let min_fraction = r.bang_fractions.iter().copied().fold(1.0, f64::min);
        let ok = r.verdict == Verdict::Pass && min_fraction >= 0.99 && r.relative_gap.abs() <= 1e-4;
        pass &= ok;
        parts.push(format!(
            "T={t}: {} (oracle J {:.9} over {} schedules, relative gap {:.2e}, min bang fraction {:.4})",
            r.verdict, r.oracle.objective, r.oracle.candidates, r.relative_gap, min_fraction
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn cooling_drive(observable: &CMatrix, rho0: &CMatrix, horizon: f64) -> ProblemSpec {
    let model = build_two_level(&TwoLevelSpec {
        delta: 1.0,
        coherent: Some(Bounds::symmetric(1.0)),
        thermal: None,
        collisions: vec![CollisionChannelSpec {
            name: "cool".into(),
            target: ket_bra(2, 0, 0),
            bounds: Bounds::new(0.0, 2.0),
        }],
        observable: observable.clone(),
    })
    .unwrap();
    let rho0 = state(&model, rho0);
    ProblemSpec::terminal(model, rho0, horizon).unwrap()
}

fn criterion6() -> Outcome {
    let cfg = SolverConfig {
        intervals: 64,
        ..Default::default()
    };
    let settings = Theorem4Settings::default();
    let mut pass = true;
    let mut parts = Vec::new();
    let testbeds = [
        (
            "sigma-z from |1>, T=2",
            cooling_drive(&sigma_z(), &ket_bra(2, 1, 1), 2.0),
        ),
        (
            "sigma-x from |1>, T=3",
            cooling_drive(&sigma_x(), &ket_bra(2, 1, 1), 3.0),
        ),
        (
            "sigma-y from |1>, T=2",
            cooling_drive(&sigma_y(), &ket_bra(2, 1, 1), 2.0),
        ),
    ];
    for (name, spec) in testbeds {
        let r = verify_theorem4(&spec, 1, &cfg, &settings).unwrap();
        let dj = r.windows.iter().map(|w| w.max_delta_j).fold(0.0, f64::max);
        pass &= r.verdict == Verdict::Pass && dj < 1e-8;
        parts.push(format!(
            "{name}: {} ({} non-regular windows, max |dJ| {dj:.1e})",
            r.verdict,
            r.windows.len()
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

/// Largest relative deviation of the adjoint gradient from central differences.
fn fd_error(spec: &ProblemSpec, policy: &ControlPolicy) -> f64 {
    let g = adjoint_gradient(spec, policy).unwrap();
    let eps = 1e-6;
    let gmax = g.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut worst = 0.0f64;
    for k in 0..policy.channels() {
        for m in 0..policy.intervals() {
            let mut p = policy.clone();
            p.set(k, m, policy.value(k, m) + eps);
            let jp = objective(spec, &p).unwrap();
            p.set(k, m, policy.value(k, m) - eps);
            let jm = objective(spec, &p).unwrap();
            let fd = (jp - jm) / (2.0 * eps);
            worst = worst.max((fd - g[k][m]).abs() / g[k][m].abs().max(1e-3 * gmax));
        }
    }
    worst
}

fn random_policy(model: &QuantumModel, t: f64, m: usize, seed: u64) -> ControlPolicy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p =
        ControlPolicy::constant(0.0, t, m, model.bounds(), &vec![0.0; model.num_controls()])
            .unwrap();
    for k in 0..model.num_controls() {
        let b = model.channel(k).bounds;
        for i in 0..m {
            p.set(k, i, rng.random_range(b.lower..=b.upper));
        }
    }
    p
}

fn criterion7(extremals: &[ExtremalSolution]) -> Outcome {
    let mut checks: Vec<(String, bool)> = Vec::new();

    let gram = (2..=8)
        .map(|n| HermitianBasis::new(n).unwrap().gram_deviation())
        .fold(0.0, f64::max);
    checks.push((format!("Gram {gram:.1e}"), gram < 1e-12));

    let (thermal, _) = two_level_thermal(1.0, THERMAL, 1.0, &sigma_z()).unwrap();
    let mut models = vec![
        two_level_closed(1.0, 1.0, &sigma_z()).unwrap(),
        thermal.clone(),
        pump_pair(1.0).model,
        build_lambda_system(&LambdaSystemParams::default()).unwrap(),
    ];
    for seed in 0..3 {
        let params = RandomLindbladParams {
            dim: 4,
            controls: 2,
            seed,
            ..Default::default()
        };
        models.push(random_lindblad(&params).unwrap().0);
    }
    let trace_row = models
        .iter()
        .flat_map(|m| {
            let b = m.basis().clone();
            std::iter::once(m.drift().trace_row_norm(&b)).chain(
                m.channels()
                    .iter()
                    .map(move |c| c.generator.trace_row_norm(&b)),
            )
        })
        .fold(0.0, f64::max);
    checks.push((format!("trace rows {trace_row:.1e}"), trace_row < 1e-11));

    // Rabi: H = u σx from |0⟩ gives P₁(t) = sin²(ut).
    let rabi = two_level_closed(0.0, 10.0, &sigma_z()).unwrap();
    let u = 1.3;
    let p = ControlPolicy::constant(0.0, 4.0, 200, rabi.bounds(), &[u]).unwrap();
    let tr = propagate_state(&rabi, &p, &state(&rabi, &ket_bra(2, 0, 0))).unwrap();
    let excited = rabi.basis().vectorize(&ket_bra(2, 1, 1)).unwrap();
    let rabi_err = tr
        .times()
        .iter()
        .zip(tr.states())
        .map(|(t, r)| (excited.dot(r) - (u * t).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    checks.push((format!("Rabi {rabi_err:.1e}"), rabi_err < 1e-9));

    // Pure relaxation at rate γ out of the upper level |0⟩: P₀(t) = e^{−γt}.
    let gamma = 0.7;
    let relax = Thermalization {
        rate: gamma,
        excited_population: 0.0,
    };
    let (decay, _) = two_level_thermal(0.0, relax, 1.0, &sigma_z()).unwrap();
    let p = ControlPolicy::constant(0.0, 5.0, 100, decay.bounds(), &[0.0]).unwrap();
    let tr = propagate_state(&decay, &p, &state(&decay, &ket_bra(2, 0, 0))).unwrap();
    let excited = decay.basis().vectorize(&ket_bra(2, 0, 0)).unwrap();
    let decay_err = tr
        .times()
        .iter()
        .zip(tr.states())
        .map(|(t, r)| (excited.dot(r) - (-gamma * t).exp()).abs())
        .fold(0.0, f64::max);
    checks.push((format!("decay {decay_err:.1e}"), decay_err < 1e-9));

    let mut fd = 0.0f64;
    for seed in 0..3 {
        let (model, rho0) = random_lindblad(&RandomLindbladParams {
            dim: 3,
            controls: 2,
            control_limit: 5.0,
            seed,
            ..Default::default()
        })
        .unwrap();
        let terminal = ProblemSpec::terminal(model.clone(), state(&model, &rho0), 1.5).unwrap();
        fd = fd.max(fd_error(&terminal, &random_policy(&model, 1.5, 10, seed)));
        let periodic = ProblemSpec::periodic(model.clone(), 2.0).unwrap();
        fd = fd.max(fd_error(
            &periodic,
            &random_policy(&model, 2.0, 10, seed + 10),
        ));
    }
    checks.push((format!("gradient vs FD {fd:.1e}"), fd < 1e-5));

    let spreads: Vec<f64> = extremals
        .iter()
        .map(|s| s.residuals.relative_pf_spread())
        .collect();
    let spread = spreads.iter().copied().fold(0.0, f64::max);
    let listed: Vec<String> = spreads.iter().map(|s| format!("{s:.0e}")).collect();
    checks.push((
        format!(
            "K spread {spread:.1e} over {} extremals [{}]",
            extremals.len(),
            listed.join(" ")
        ),
        !extremals.is_empty() && spread < 1e-6,
    ));

    let mut residual = extremals
        .iter()
        .map(|s| s.residuals.transversality)
        .fold(0.0, f64::max);
    let periodic = ProblemSpec::periodic(thermal.clone(), 3.0).unwrap();
    let start = ControlPolicy::constant(0.0, 3.0, 48, thermal.bounds(), &[0.2]).unwrap();
    let psol = solve_periodic(&periodic, &start, &terminal_config(48)).unwrap();
    residual = residual
        .max(psol.residuals.transversality)
        .max(psol.residuals.periodicity.unwrap_or(f64::INFINITY));
    checks.push((
        format!("boundary residuals {residual:.1e}"),
        residual < 1e-8,
    ));

    // Free final time, weak relaxation: the inversion peaks once and decays.
    let weak = Thermalization {
        rate: 0.05,
        excited_population: 0.0,
    };
    let (model, rho) = two_level_thermal(1.0, weak, 1.0, &sigma_z()).unwrap();
    let spec = ProblemSpec::new(
        model.clone(),
        BoundaryMode::Terminal {
            initial: state(&model, &rho),
            horizon: 1.0,
            free_time: true,
        },
    )
    .unwrap();
    let initial = ControlPolicy::constant(0.0, 1.0, 48, model.bounds(), &[0.5]).unwrap();
    let (free, _) =
        optimize_free_horizon(&spec, &initial, &terminal_config(48), 4.0, 14.0, 6).unwrap();
    let k_end = free.residuals.pf_final.abs() / free.residuals.pf_scale;
    checks.push((
        format!(
            "free horizon |K|/scale {k_end:.1e} at T={:.4}",
            free.horizon()
        ),
        k_end < 1e-6,
    ));

    let pass = checks.iter().all(|(_, ok)| *ok);
    let detail: Vec<String> = checks
        .into_iter()
        .map(|(d, ok)| if ok { d } else { format!("{d} (FAIL)") })
        .collect();
    Outcome::new(pass, detail.join("; "))
}

/// Surplus after the boundary, junction and free-time terms cancel:
/// `P_branch − C_branch + N_sing − β`, with each order-`s` branch point
/// contributing `s − 1` parameters and `s(s + 3)/2` constraints.
fn surplus_oracle(c: &StructureCounts) -> i64 {
    let branch: i64 = c
        .branch_orders
        .iter()
        .map(|s| (s - 1) - s * (s + 3) / 2)
        .sum();
    branch + c.n_sing - c.beta
}

fn criterion8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for dim in [2, 3] {
        for alpha in [0, 1] {
            let cases = [
                ("regular", vec![], 0, 0, 0, 0),
                ("singular end", vec![], 2, 1, 0, -1),
                ("singular both ends", vec![], 2, 2, 0, -2),
                ("branch s=1", vec![1], 3, 0, 0, -2),
                ("branch s=2", vec![2], 3, 0, 0, -4),
            ];
            for (name, orders, n_spec, beta, n_sing, expected) in cases {
                let c = StructureCounts {
                    dim,
                    n_spec,
                    branch_orders: orders,
                    alpha,
                    beta,
                    n_sing,
                };
                let got = count_parameters_constraints(&c).unwrap().surplus();
                let ok = got == expected && got == surplus_oracle(&c);
                pass &= ok;
                if dim == 2 && alpha == 0 {
                    parts.push(format!("{name}: {got}"));
                }
            }
        }
    }
    Outcome::new(pass, format!("{} (N=2,3; alpha=0,1)", parts.join(", ")))
}

fn report(n: usize, title: &str, started: Instant, o: &Outcome) {
    println!(
        "criterion {n} {}: {title}: {} [{:.0}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        started.elapsed().as_secs_f64()
    );
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut results = Vec::new();
    let mut run = |n: usize, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        report(n, title, t, &o);
        results.push((n, o.pass));
    };

    let t = Instant::now();
    let lambda = [
        lambda_run(UnitConvention::OrdinaryFrequency, 20000),
        lambda_run(UnitConvention::Angular, 5000),
    ];
    eprintln!("lambda extremals: {:.0}s", t.elapsed().as_secs_f64());
    run(1, "lambda harmonic-reference ratio", &mut || {
        criterion1(&lambda)
    });
    run(2, "period doubling", &mut || criterion2(&lambda[0]));
    run(3, "spike areas", &mut || criterion3(&lambda[0]));
    let mut extremals = Vec::new();
    run(4, "theorem 1 structure", &mut || criterion4(&mut extremals));
    extremals.push(lambda[0].solution.clone());
    run(5, "theorem 3 bang-bang", &mut criterion5);
    run(6, "theorem 4 collision channel", &mut criterion6);
    run(7, "numerical core properties", &mut || {
        criterion7(&extremals)
    });
    run(8, "parameter/constraint counting", &mut criterion8);

    let failed: Vec<String> = results
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n.to_string())
        .collect();
    if failed.is_empty() {
        println!("acceptance: all 8 criteria PASS");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL on criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
