// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each returns the report it printed.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use qpmp_core::arcs::{structure_report, ArcLabel, StructureReport, Verdict};
use qpmp_core::dynamics::ControlPolicy;
use qpmp_core::liouville::LiouvilleVector;
use qpmp_core::models::lambda_harmonic_reference;
use qpmp_core::qre::{
    brute_force_bangbang, verify_theorem3, verify_theorem4, Theorem3Settings, Theorem4Settings,
};
use qpmp_core::solver::{
    analyze_policy, multistart, optimize_free_horizon, random_policy, solve,
    theorem2_consistency_check, BoundaryMode, ExtremalSolution, ProblemSpec, SolverConfig,
    StartOutcome,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ModeConfig, ModelConfig, Problem, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{fmt_f64, Report};
use crate::tables::{interval_labels, write_diagnostics, write_trajectory, TrajectoryTable};

pub const CONFIG_COPY_HEADER: &str = "# qpmp-config v1";

/// Tolerance of the period-doubling comparison in `verify 2`.
pub const DOUBLING_TOL: f64 = 1e-8;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    /// Solver grid, or the switch grid for `qre-bangbang`.
    pub grid: Option<usize>,
}

struct Loaded {
    cfg: RunConfig,
    path: PathBuf,
    text: String,
}

fn load(path: &Path, ov: &Overrides, grid_is_switch_grid: bool) -> CliResult<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = RunConfig::from_toml(&text, path)?;
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(n) = ov.starts {
        cfg.starts = n;
        cfg.validate(path)?;
    }
    if let Some(g) = ov.grid {
        let bad = if grid_is_switch_grid { g < 2 } else { g == 0 };
        if bad {
            return Err(CliError::Config {
                path: path.to_path_buf(),
                message: format!("--grid {g} is too small"),
            });
        }
        if grid_is_switch_grid {
            cfg.qre.grid = Some(g);
        } else {
            cfg.solver.intervals = Some(g);
        }
    }
    Ok(Loaded {
        cfg,
        path: path.to_path_buf(),
        text,
    })
}

/// Exclusive use of an output directory for the lifetime of a run.
struct OutputDir {
    dir: PathBuf,
    lock: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    fn claim(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let lock = dir.join(".qpmp.lock");
        fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock)
            .map_err(|e| CliError::io(&lock, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            lock,
            files: Vec::new(),
        })
    }

    fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    ) -> CliResult<()> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w)
            .and_then(|_| std::io::Write::flush(&mut w))
            .map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_text(&mut self, name: &str, text: &str) -> CliResult<()> {
        self.write_with(name, |w| std::io::Write::write_all(w, text.as_bytes()))
    }

    fn copy_config(&mut self, loaded: &Loaded) -> CliResult<()> {
        let text = format!(
            "{CONFIG_COPY_HEADER}\n# source: {}\n{}",
            loaded.path.display(),
            loaded.text
        );
        self.write_text("config.toml", &text)
    }

    /// Writes `report` with the manifest of every file written so far.
    fn finish(mut self, name: &str, report: &mut Report) -> CliResult<()> {
        let mut files = self.files.clone();
        files.push(name.to_string());
        report.set("files", files.join(" "));
        self.write_text(name, &report.to_string())
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

fn labels_of(report: &StructureReport, solution: &ExtremalSolution) -> Vec<Vec<ArcLabel>> {
    (0..solution.policy.channels())
        .map(|k| interval_labels(&report.segmentation, &solution.policy, k))
        .collect()
}

fn put_solution(r: &mut Report, prefix: &str, s: &ExtremalSolution) {
    r.set(format!("{prefix}converged"), s.convergence.converged);
    r.set_f64(format!("{prefix}objective"), s.objective);
    r.set_f64(format!("{prefix}horizon"), s.horizon());
    r.set(format!("{prefix}iterations"), s.convergence.iterations);
    r.set_f64(format!("{prefix}stationarity"), s.convergence.stationarity);
    r.set(format!("{prefix}polished"), s.convergence.polished);
    let res = &s.residuals;
    r.set_f64(format!("{prefix}transversality"), res.transversality);
    if let Some(p) = res.periodicity {
        r.set_f64(format!("{prefix}periodicity"), p);
    }
    r.set_f64(format!("{prefix}trace_residual"), res.trace);
    r.set_f64(format!("{prefix}pf_initial"), res.pf_initial);
    r.set_f64(format!("{prefix}pf_final"), res.pf_final);
    r.set_f64(
        format!("{prefix}relative_pf_spread"),
        res.relative_pf_spread(),
    );
}

/// `structure.*` keys.
fn put_structure(r: &mut Report, s: &StructureReport) {
    r.set("structure.verdict", s.verdict);
    r.set("structure.reason", &s.reason);
    let seg = &s.segmentation;
    let segments: Vec<String> = seg
        .segments
        .iter()
        .map(|a| {
            format!(
                "u{}:{}[{},{}]",
                a.channel + 1,
                a.label.as_str(),
                fmt_f64(a.start),
                fmt_f64(a.end)
            )
        })
        .collect();
    r.set("structure.segments", segments.join(" "));
    let junctions: Vec<String> = seg
        .junctions
        .iter()
        .map(|j| format!("u{}:{}@{}", j.channel + 1, j.kind.as_str(), fmt_f64(j.time)))
        .collect();
    r.set("structure.junctions", junctions.join(" "));
    r.set("structure.ambiguous_intervals", seg.ambiguous.len());
    r.set("structure.starts_regular", s.starts_regular);
    r.set("structure.ends_regular", s.ends_regular);
    let orders: Vec<String> = s.branch_orders.iter().map(|o| o.to_string()).collect();
    r.set("structure.branch_orders", orders.join(" "));
    let c = &s.counts;
    r.set("structure.n_spec", c.n_spec);
    r.set("structure.n_sing", c.n_sing);
    r.set("structure.alpha", c.alpha);
    r.set("structure.beta", c.beta);
    r.set("structure.p_total", s.balance.p_total);
    r.set("structure.c_total", s.balance.c_total);
    r.set("structure.surplus", s.balance.surplus());
    let red: Vec<String> = s.redundancies.iter().map(|x| x.to_string()).collect();
    r.set("structure.redundancies", red.join("; "));
    r.set_f64("structure.max_corner_pf_jump", s.corners.max_pf_jump());
    r.set_f64(
        "structure.max_corner_costate_jump",
        s.corners.max_costate_jump(),
    );
    let smooth = s
        .smoothness
        .iter()
        .map(|p| p.max_normalized())
        .fold(0.0, f64::max);
    r.set_f64("structure.max_smoothness_jump", smooth);
    r.set_f64("structure.relative_pf_spread", s.relative_pf_spread);
}

fn numerical(stage: impl Into<String>) -> impl FnOnce(qpmp_core::Error) -> CliError {
    let stage = stage.into();
    move |e| CliError::numerical(stage, e)
}

/// Initial policy of start `i`: seeded random levels on the solver grid.
fn start_policy(
    spec: &ProblemSpec,
    config: &SolverConfig,
    seed: u64,
    i: usize,
) -> qpmp_core::Result<ControlPolicy> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
    random_policy(spec, config.intervals, &mut rng)
}

/// The harmonic reference control of a `lambda` model with `reference_start`.
fn reference_start(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    config: &SolverConfig,
) -> Option<qpmp_core::Result<ControlPolicy>> {
    match &cfg.model {
        ModelConfig::Lambda {
            reference_start: true,
            ..
        } => {
            let params = cfg.model.lambda_params()?;
            Some(lambda_harmonic_reference(
                &params,
                &spec.model,
                spec.horizon(),
                config.intervals,
            ))
        }
        _ => None,
    }
}

fn run_starts(cfg: &RunConfig, problem: &Problem, config: &SolverConfig) -> Vec<StartOutcome> {
    let spec = &problem.spec;
    if !problem.free {
        let supplied = match reference_start(cfg, spec, config) {
            Some(Ok(p)) => vec![p],
            Some(Err(e)) => {
                return vec![StartOutcome {
                    index: 0,
                    seed: None,
                    result: Err(e),
                }]
            }
            None => Vec::new(),
        };
        return multistart(spec, config, &supplied, cfg.starts, cfg.seed);
    }
    let [lo, hi] = cfg.problem.bracket.expect("validated");
    (0..cfg.starts)
        .map(|i| StartOutcome {
            index: i,
            seed: Some(cfg.seed.wrapping_add(i as u64)),
            result: start_policy(spec, config, cfg.seed, i)
                .and_then(|p| optimize_free_horizon(spec, &p, config, lo, hi, cfg.problem.scan))
                .map(|(s, _)| s),
        })
        .collect()
}

/// Index of the converged start with the largest objective.
fn best_converged(outcomes: &[StartOutcome]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Ok(s) = &o.result {
            if s.convergence.converged && best.is_none_or(|(_, j)| s.objective > j) {
                best = Some((i, s.objective));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn no_start_converged(stage: &str, outcomes: Vec<StartOutcome>) -> CliError {
    if outcomes.iter().all(|o| o.result.is_err()) {
        let o = outcomes.into_iter().next().expect("at least one start");
        return CliError::numerical(format!("{stage} start {}", o.index), o.result.unwrap_err());
    }
    let n = outcomes.len();
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    CliError::NoConvergence(format!(
        "{stage}: {} of {n} starts stopped early, {failed} failed",
        n - failed
    ))
}

/// `solve-terminal` and `solve-periodic`. Writes one trajectory and
/// diagnostics table per successful start plus `report.txt`.
pub fn solve_command(
    config_path: &Path,
    out: &Path,
    mode: ModeConfig,
    ov: &Overrides,
) -> CliResult<Report> {
    let loaded = load(config_path, ov, false)?;
    let cfg = &loaded.cfg;
    let problem = cfg.problem(&loaded.path, Some(mode))?;
    let config = cfg.solver_config();
    let tol = cfg.arc_tolerances();
    let stage = format!("solve-{}", mode.as_str());
    let mut dir = OutputDir::claim(out)?;
    dir.copy_config(&loaded)?;

    let outcomes = run_starts(cfg, &problem, &config);
    let mut report = Report::new();
    report.set("command", &stage);
    report.set("model", cfg.model.id());
    report.set("mode", mode.as_str());
    report.set("free_horizon", problem.free);
    report.set("seed", cfg.seed);
    report.set("starts", cfg.starts);
    report.set("intervals", config.intervals);
    let best = best_converged(&outcomes);
    let mut best_structure = None;
    for o in &outcomes {
        let p = format!("start.{}.", o.index);
        if let Some(s) = o.seed {
            report.set(format!("{p}seed"), s);
        }
        match &o.result {
            Err(e) => report.set(format!("{p}error"), e),
            Ok(s) => {
                put_solution(&mut report, &p, s);
                let st = structure_report(&problem.spec, s, &tol)
                    .map_err(numerical(format!("{stage} classify")))?;
                let labels = labels_of(&st, s);
                dir.write_with(&format!("trajectory-{:02}.csv", o.index), |w| {
                    write_trajectory(w, s, &labels)
                })?;
                dir.write_with(&format!("diagnostics-{:02}.csv", o.index), |w| {
                    write_diagnostics(w, s)
                })?;
                if Some(o.index) == best.map(|b| outcomes[b].index) {
                    best_structure = Some(st);
                }
            }
        }
    }
    match (best, best_structure) {
        (Some(b), Some(st)) => {
            report.set("best_start", outcomes[b].index);
            report.set_f64(
                "best_objective",
                outcomes[b]
                    .result
                    .as_ref()
                    .map_or(f64::NAN, |s| s.objective),
            );
            put_structure(&mut report, &st);
            dir.finish("report.txt", &mut report)?;
            Ok(report)
        }
        _ => {
            report.set("best_start", "none");
            dir.finish("report.txt", &mut report)?;
            Err(no_start_converged(&stage, outcomes))
        }
    }
}

/// Rebuilds the problem behind a trajectory table.
fn table_problem(
    table: &TrajectoryTable,
    cfg: &RunConfig,
    cfg_path: &Path,
    file: &Path,
) -> CliResult<(ProblemSpec, ControlPolicy)> {
    let fmt_err = |message: String| CliError::Format {
        path: file.to_path_buf(),
        message,
    };
    let mode = match table.mode.as_deref() {
        Some("terminal") => ModeConfig::Terminal,
        Some("periodic") => ModeConfig::Periodic,
        Some(m) => return Err(fmt_err(format!("unknown mode {m:?}"))),
        None => cfg.problem.mode.unwrap_or(ModeConfig::Terminal),
    };
    let (model, _) = cfg.build_model(cfg_path)?;
    if table.channels() != model.num_controls() {
        return Err(fmt_err(format!(
            "{} control columns, the model has {} channels",
            table.channels(),
            model.num_controls()
        )));
    }
    let d = model.size();
    if table.initial_state().len() != d {
        return Err(fmt_err(format!(
            "{} state columns, the model needs {d}",
            table.initial_state().len()
        )));
    }
    let policy = ControlPolicy::new(table.times.clone(), table.controls.clone(), model.bounds())
        .map_err(|e| fmt_err(format!("controls: {e}")))?;
    let boundary = match mode {
        ModeConfig::Terminal => BoundaryMode::Terminal {
            initial: LiouvilleVector::new(DVector::from_column_slice(table.initial_state())),
            horizon: policy.duration(),
            free_time: cfg.problem.free,
        },
        ModeConfig::Periodic => BoundaryMode::Periodic {
            period: policy.duration(),
            free_period: cfg.problem.free,
        },
    };
    let spec =
        ProblemSpec::new(model, boundary).map_err(|e| fmt_err(format!("initial state: {e}")))?;
    Ok((spec, policy))
}

/// `classify`: re-analyses the controls of a trajectory table and reports
/// its arc structure. With `out`, also writes the re-analysed table.
pub fn classify_command(
    file: &Path,
    config_path: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<Report> {
    let text = fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
    let table = TrajectoryTable::parse(&text).map_err(|e| CliError::Format {
        path: file.to_path_buf(),
        message: e.to_string(),
    })?;
    let cfg_path = match config_path {
        Some(p) => p.to_path_buf(),
        None => file.parent().unwrap_or(Path::new(".")).join("config.toml"),
    };
    let cfg = RunConfig::load(&cfg_path)?;
    let (spec, policy) = table_problem(&table, &cfg, &cfg_path, file)?;
    let solution = analyze_policy(&spec, &policy).map_err(numerical("classify"))?;
    let st =
        structure_report(&spec, &solution, &cfg.arc_tolerances()).map_err(numerical("classify"))?;

    let mut report = Report::new();
    report.set("command", "classify");
    report.set("source", file.display());
    report.set(
        "mode",
        if solution.periodic {
            "periodic"
        } else {
            "terminal"
        },
    );
    report.set("intervals", policy.intervals());
    report.set_f64("objective", solution.objective);
    report.set_f64("horizon", solution.horizon());
    let mismatch = table
        .states
        .iter()
        .zip(solution.states())
        .filter_map(|(f, s)| {
            f.as_ref()
                .map(|f| (DVector::from_column_slice(f) - s.coeffs()).amax())
        })
        .fold(0.0, f64::max);
    report.set_f64("state_mismatch", mismatch);
    put_structure(&mut report, &st);
    if let Some(out) = out {
        let mut dir = OutputDir::claim(out)?;
        let labels = labels_of(&st, &solution);
        dir.write_with("trajectory.csv", |w| {
            write_trajectory(w, &solution, &labels)
        })?;
        dir.write_with("diagnostics.csv", |w| write_diagnostics(w, &solution))?;
        if cfg_path != out.join("config.toml") {
            let cfg_text = fs::read_to_string(&cfg_path).map_err(|e| CliError::io(&cfg_path, e))?;
            let loaded = Loaded {
                cfg,
                path: cfg_path,
                text: cfg_text,
            };
            dir.copy_config(&loaded)?;
        }
        dir.finish("report.txt", &mut report)?;
    }
    Ok(report)
}

/// Best converged extremal of the configured problem.
fn best_solution(
    cfg: &RunConfig,
    problem: &Problem,
    config: &SolverConfig,
    stage: &str,
) -> CliResult<ExtremalSolution> {
    let mut outcomes = run_starts(cfg, problem, config);
    match best_converged(&outcomes) {
        Some(b) => Ok(outcomes.swap_remove(b).result.expect("converged")),
        None => Err(no_start_converged(stage, outcomes)),
    }
}

/// `verify <theorem>`: writes `verdict.txt` with `verdict` and `evidence`.
pub fn verify_command(
    theorem: u8,
    config_path: &Path,
    out: &Path,
    ov: &Overrides,
) -> CliResult<Report> {
    let loaded = load(config_path, ov, false)?;
    let cfg = &loaded.cfg;
    let config = cfg.solver_config();
    let stage = format!("verify {theorem}");
    let mut report = Report::new();
    report.set("command", "verify");
    report.set("theorem", theorem);
    report.set("model", cfg.model.id());
    report.set("seed", cfg.seed);
    report.set("starts", cfg.starts);
    match theorem {
        1 => {
            let problem = cfg.problem(&loaded.path, None)?;
            let best = best_solution(cfg, &problem, &config, &stage)?;
            let st = structure_report(&problem.spec, &best, &cfg.arc_tolerances())
                .map_err(numerical(&stage))?;
            report.set("verdict", st.verdict);
            report.set("evidence", &st.reason);
            put_solution(&mut report, "solution.", &best);
            put_structure(&mut report, &st);
        }
        2 => {
            let n = cfg.verify.repetitions.unwrap_or(2);
            let problem = cfg.problem(&loaded.path, Some(ModeConfig::Periodic))?;
            let spec = &problem.spec;
            let best = best_solution(cfg, &problem, &config, &stage)?;
            let check = theorem2_consistency_check(spec, &best, n, config.bound_tol)
                .map_err(numerical(&stage))?;
            let t = best.horizon();
            let long = spec.with_horizon(n as f64 * t).map_err(numerical(&stage))?;
            let warm = best.policy.repeated(n).map_err(numerical(&stage))?;
            let re = solve(&long, &warm, &config)
                .map_err(numerical(format!("{stage} re-optimization")))?;
            let ok = re.objective >= best.objective - DOUBLING_TOL;
            report.set("verdict", if ok { Verdict::Pass } else { Verdict::Fail });
            report.set(
                "evidence",
                format!(
                    "J({n}T) - J(T) = {:.3e}; terminal violation of the repeated policy {:.3e}",
                    re.objective - best.objective,
                    check.violation
                ),
            );
            report.set("repetitions", n);
            report.set_f64("period", t);
            report.set_f64("objective_period", best.objective);
            report.set_f64("objective_repeated", re.objective);
            report.set("repeated_converged", re.convergence.converged);
            report.set_f64("terminal_objective", check.terminal_objective);
            report.set_f64("violation", check.violation);
            report.set_f64("costate_decay_rate", check.decay_rate);
            report.set_f64("contraction", check.contraction);
        }
        3 => {
            let problem = cfg.problem(&loaded.path, None)?;
            let settings = Theorem3Settings {
                starts: cfg.starts,
                seed: cfg.seed,
                search: cfg.bangbang_search(),
                ..Default::default()
            };
            let r =
                verify_theorem3(&problem.spec, &config, &settings).map_err(numerical(&stage))?;
            report.set("verdict", r.verdict);
            report.set("evidence", &r.evidence);
            report.set_f64("oracle_objective", r.oracle.objective);
            report.set("oracle_candidates", r.oracle.candidates);
            report.set_f64("relative_gap", r.relative_gap);
            if let Some(best) = r.solutions.first() {
                put_solution(&mut report, "solution.", best);
            }
            let fractions: Vec<String> = r.bang_fractions.iter().map(|&f| fmt_f64(f)).collect();
            report.set("bang_fractions", fractions.join(" "));
            report.set(
                "krylov_rank",
                format!("{}/{}", r.screen.rank, r.screen.dimension),
            );
        }
        4 => {
            let problem = cfg.problem(&loaded.path, None)?;
            let model = &problem.spec.model;
            let k = match cfg.verify.channel {
                Some(c) if c >= 1 => c - 1,
                Some(c) => {
                    return Err(CliError::Config {
                        path: loaded.path.clone(),
                        message: format!("verify.channel = {c} must be at least 1"),
                    })
                }
                None => (0..model.num_controls())
                    .find(|&k| model.channel(k).is_collision())
                    .ok_or_else(|| CliError::Config {
                        path: loaded.path.clone(),
                        message: "theorem 4 needs a collision channel".into(),
                    })?,
            };
            let d = Theorem4Settings::default();
            let settings = Theorem4Settings {
                starts: cfg.starts,
                seed: cfg.seed,
                perturbations: cfg.verify.perturbations.unwrap_or(d.perturbations),
                amplitude: cfg.verify.amplitude.unwrap_or(d.amplitude),
                tolerances: cfg.arc_tolerances(),
                ..d
            };
            let r =
                verify_theorem4(&problem.spec, k, &config, &settings).map_err(numerical(&stage))?;
            report.set("verdict", r.verdict);
            report.set("evidence", &r.evidence);
            report.set("channel", k + 1);
            if let Some(s) = &r.solution {
                put_solution(&mut report, "solution.", s);
            }
            let labels: Vec<String> = r
                .labels
                .iter()
                .map(|(a, b, l)| format!("{}[{},{}]", l.as_str(), fmt_f64(*a), fmt_f64(*b)))
                .collect();
            report.set("labels", labels.join(" "));
            report.set("windows", r.windows.len());
            let dj = r.windows.iter().map(|w| w.max_delta_j).fold(0.0, f64::max);
            report.set_f64("max_window_delta_j", dj);
            report.set(
                "krylov_rank",
                format!("{}/{}", r.screen.rank, r.screen.dimension),
            );
        }
        _ => {
            return Err(CliError::Config {
                path: loaded.path.clone(),
                message: format!("theorem {theorem} is not one of 1, 2, 3, 4"),
            })
        }
    }
    let mut dir = OutputDir::claim(out)?;
    dir.copy_config(&loaded)?;
    dir.finish("verdict.txt", &mut report)?;
    Ok(report)
}

/// `qre-bangbang`: switch-grid search; writes the best schedule as a
/// trajectory table.
pub fn qre_bangbang_command(config_path: &Path, out: &Path, ov: &Overrides) -> CliResult<Report> {
    let loaded = load(config_path, ov, true)?;
    let cfg = &loaded.cfg;
    let problem = cfg.problem(&loaded.path, None)?;
    let spec = &problem.spec;
    let search = cfg.bangbang_search();
    let r = brute_force_bangbang(spec, &search).map_err(numerical("qre-bangbang search"))?;
    let policy = r
        .best
        .to_policy(spec.model.bounds())
        .map_err(numerical("qre-bangbang"))?;
    let solution = analyze_policy(spec, &policy).map_err(numerical("qre-bangbang analysis"))?;
    let st = structure_report(spec, &solution, &cfg.arc_tolerances())
        .map_err(numerical("qre-bangbang analysis"))?;

    let mut report = Report::new();
    report.set("command", "qre-bangbang");
    report.set("model", cfg.model.id());
    report.set("mode", problem.mode.as_str());
    report.set("max_switches", search.max_switches);
    report.set("grid", search.grid);
    report.set("candidates", r.candidates);
    report.set("best_index", r.best_index);
    report.set_f64("objective", r.objective);
    let schedules: Vec<String> = r
        .best
        .channels
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let v: Vec<String> = c.values.iter().map(|&x| fmt_f64(x)).collect();
            let t: Vec<String> = c.switch_times.iter().map(|&x| fmt_f64(x)).collect();
            format!(
                "u{}: levels [{}] switches [{}]",
                k + 1,
                v.join(","),
                t.join(",")
            )
        })
        .collect();
    report.set("schedule", schedules.join("; "));
    put_structure(&mut report, &st);
    let mut dir = OutputDir::claim(out)?;
    dir.copy_config(&loaded)?;
    let labels = labels_of(&st, &solution);
    dir.write_with("trajectory.csv", |w| {
        write_trajectory(w, &solution, &labels)
    })?;
    dir.write_with("diagnostics.csv", |w| write_diagnostics(w, &solution))?;
    dir.finish("report.txt", &mut report)?;
    Ok(report)
}
