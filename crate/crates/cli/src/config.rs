// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration.
//!
//! ```toml
//! seed = 0             # base seed of the random starts
//! starts = 8           # random starts
//!
//! [model]
//! kind = "two-level-closed"   # lambda | two-level-closed | two-level-thermal
//!                             # | two-level-collision | random-lindblad
//! delta = 1.0
//! limit = 1.0
//! observable = "sigma-z"
//! initial = "1"
//!
//! [problem]
//! mode = "terminal"    # or "periodic"; solve-* subcommands imply it
//! horizon = 1.2        # final time or period
//! free = false         # optimize the horizon inside `bracket`
//! bracket = [0.5, 2.0]
//! scan = 6
//!
//! [[bounds]]           # optional, one table per channel, overrides the model
//! lower = -1.0
//! upper = 1.0
//!
//! [solver]             # intervals, max_iterations, gradient_tol, bound_tol,
//!                      # initial_step, method ("lbfgs" | "projected-gradient"), polish
//! [arcs]               # eps_u, eps_k, min_run, branch_tol
//! [qre]                # max_switches, grid, cap
//! [verify]             # repetitions, channel, perturbations, amplitude
//! ```
//!
//! Operators (`observable`, `initial`, collision `target`) are either a
//! name or a matrix `{ re = [[..]], im = [[..]] }`. Two-level names: `"0"`,
//! `"1"`, `"plus"`, `"minus"`, `"mixed"`, `"sigma-x"`, `"sigma-y"`,
//! `"sigma-z"`; `"mixed"` also works in any dimension.

use std::path::Path;

use nalgebra::Complex;
use qpmp_core::arcs::ArcTolerances;
use qpmp_core::liouville::{Bounds, CMatrix, QuantumModel};
use qpmp_core::models::{
    build_lambda_system, build_two_level, ket_bra, plus_state, projector, random_lindblad, sigma_x,
    sigma_y, sigma_z, CollisionChannelSpec, LambdaSystemParams, ModelId, RandomLindbladParams,
    Thermalization, TwoLevelSpec, UnitConvention,
};
use qpmp_core::qre::BangBangSearch;
use qpmp_core::solver::{AscentMethod, BoundaryMode, ProblemSpec, SolverConfig};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_starts")]
    pub starts: usize,
    pub model: ModelConfig,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub bounds: Vec<BoundsConfig>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub arcs: ArcsSection,
    #[serde(default)]
    pub qre: QreSection,
    #[serde(default)]
    pub verify: VerifySection,
}

fn default_starts() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OperatorConfig {
    Named(String),
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub rate: f64,
    pub excited_population: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CollisionConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub target: OperatorConfig,
    #[serde(default)]
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionConfig {
    #[default]
    Ordinary,
    Angular,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Lambda {
        #[serde(default)]
        convention: ConventionConfig,
        delta: Option<f64>,
        g1: Option<f64>,
        g2: Option<f64>,
        gamma1: Option<f64>,
        gamma2: Option<f64>,
        gamma3: Option<f64>,
        coupling_sign: Option<f64>,
        detuning_sign: Option<f64>,
        control_limit: Option<f64>,
        initial: Option<OperatorConfig>,
        /// Also start from the harmonic reference control.
        #[serde(default)]
        reference_start: bool,
    },
    TwoLevelClosed {
        delta: f64,
        limit: f64,
        observable: OperatorConfig,
        initial: Option<OperatorConfig>,
    },
    TwoLevelThermal {
        delta: f64,
        limit: f64,
        thermal: ThermalConfig,
        observable: OperatorConfig,
        /// Defaults to the thermal state.
        initial: Option<OperatorConfig>,
    },
    TwoLevelCollision {
        delta: f64,
        /// Optional coherent `σx` channel bounded by `±coherent_limit`.
        coherent_limit: Option<f64>,
        thermal: Option<ThermalConfig>,
        collisions: Vec<CollisionConfig>,
        observable: OperatorConfig,
        initial: Option<OperatorConfig>,
    },
    RandomLindblad {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_one")]
        controls: usize,
        #[serde(default = "default_jumps")]
        jumps: usize,
        #[serde(default)]
        model_seed: u64,
        #[serde(default = "default_limit")]
        limit: f64,
        /// Defaults to the random full-rank state drawn with the model.
        initial: Option<OperatorConfig>,
    },
}

fn default_dim() -> usize {
    3
}
fn default_one() -> usize {
    1
}
fn default_jumps() -> usize {
    2
}
fn default_limit() -> f64 {
    1.0
}

impl ModelConfig {
    /// Parameters of a `lambda` model.
    pub fn lambda_params(&self) -> Option<LambdaSystemParams> {
        let ModelConfig::Lambda {
            convention,
            delta,
            g1,
            g2,
            gamma1,
            gamma2,
            gamma3,
            coupling_sign,
            detuning_sign,
            control_limit,
            ..
        } = self
        else {
            return None;
        };
        let d = LambdaSystemParams::default();
        Some(LambdaSystemParams {
            delta: delta.unwrap_or(d.delta),
            g1: g1.unwrap_or(d.g1),
            g2: g2.unwrap_or(d.g2),
            gamma1: gamma1.unwrap_or(d.gamma1),
            gamma2: gamma2.unwrap_or(d.gamma2),
            gamma3: gamma3.unwrap_or(d.gamma3),
            convention: match convention {
                ConventionConfig::Ordinary => UnitConvention::OrdinaryFrequency,
                ConventionConfig::Angular => UnitConvention::Angular,
            },
            coupling_sign: coupling_sign.unwrap_or(d.coupling_sign),
            detuning_sign: detuning_sign.unwrap_or(d.detuning_sign),
            control_limit: control_limit.or(d.control_limit),
        })
    }

    pub fn id(&self) -> ModelId {
        match self {
            ModelConfig::Lambda { .. } => ModelId::Lambda,
            ModelConfig::TwoLevelClosed { .. } => ModelId::TwoLevelClosed,
            ModelConfig::TwoLevelThermal { .. } => ModelId::TwoLevelThermal,
            ModelConfig::TwoLevelCollision { .. } => ModelId::TwoLevelCollision,
            ModelConfig::RandomLindblad { .. } => ModelId::RandomLindblad,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModeConfig {
    Terminal,
    Periodic,
}

impl ModeConfig {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeConfig::Terminal => "terminal",
            ModeConfig::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub mode: Option<ModeConfig>,
    pub horizon: f64,
    #[serde(default)]
    pub free: bool,
    pub bracket: Option<[f64; 2]>,
    #[serde(default = "default_scan")]
    pub scan: usize,
}

fn default_scan() -> usize {
    6
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodConfig {
    Lbfgs,
    ProjectedGradient,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub intervals: Option<usize>,
    pub max_iterations: Option<usize>,
    pub gradient_tol: Option<f64>,
    pub bound_tol: Option<f64>,
    pub initial_step: Option<f64>,
    pub method: Option<MethodConfig>,
    pub polish: Option<bool>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ArcsSection {
    pub eps_u: Option<f64>,
    pub eps_k: Option<f64>,
    pub min_run: Option<usize>,
    pub branch_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct QreSection {
    pub max_switches: Option<usize>,
    pub grid: Option<usize>,
    pub cap: Option<u128>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Periods for the Theorem 2 check (default 2).
    pub repetitions: Option<usize>,
    /// Collision channel for Theorem 4 (default: the first one, 1-based).
    pub channel: Option<usize>,
    pub perturbations: Option<usize>,
    pub amplitude: Option<f64>,
}

/// A problem ready for the solver.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub mode: ModeConfig,
    pub free: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: describe_toml_error(text, &e),
        })?;
        cfg.validate(path)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub(crate) fn validate(&self, path: &Path) -> CliResult<()> {
        let err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            message,
        };
        if !(self.problem.horizon > 0.0 && self.problem.horizon.is_finite()) {
            return Err(err(format!(
                "problem.horizon = {} must be positive",
                self.problem.horizon
            )));
        }
        if self.problem.free {
            match self.problem.bracket {
                Some([lo, hi]) if lo > 0.0 && hi > lo => {}
                Some([lo, hi]) => {
                    return Err(err(format!(
                        "problem.bracket [{lo}, {hi}] must satisfy 0 < lower < upper"
                    )))
                }
                None => return Err(err("problem.free = true needs problem.bracket".into())),
            }
            if self.problem.scan < 3 {
                return Err(err(format!(
                    "problem.scan = {} must be at least 3",
                    self.problem.scan
                )));
            }
        }
        let reference = matches!(
            self.model,
            ModelConfig::Lambda {
                reference_start: true,
                ..
            }
        );
        if self.starts == 0 && !reference {
            return Err(err(
                "starts must be at least 1 (or 0 with model.reference_start)".into(),
            ));
        }
        for (k, b) in self.bounds.iter().enumerate() {
            if !(b.lower <= b.upper) {
                return Err(err(format!(
                    "bounds for channel {} (u_{}): lower {} > upper {}",
                    k + 1,
                    k + 1,
                    b.lower,
                    b.upper
                )));
            }
        }
        if let ModelConfig::TwoLevelCollision { collisions, .. } = &self.model {
            for (i, c) in collisions.iter().enumerate() {
                if !(c.lower <= c.upper) {
                    let name = c
                        .name
                        .clone()
                        .unwrap_or_else(|| format!("collision {}", i + 1));
                    return Err(err(format!(
                        "channel {name:?}: lower rate {} > upper rate {}",
                        c.lower, c.upper
                    )));
                }
            }
        }
        if let Some(0) = self.solver.intervals {
            return Err(err("solver.intervals must be positive".into()));
        }
        if let Some(g) = self.qre.grid {
            if g < 2 {
                return Err(err(format!("qre.grid = {g} must be at least 2")));
            }
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        let s = &self.solver;
        SolverConfig {
            intervals: s.intervals.unwrap_or(d.intervals),
            method: match s.method {
                Some(MethodConfig::Lbfgs) => AscentMethod::default(),
                Some(MethodConfig::ProjectedGradient) => AscentMethod::ProjectedGradient,
                None => d.method,
            },
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            gradient_tol: s.gradient_tol.unwrap_or(d.gradient_tol),
            bound_tol: s.bound_tol.unwrap_or(d.bound_tol),
            initial_step: s.initial_step.unwrap_or(d.initial_step),
            polish: s.polish.unwrap_or(d.polish),
        }
    }

    pub fn arc_tolerances(&self) -> ArcTolerances {
        let d = ArcTolerances::default();
        ArcTolerances {
            eps_u: self.arcs.eps_u.unwrap_or(d.eps_u),
            eps_k: self.arcs.eps_k.unwrap_or(d.eps_k),
            min_run: self.arcs.min_run.unwrap_or(d.min_run),
            branch_tol: self.arcs.branch_tol.unwrap_or(d.branch_tol),
        }
    }

    pub fn bangbang_search(&self) -> BangBangSearch {
        let d = BangBangSearch::default();
        BangBangSearch {
            max_switches: self.qre.max_switches.unwrap_or(d.max_switches),
            grid: self.qre.grid.unwrap_or(d.grid),
            cap: self.qre.cap.unwrap_or(d.cap),
            keep_table: false,
        }
    }

    /// Builds the model (with bound overrides) and its default initial state.
    pub fn build_model(&self, path: &Path) -> CliResult<(QuantumModel, Option<CMatrix>)> {
        let cfg_err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            message,
        };
        let core = |e: qpmp_core::Error| cfg_err(format!("model: {e}"));
        let op2 = |o: &OperatorConfig, what: &str| {
            operator(o, 2).map_err(|m| cfg_err(format!("{what}: {m}")))
        };
        let (mut model, default_initial, initial) = match &self.model {
            ModelConfig::Lambda { initial, .. } => {
                let p = self.model.lambda_params().expect("lambda model");
                (
                    build_lambda_system(&p).map_err(core)?,
                    None,
                    initial.as_ref(),
                )
            }
            ModelConfig::TwoLevelClosed {
                delta,
                limit,
                observable,
                initial,
            } => {
                let m = build_two_level(&TwoLevelSpec {
                    delta: *delta,
                    coherent: Some(Bounds::symmetric(*limit)),
                    thermal: None,
                    collisions: Vec::new(),
                    observable: op2(observable, "observable")?,
                })
                .map_err(core)?;
                (m, None, initial.as_ref())
            }
            ModelConfig::TwoLevelThermal {
                delta,
                limit,
                thermal,
                observable,
                initial,
            } => {
                let th = Thermalization {
                    rate: thermal.rate,
                    excited_population: thermal.excited_population,
                };
                let m = build_two_level(&TwoLevelSpec {
                    delta: *delta,
                    coherent: Some(Bounds::symmetric(*limit)),
                    thermal: Some(th),
                    collisions: Vec::new(),
                    observable: op2(observable, "observable")?,
                })
                .map_err(core)?;
                (m, Some(th.state()), initial.as_ref())
            }
            ModelConfig::TwoLevelCollision {
                delta,
                coherent_limit,
                thermal,
                collisions,
                observable,
                initial,
            } => {
                let collisions = collisions
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let name = c
                            .name
                            .clone()
                            .unwrap_or_else(|| format!("collision{}", i + 1));
                        Ok(CollisionChannelSpec {
                            target: op2(&c.target, &format!("channel {name:?} target"))?,
                            bounds: Bounds::new(c.lower, c.upper),
                            name,
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                let m = build_two_level(&TwoLevelSpec {
                    delta: *delta,
                    coherent: coherent_limit.map(Bounds::symmetric),
                    thermal: thermal.map(|t| Thermalization {
                        rate: t.rate,
                        excited_population: t.excited_population,
                    }),
                    collisions,
                    observable: op2(observable, "observable")?,
                })
                .map_err(core)?;
                (m, None, initial.as_ref())
            }
            ModelConfig::RandomLindblad {
                dim,
                controls,
                jumps,
                model_seed,
                limit,
                initial,
            } => {
                let (m, rho) = random_lindblad(&RandomLindbladParams {
                    dim: *dim,
                    controls: *controls,
                    jumps: *jumps,
                    control_limit: *limit,
                    seed: *model_seed,
                    ..Default::default()
                })
                .map_err(core)?;
                (m, Some(rho), initial.as_ref())
            }
        };
        if !self.bounds.is_empty() {
            if self.bounds.len() != model.num_controls() {
                return Err(cfg_err(format!(
                    "{} [[bounds]] tables given but the model has {} channels",
                    self.bounds.len(),
                    model.num_controls()
                )));
            }
            for (k, b) in self.bounds.iter().enumerate() {
                model = model
                    .with_bounds(k, Bounds::new(b.lower, b.upper))
                    .map_err(core)?;
            }
        }
        let n = model.basis().dim();
        let rho0 = match initial {
            Some(o) => Some(operator(o, n).map_err(|m| cfg_err(format!("initial: {m}")))?),
            None => default_initial,
        };
        Ok((model, rho0))
    }

    /// Resolves the problem; `forced` is the mode implied by the subcommand.
    pub fn problem(&self, path: &Path, forced: Option<ModeConfig>) -> CliResult<Problem> {
        let cfg_err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            message,
        };
        let mode = match (forced, self.problem.mode) {
            (Some(f), Some(m)) if f != m => {
                return Err(cfg_err(format!(
                    "problem.mode = {:?} conflicts with the {} subcommand",
                    m.as_str(),
                    f.as_str()
                )))
            }
            (Some(f), _) => f,
            (None, Some(m)) => m,
            (None, None) => ModeConfig::Terminal,
        };
        let (model, rho0) = self.build_model(path)?;
        let t = self.problem.horizon;
        let free = self.problem.free;
        let boundary = match mode {
            ModeConfig::Terminal => {
                let rho0 =
                    rho0.ok_or_else(|| cfg_err("terminal problems need model.initial".into()))?;
                let initial = model
                    .basis()
                    .density(&rho0)
                    .map_err(|e| cfg_err(format!("initial: {e}")))?;
                BoundaryMode::Terminal {
                    initial,
                    horizon: t,
                    free_time: free,
                }
            }
            ModeConfig::Periodic => BoundaryMode::Periodic {
                period: t,
                free_period: free,
            },
        };
        let spec =
            ProblemSpec::new(model, boundary).map_err(|e| cfg_err(format!("problem: {e}")))?;
        Ok(Problem { spec, mode, free })
    }
}

/// The parser's message, plus the line of an unknown key: tagged tables are
/// buffered before deserialization, so their span covers the whole table.
fn describe_toml_error(text: &str, e: &toml::de::Error) -> String {
    let msg = e.to_string();
    let Some(key) = msg
        .split("unknown field `")
        .nth(1)
        .and_then(|r| r.split('`').next())
    else {
        return msg;
    };
    let from = e.span().map_or(0, |s| {
        text[..s.start.min(text.len())]
            .lines()
            .count()
            .saturating_sub(1)
    });
    let line = text.lines().enumerate().skip(from).find(|(_, l)| {
        l.trim_start()
            .strip_prefix(key)
            .is_some_and(|r| r.trim_start().starts_with('='))
    });
    match line {
        Some((i, _)) => format!("unknown key `{key}` at line {}\n{msg}", i + 1),
        None => msg,
    }
}

/// Resolves an operator in dimension `n`.
pub fn operator(o: &OperatorConfig, n: usize) -> Result<CMatrix, String> {
    match o {
        OperatorConfig::Named(name) => {
            if name == "mixed" {
                return Ok(CMatrix::identity(n, n) * Complex::new(1.0 / n as f64, 0.0));
            }
            if n != 2 {
                return Err(format!(
                    "named operator {name:?} needs a two-level model; give a matrix"
                ));
            }
            Ok(match name.as_str() {
                "0" => ket_bra(2, 0, 0),
                "1" => ket_bra(2, 1, 1),
                "plus" => plus_state(),
                "minus" => projector(&[Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)]),
                "sigma-x" => sigma_x(),
                "sigma-y" => sigma_y(),
                "sigma-z" => sigma_z(),
                other => return Err(format!("unknown operator name {other:?}")),
            })
        }
        OperatorConfig::Matrix { re, im } => {
            let rows_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
            if !rows_ok(re) || im.as_ref().is_some_and(|m| !rows_ok(m)) {
                return Err(format!("matrix must be {n}x{n}"));
            }
            Ok(CMatrix::from_fn(n, n, |i, j| {
                Complex::new(re[i][j], im.as_ref().map_or(0.0, |m| m[i][j]))
            }))
        }
    }
}
