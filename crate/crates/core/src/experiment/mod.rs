//! Declarative experiment runner: a JSON config names an experiment kind,
//! the runner dispatches to the library and writes CSV tables plus a JSON
//! manifest into an output directory.

mod output;
pub mod schema;
pub mod selftest;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::aba::giant_fraction_trajectory;
use crate::error::Error;
use crate::hierarchy::{resolve_alphas, success_curve};
use crate::model::{DomainShape, ModelParams, ProfileKind};
use crate::percolation::{pc_sweep, SweepOptions};
use crate::rng::seed_derivation;
use crate::verify::{
    default_grid, random_admissible_configuration, verify_appendix_lemma_with, verify_i_rho,
    verify_two_connection, Lemma, LemmaPoint, VerifyOptions,
};

pub use output::{Manifest, OutputFile, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Sweep,
    Theta,
    PathsSelftest,
    Verify,
    Construct,
    Aba,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Sweep,
        ExperimentKind::Theta,
        ExperimentKind::PathsSelftest,
        ExperimentKind::Verify,
        ExperimentKind::Construct,
        ExperimentKind::Aba,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Theta => "theta",
            ExperimentKind::PathsSelftest => "paths-selftest",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Construct => "construct",
            ExperimentKind::Aba => "aba",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::new("kind", format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default = "default_shape")]
    pub shape: DomainShape,
    /// Side length, used by `theta`.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    /// Reach radius, used by `theta`; defaults to `L / 4`.
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

fn default_shape() -> DomainShape {
    DomainShape::Torus
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyCheck {
    Lemmas,
    IRho,
    TwoConnection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaCase {
    pub lemma: Lemma,
    pub point: LemmaPoint,
}

/// Every field except `kind` is optional at parse time; [`ExperimentConfig::validate`]
/// checks what the kind needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0_grid: Option<Vec<f64>>,
    /// Sweep only: repeat the sweep over a `(gamma, delta)` grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Sweep: reach radius as a fraction of `L` (default 0.25).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_fraction: Option<f64>,
    /// Construct: hierarchy length `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<(f64, f64)>,
    /// Verify: defaults to `["lemmas"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<VerifyCheck>>,
    /// Verify: lemma points; the built-in grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma_points: Option<Vec<LemmaCase>>,
    /// Verify: random configurations for the two-connection bound (default 20).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configurations: Option<usize>,
    /// Paths self-test sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalan_max_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_sequences: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bijection_max_k: Option<usize>,
}

/// A configuration problem, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Model(Error),
    Io(std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Model(e) => e.fmt(f),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => RunError::Config(ConfigError::new(name, reason)),
            other => RunError::Model(other),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Model(Error::Precondition(_)) => EXIT_VALIDATION,
            _ => EXIT_RUNTIME,
        }
    }
}

const DEFAULT_CONFIGURATIONS: usize = 20;
const DEFAULT_TWO_CONNECTION_REPS: usize = 100_000;

fn nonempty<'a>(field: &str, v: &'a Option<Vec<f64>>) -> Result<&'a [f64], ConfigError> {
    match v {
        None => Err(ConfigError::new(field, "required for this experiment kind")),
        Some(g) if g.is_empty() => Err(ConfigError::new(field, "must be nonempty")),
        Some(g) => {
            if let Some(x) = g.iter().find(|x| !x.is_finite()) {
                return Err(ConfigError::new(field, format!("{x} is not finite")));
            }
            Ok(g)
        }
    }
}

fn required<'a, T>(field: &str, v: &'a Option<T>) -> Result<&'a T, ConfigError> {
    v.as_ref()
        .ok_or_else(|| ConfigError::new(field, "required for this experiment kind"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            // serde names the field in "unknown field `x`" and "missing field `x`"
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("config")
                .to_string();
            ConfigError::new(field, msg)
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn params(&self) -> Result<&ModelParams, ConfigError> {
        let p = required("params", &self.params)?;
        p.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => {
                ConfigError::new(format!("params.{name}"), reason)
            }
            other => ConfigError::new("params", other.to_string()),
        })?;
        Ok(p)
    }

    fn replications(&self) -> Result<usize, ConfigError> {
        match self.replications {
            None => Err(ConfigError::new("replications", "required for this experiment kind")),
            Some(0) => Err(ConfigError::new("replications", "must be at least 1")),
            Some(r) => Ok(r),
        }
    }

    fn checks(&self) -> Vec<VerifyCheck> {
        self.checks.clone().unwrap_or_else(|| vec![VerifyCheck::Lemmas])
    }

    /// Checks everything the kind needs, without running anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seed.is_none() {
            return Err(ConfigError::new("seed", "a master seed is required"));
        }
        match self.kind {
            ExperimentKind::Sweep => {
                self.params()?;
                for (field, g) in [("p_grid", &self.p_grid), ("l_grid", &self.l_grid)] {
                    nonempty(field, g)?;
                }
                for (field, g) in [("gamma_grid", &self.gamma_grid), ("delta_grid", &self.delta_grid)] {
                    if g.is_some() {
                        nonempty(field, g)?;
                    }
                }
                self.replications()?;
                if let Some(f) = self.radius_fraction {
                    if !(f > 0.0 && f < 0.5) {
                        return Err(ConfigError::new("radius_fraction", "must lie in (0, 1/2)"));
                    }
                }
                if self.domain.is_some_and(|d| d.l.is_some() || d.r.is_some()) {
                    return Err(ConfigError::new(
                        "domain",
                        "sweep takes side lengths from l_grid and radii from radius_fraction",
                    ));
                }
            }
            ExperimentKind::Theta => {
                self.params()?;
                let dom = required("domain", &self.domain)?;
                let l = *required("domain.L", &dom.l)?;
                if !(l > 0.0 && l.is_finite()) {
                    return Err(ConfigError::new("domain.L", format!("{l} must be positive")));
                }
                if let Some(r) = dom.r {
                    if !(r > 0.0 && r < l / 2.0) {
                        return Err(ConfigError::new("domain.R", format!("{r} must lie in (0, L/2)")));
                    }
                }
                self.replications()?;
            }
            ExperimentKind::PathsSelftest => {
                if self.catalan_max_k.is_some_and(|k| k > 11) {
                    return Err(ConfigError::new("catalan_max_k", "at most 11"));
                }
                if self.permutation_max_len.is_some_and(|k| k > 10) {
                    return Err(ConfigError::new("permutation_max_len", "at most 10"));
                }
                if self.bijection_max_k.is_some_and(|k| k > 9) {
                    return Err(ConfigError::new("bijection_max_k", "at most 9"));
                }
            }
            ExperimentKind::Verify => {
                let checks = self.checks();
                if checks.is_empty() {
                    return Err(ConfigError::new("checks", "must be nonempty"));
                }
                if checks.iter().any(|c| *c != VerifyCheck::Lemmas) {
                    let p = self.params()?;
                    if p.profile != ProfileKind::Surgery {
                        return Err(ConfigError::new(
                            "params.profile",
                            "i_rho and two_connection need the surgery profile",
                        ));
                    }
                }
                if let Some(pts) = &self.lemma_points {
                    if pts.is_empty() {
                        return Err(ConfigError::new("lemma_points", "must be nonempty"));
                    }
                }
                if self.configurations == Some(0) {
                    return Err(ConfigError::new("configurations", "must be at least 1"));
                }
                if self.replications == Some(0) {
                    return Err(ConfigError::new("replications", "must be at least 1"));
                }
            }
            ExperimentKind::Construct => {
                let p = self.params()?;
                nonempty("s0_grid", &self.s0_grid)?;
                self.replications()?;
                if *required("steps", &self.steps)? == 0 {
                    return Err(ConfigError::new("steps", "must be at least 1"));
                }
                resolve_alphas(p, self.alphas).map_err(|e| ConfigError::new("alphas", e.to_string()))?;
            }
            ExperimentKind::Aba => {
                self.params()?;
                nonempty("t_grid", &self.t_grid)?;
                self.replications()?;
            }
        }
        Ok(())
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    /// Failed verification rows (verify and paths-selftest only).
    pub verification_failures: usize,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.verification_failures > 0 {
            EXIT_VERIFICATION
        } else {
            EXIT_SUCCESS
        }
    }
}

/// Validates, runs and writes the outputs into `out_dir` (falling back to
/// the config's `output`). Tables are built in memory and written only once
/// the computation has succeeded; a failed write removes what was written.
pub fn run(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    config.validate()?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .ok_or_else(|| ConfigError::new("output", "no output directory given"))?;
    let seed = config.seed.expect("validated");
    let (tables, failures) = match config.kind {
        ExperimentKind::Sweep => (run_sweep(config, seed)?, 0),
        ExperimentKind::Theta => (run_theta(config, seed)?, 0),
        ExperimentKind::PathsSelftest => run_paths_selftest(config, seed),
        ExperimentKind::Verify => run_verify(config, seed)?,
        ExperimentKind::Construct => (run_construct(config, seed)?, 0),
        ExperimentKind::Aba => (run_aba(config, seed)?, 0),
    };
    let mut echo = config.clone();
    echo.output = Some(dir.clone());
    let manifest = output::write_all(&dir, &tables, echo, seed, start.elapsed().as_secs_f64(), failures)?;
    Ok(RunSummary {
        out_dir: dir,
        manifest,
        verification_failures: failures,
    })
}

fn shape_of(config: &ExperimentConfig) -> DomainShape {
    config.domain.map_or(DomainShape::Torus, |d| d.shape)
}

#[derive(Serialize)]
struct PercolationSummaryRow<'a> {
    gamma: f64,
    delta: f64,
    beta: f64,
    p: f64,
    d: usize,
    domain: &'a str,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "R")]
    r: f64,
    seed: u64,
    frequency: f64,
    ci_low: f64,
    ci_high: f64,
    replications: usize,
}

#[derive(Serialize)]
struct WindowRow<'a> {
    gamma: f64,
    delta: f64,
    beta: f64,
    d: usize,
    domain: &'a str,
    seed: u64,
    l_small: f64,
    l_large: f64,
    p_low: f64,
    p_high: f64,
}

/// Parameters for one `(gamma, delta)` grid cell. A polynomial profile is
/// renormalized for the new `delta`.
fn grid_params(base: &ModelParams, gamma: f64, delta: f64) -> Result<ModelParams, RunError> {
    let mut p = base.clone();
    p.gamma = gamma;
    p.delta = delta;
    if let ProfileKind::Polynomial { .. } = p.profile {
        p.profile = ProfileKind::normalized_polynomial(p.d, delta);
    }
    p.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => {
            RunError::Config(ConfigError::new(format!("{name}_grid"), reason))
        }
        other => other.into(),
    })?;
    Ok(p)
}

fn run_sweep(config: &ExperimentConfig, seed: u64) -> Result<Vec<Table>, RunError> {
    let base = config.params()?;
    let p_grid = nonempty("p_grid", &config.p_grid)?;
    let l_grid = nonempty("l_grid", &config.l_grid)?;
    let reps = config.replications()?;
    let opts = SweepOptions {
        shape: shape_of(config),
        radius_fraction: config.radius_fraction.unwrap_or(0.25),
    };
    let gammas = config.gamma_grid.clone().unwrap_or_else(|| vec![base.gamma]);
    let deltas = config.delta_grid.clone().unwrap_or_else(|| vec![base.delta]);
    let gridded = config.gamma_grid.is_some() || config.delta_grid.is_some();
    let mut rows = Table::new(&schema::PERCOLATION);
    let mut summary = Table::new(&schema::PERCOLATION_SUMMARY);
    let mut windows = Table::new(&schema::TRANSITION_WINDOW);
    let shape = opts.shape.name();
    for &gamma in &gammas {
        for &delta in &deltas {
            let params = if gridded { grid_params(base, gamma, delta)? } else { base.clone() };
            let table = pc_sweep(&params, p_grid, l_grid, reps, seed, opts)?;
            for r in &table.rows {
                rows.push(r);
            }
            for s in &table.summaries {
                summary.push(&PercolationSummaryRow {
                    gamma,
                    delta,
                    beta: params.beta,
                    p: s.p,
                    d: params.d,
                    domain: shape,
                    l: s.l,
                    r: opts.radius_fraction * s.l,
                    seed,
                    frequency: s.frequency,
                    ci_low: s.ci_low,
                    ci_high: s.ci_high,
                    replications: s.replications,
                });
            }
            for c in &table.crossings {
                windows.push(&WindowRow {
                    gamma,
                    delta,
                    beta: params.beta,
                    d: params.d,
                    domain: shape,
                    seed,
                    l_small: c.l_small,
                    l_large: c.l_large,
                    p_low: c.p_low,
                    p_high: c.p_high,
                });
            }
        }
    }
    Ok(vec![
        rows.named("sweep.csv"),
        summary.named("sweep_summary.csv"),
        windows.named("sweep_windows.csv"),
    ])
}

fn run_theta(config: &ExperimentConfig, seed: u64) -> Result<Vec<Table>, RunError> {
    let params = config.params()?;
    let dom = config.domain.expect("validated");
    let l = dom.l.expect("validated");
    let r = dom.r.unwrap_or(l / 4.0);
    let reps = config.replications()?;
    let opts = SweepOptions {
        shape: dom.shape,
        radius_fraction: r / l,
    };
    let table = pc_sweep(params, &[params.p], &[l], reps, seed, opts)?;
    let mut rows = Table::new(&schema::PERCOLATION);
    for row in &table.rows {
        rows.push(row);
    }
    let s = &table.summaries[0];
    let mut summary = Table::new(&schema::PERCOLATION_SUMMARY);
    summary.push(&PercolationSummaryRow {
        gamma: params.gamma,
        delta: params.delta,
        beta: params.beta,
        p: params.p,
        d: params.d,
        domain: dom.shape.name(),
        l,
        r,
        seed,
        frequency: s.frequency,
        ci_low: s.ci_low,
        ci_high: s.ci_high,
        replications: reps,
    });
    Ok(vec![rows.named("theta.csv"), summary.named("theta_summary.csv")])
}

fn run_paths_selftest(config: &ExperimentConfig, seed: u64) -> (Vec<Table>, usize) {
    let mut rows = selftest::catalan_check(config.catalan_max_k.unwrap_or(8));
    rows.extend(selftest::skeleton_check(
        config.permutation_max_len.unwrap_or(8),
        config.random_sequences.unwrap_or(100_000),
        config.random_max_len.unwrap_or(20),
        seed,
    ));
    rows.extend(selftest::bijection_check(config.bijection_max_k.unwrap_or(7)));
    let failures = rows.iter().filter(|r| !r.pass).count();
    let mut table = Table::new(&schema::PATHS_SELFTEST);
    for r in &rows {
        table.push_with(&[seed.to_string()], r);
    }
    (vec![table.named("paths_selftest.csv")], failures)
}

fn run_verify(config: &ExperimentConfig, seed: u64) -> Result<(Vec<Table>, usize), RunError> {
    let mut reports = Vec::new();
    for check in config.checks() {
        match check {
            VerifyCheck::Lemmas => {
                let cases: Vec<LemmaCase> = match &config.lemma_points {
                    Some(pts) => pts.clone(),
                    None => Lemma::ALL
                        .into_iter()
                        .flat_map(|lemma| default_grid(lemma).into_iter().map(move |point| LemmaCase { lemma, point }))
                        .collect(),
                };
                for (i, c) in cases.iter().enumerate() {
                    let opts = VerifyOptions {
                        seed: seed_derivation(seed, &[0, i as u64]),
                        ..VerifyOptions::default()
                    };
                    reports.push(verify_appendix_lemma_with(c.lemma, &c.point, &opts)?);
                }
            }
            VerifyCheck::IRho => reports.push(verify_i_rho(config.params()?)?),
            VerifyCheck::TwoConnection => {
                let params = config.params()?;
                let n = config.configurations.unwrap_or(DEFAULT_CONFIGURATIONS);
                let reps = config.replications.unwrap_or(DEFAULT_TWO_CONNECTION_REPS) as u64;
                for i in 0..n as u64 {
                    let (x, y) = random_admissible_configuration(params, seed_derivation(seed, &[1, i]))?;
                    reports.push(verify_two_connection(params, &x, &y, reps, seed_derivation(seed, &[2, i]))?);
                }
            }
        }
    }
    let failures = reports.iter().filter(|r| !r.pass).count();
    let mut table = Table::new(&schema::VERIFICATION);
    for r in &reports {
        table.push_with(&[seed.to_string()], r);
    }
    Ok((vec![table.named("verification.csv")], failures))
}

#[derive(Serialize)]
struct ChainSummaryRow {
    gamma: f64,
    delta: f64,
    beta: f64,
    p: f64,
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    alpha1: f64,
    alpha2: f64,
    seed: u64,
    s0: f64,
    successes: usize,
    replications: usize,
    probability: f64,
    ci_low: f64,
    ci_high: f64,
    capped: usize,
}

fn run_construct(config: &ExperimentConfig, seed: u64) -> Result<Vec<Table>, RunError> {
    let params = config.params()?;
    let s0_grid = nonempty("s0_grid", &config.s0_grid)?;
    let steps = *required("steps", &config.steps)?;
    let reps = config.replications()?;
    let (alpha1, alpha2) = resolve_alphas(params, config.alphas)?;
    let curve = success_curve(s0_grid, steps, reps, params, Some((alpha1, alpha2)), seed)?;
    let mut rows = Table::new(&schema::CHAIN);
    for r in &curve.rows {
        rows.push(r);
    }
    let mut summary = Table::new(&schema::CHAIN_SUMMARY);
    for pt in &curve.points {
        summary.push(&ChainSummaryRow {
            gamma: params.gamma,
            delta: params.delta,
            beta: params.beta,
            p: params.p,
            d: params.d,
            k: steps,
            alpha1,
            alpha2,
            seed,
            s0: pt.s0,
            successes: pt.successes,
            replications: pt.replications,
            probability: pt.probability,
            ci_low: pt.ci_low,
            ci_high: pt.ci_high,
            capped: pt.capped,
        });
    }
    Ok(vec![rows.named("chains.csv"), summary.named("chains_summary.csv")])
}

#[derive(Serialize)]
struct AbaSummaryRow {
    gamma: f64,
    delta: f64,
    beta: f64,
    p: f64,
    d: usize,
    seed: u64,
    t: f64,
    replications: usize,
    mean_largest: f64,
    ci_low: f64,
    ci_high: f64,
    mean_oldest: f64,
}

fn run_aba(config: &ExperimentConfig, seed: u64) -> Result<Vec<Table>, RunError> {
    let params = config.params()?;
    let t_grid = nonempty("t_grid", &config.t_grid)?;
    let reps = config.replications()?;
    let traj = giant_fraction_trajectory(params, params.p, t_grid, reps, seed)?;
    let mut rows = Table::new(&schema::ABA);
    for r in &traj.rows {
        rows.push(r);
    }
    let mut summary = Table::new(&schema::ABA_SUMMARY);
    for s in &traj.summaries {
        summary.push(&AbaSummaryRow {
            gamma: params.gamma,
            delta: params.delta,
            beta: params.beta,
            p: params.p,
            d: params.d,
            seed,
            t: s.t,
            replications: s.replications,
            mean_largest: s.mean_largest,
            ci_low: s.ci_low,
            ci_high: s.ci_high,
            mean_oldest: s.mean_oldest,
        });
    }
    Ok(vec![rows.named("aba.csv"), summary.named("aba_summary.csv")])
}

#[cfg(test)]
mod tests;
