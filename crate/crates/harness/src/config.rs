use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KernelTable,
    GroundstateScan,
    Dobrushin,
    GirsanovCheck,
    Metastability,
    PercolationScan,
    Badprobe,
    Chessboard,
    PolymerCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::KernelTable,
        ExperimentKind::GroundstateScan,
        ExperimentKind::Dobrushin,
        ExperimentKind::GirsanovCheck,
        ExperimentKind::Metastability,
        ExperimentKind::PercolationScan,
        ExperimentKind::Badprobe,
        ExperimentKind::Chessboard,
        ExperimentKind::PolymerCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::KernelTable => "kernel-table",
            ExperimentKind::GroundstateScan => "groundstate-scan",
            ExperimentKind::Dobrushin => "dobrushin",
            ExperimentKind::GirsanovCheck => "girsanov-check",
            ExperimentKind::Metastability => "metastability",
            ExperimentKind::PercolationScan => "percolation-scan",
            ExperimentKind::Badprobe => "badprobe",
            ExperimentKind::Chessboard => "chessboard",
            ExperimentKind::PolymerCheck => "polymer-check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full run description. Only the section named by `experiment` is used;
/// the others keep their defaults and are echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub kernel_table: KernelTableConfig,
    #[serde(default)]
    pub groundstate_scan: GroundstateScanConfig,
    #[serde(default)]
    pub dobrushin: DobrushinConfig,
    #[serde(default)]
    pub girsanov_check: GirsanovCheckConfig,
    #[serde(default)]
    pub metastability: MetastabilityConfig,
    #[serde(default)]
    pub percolation_scan: PercolationScanConfig,
    #[serde(default)]
    pub badprobe: BadprobeConfig,
    #[serde(default)]
    pub chessboard: ChessboardConfig,
    #[serde(default)]
    pub polymer_check: PolymerCheckConfig,
}

fn default_seed() -> u64 {
    20_240_601
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelTableConfig {
    pub times: Vec<f64>,
    /// Number of Δ points on `[0, 2π)`, starting at 0.
    pub n_delta: usize,
    pub quadrature_nodes: usize,
}

impl Default for KernelTableConfig {
    fn default() -> Self {
        Self { times: vec![0.05, 0.5, 1.0, 5.0, 20.0], n_delta: 64, quadrature_nodes: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundstateScanConfig {
    pub beta_j: Vec<f64>,
    pub times: Vec<f64>,
    pub coupling: f64,
    pub side: usize,
    pub oracle_grid: usize,
    pub tolerance: f64,
}

impl Default for GroundstateScanConfig {
    fn default() -> Self {
        Self {
            beta_j: vec![0.5, 1.0, 5.0, 20.0],
            times: vec![1.0, 2.0, 4.0],
            coupling: 1.0,
            side: 8,
            oracle_grid: 400,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DobrushinConfig {
    pub dimension: usize,
    pub beta_j: Vec<f64>,
}

impl Default for DobrushinConfig {
    fn default() -> Self {
        Self { dimension: 2, beta_j: (10..=30).map(|k| k as f64 / 100.0).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GirsanovCheckConfig {
    pub side: usize,
    pub beta: f64,
    pub coupling: f64,
    pub t: f64,
    pub dt: f64,
    pub paths: u64,
}

impl Default for GirsanovCheckConfig {
    fn default() -> Self {
        Self { side: 2, beta: 0.5, coupling: 1.0, t: 0.5, dt: 1e-3, paths: 100_000 }
    }
}

/// Chain parameters shared by the metastability and percolation runs.
/// Identical values and seed give identical chains in both experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetastabilityConfig {
    pub side: usize,
    pub t: f64,
    pub coupling: f64,
    pub beta_j_low: f64,
    pub beta_j_high: f64,
    /// Total sweeps per chain, burn-in included.
    pub sweeps: usize,
    pub burn_in: usize,
    pub proposal_width: f64,
    pub thin: usize,
    pub replicas: usize,
    /// `|M_LR|` must stay above this at low temperature.
    pub order_threshold: f64,
    /// `|mean M_LR|` must stay below this at high temperature.
    pub symmetric_bound: f64,
    pub batches: usize,
}

impl Default for MetastabilityConfig {
    fn default() -> Self {
        Self {
            side: 16,
            t: 2.0,
            coupling: 1.0,
            beta_j_low: 20.0,
            beta_j_high: 0.2,
            sweeps: 100_000,
            burn_in: 1_000,
            proposal_width: 0.5,
            thin: 10,
            replicas: 1,
            order_threshold: 0.9,
            symmetric_bound: 0.05,
            batches: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PercolationScanConfig {
    pub side: usize,
    pub t: f64,
    pub coupling: f64,
    pub beta_j_low: f64,
    pub beta_j_high: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub proposal_width: f64,
    pub replicas: usize,
    /// The checks use `δ = delta_factor · βJ`.
    pub delta_factor: f64,
    /// The scan covers `δ = k/delta_steps · delta_max_factor · βJ`.
    pub delta_max_factor: f64,
    pub delta_steps: usize,
    pub low_fraction: f64,
    pub high_fraction: f64,
}

impl Default for PercolationScanConfig {
    fn default() -> Self {
        let m = MetastabilityConfig::default();
        Self {
            side: m.side,
            t: m.t,
            coupling: m.coupling,
            beta_j_low: m.beta_j_low,
            beta_j_high: m.beta_j_high,
            sweeps: m.sweeps,
            burn_in: m.burn_in,
            proposal_width: m.proposal_width,
            replicas: m.replicas,
            delta_factor: 0.1,
            delta_max_factor: 0.5,
            delta_steps: 50,
            low_fraction: 0.9,
            high_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BadprobeConfig {
    pub sides: Vec<usize>,
    pub t: f64,
    pub coupling: f64,
    pub beta_j_low: f64,
    pub beta_j_high: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub proposal_width: f64,
    pub min_gap: f64,
    pub max_gap: f64,
}

impl Default for BadprobeConfig {
    fn default() -> Self {
        Self {
            sides: vec![8, 12, 16],
            t: 2.0,
            coupling: 1.0,
            beta_j_low: 20.0,
            beta_j_high: 0.1,
            sweeps: 20_000,
            burn_in: 1_000,
            proposal_width: 0.5,
            min_gap: 0.5,
            max_gap: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChessboardConfig {
    pub beta_j: Vec<f64>,
    pub coupling: f64,
    pub t: f64,
    pub sets: usize,
    pub n_terms: usize,
    pub n_grid: usize,
    pub tolerance: f64,
}

impl Default for ChessboardConfig {
    fn default() -> Self {
        Self { beta_j: vec![0.5, 5.0], coupling: 1.0, t: 2.0, sets: 20, n_terms: 6, n_grid: 16, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolymerCheckConfig {
    /// Random systems that pass the KP check.
    pub systems: usize,
    pub max_polymers: usize,
    pub n_sites: usize,
    pub max_support: usize,
    /// Weights are drawn uniformly from `[-weight_scale, weight_scale]`.
    pub weight_scale: f64,
    pub max_order: usize,
    pub tolerance: f64,
    /// Extra systems in the `id: s1,s2 : weight` text format, checked as well.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl Default for PolymerCheckConfig {
    fn default() -> Self {
        Self {
            systems: 50,
            max_polymers: 8,
            n_sites: 8,
            max_support: 3,
            weight_scale: 0.05,
            max_order: 12,
            tolerance: 1e-6,
            input: None,
        }
    }
}

impl ExperimentConfig {
    /// Defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            seed: default_seed(),
            out_dir: None,
            kernel_table: Default::default(),
            groundstate_scan: Default::default(),
            dobrushin: Default::default(),
            girsanov_check: Default::default(),
            metastability: Default::default(),
            percolation_scan: Default::default(),
            badprobe: Default::default(),
            chessboard: Default::default(),
            polymer_check: Default::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a config for `kind`. The `experiment` key may be omitted but
    /// must name `kind` when present.
    pub fn from_toml_for(kind: ExperimentKind, text: &str) -> Result<Self, HarnessError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        match table.get("experiment") {
            None => {
                table.insert("experiment".into(), toml::Value::String(kind.name().into()));
            }
            Some(toml::Value::String(s)) if s == kind.name() => {}
            Some(other) => {
                return Err(HarnessError::Usage(format!("config is for experiment {other}, not {kind}")));
            }
        }
        let cfg: Self = table.try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(kind: ExperimentKind, path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_for(kind, &text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Checks the section of the selected experiment against the
    /// preconditions of the library calls it feeds.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut v = Validator::new(self.experiment);
        match self.experiment {
            ExperimentKind::KernelTable => {
                let c = &self.kernel_table;
                v.nonempty("times", c.times.len());
                v.all_positive("times", &c.times);
                v.at_least("n_delta", c.n_delta, 1);
                v.at_least("quadrature_nodes", c.quadrature_nodes, 2);
            }
            ExperimentKind::GroundstateScan => {
                let c = &self.groundstate_scan;
                v.nonempty("beta_j", c.beta_j.len());
                v.nonempty("times", c.times.len());
                v.all_positive("beta_j", &c.beta_j);
                v.all_positive("times", &c.times);
                v.positive("coupling", c.coupling);
                v.even_side("side", c.side);
                v.at_least("oracle_grid", c.oracle_grid, 8);
                v.positive("tolerance", c.tolerance);
            }
            ExperimentKind::Dobrushin => {
                let c = &self.dobrushin;
                v.at_least("dimension", c.dimension, 1);
                v.nonempty("beta_j", c.beta_j.len());
                v.all_nonnegative("beta_j", &c.beta_j);
            }
            ExperimentKind::GirsanovCheck => {
                let c = &self.girsanov_check;
                v.at_least("side", c.side, 2);
                v.nonnegative("beta", c.beta);
                v.nonnegative("coupling", c.coupling);
                v.positive("t", c.t);
                v.positive("dt", c.dt);
                if c.dt > c.t {
                    v.fail("dt must not exceed t");
                }
                v.at_least("paths", c.paths as usize, 2);
            }
            ExperimentKind::Metastability => {
                let c = &self.metastability;
                v.even_side("side", c.side);
                v.positive("t", c.t);
                v.positive("coupling", c.coupling);
                v.positive("beta_j_low", c.beta_j_low);
                v.positive("beta_j_high", c.beta_j_high);
                v.sampler(c.sweeps, c.burn_in, c.proposal_width);
                v.at_least("thin", c.thin, 1);
                v.at_least("replicas", c.replicas, 1);
                v.unit_interval("order_threshold", c.order_threshold);
                v.positive("symmetric_bound", c.symmetric_bound);
                v.at_least("batches", c.batches, 2);
            }
            ExperimentKind::PercolationScan => {
                let c = &self.percolation_scan;
                v.even_side("side", c.side);
                v.positive("t", c.t);
                v.positive("coupling", c.coupling);
                v.positive("beta_j_low", c.beta_j_low);
                v.positive("beta_j_high", c.beta_j_high);
                v.sampler(c.sweeps, c.burn_in, c.proposal_width);
                v.at_least("replicas", c.replicas, 1);
                v.nonnegative("delta_factor", c.delta_factor);
                v.nonnegative("delta_max_factor", c.delta_max_factor);
                v.at_least("delta_steps", c.delta_steps, 1);
                v.unit_interval("low_fraction", c.low_fraction);
                v.unit_interval("high_fraction", c.high_fraction);
            }
            ExperimentKind::Badprobe => {
                let c = &self.badprobe;
                v.nonempty("sides", c.sides.len());
                for &s in &c.sides {
                    if s < 4 || s % 2 != 0 {
                        v.fail(format!("sides: {s} must be even and at least 4"));
                    }
                }
                v.positive("t", c.t);
                v.positive("coupling", c.coupling);
                v.positive("beta_j_low", c.beta_j_low);
                v.positive("beta_j_high", c.beta_j_high);
                v.sampler(c.sweeps, c.burn_in, c.proposal_width);
                // the probe reports 20 batch means
                if c.sweeps - c.burn_in.min(c.sweeps) < 20 {
                    v.fail("badprobe needs at least 20 sweeps after burn-in");
                }
                v.nonnegative("min_gap", c.min_gap);
                v.nonnegative("max_gap", c.max_gap);
            }
            ExperimentKind::Chessboard => {
                let c = &self.chessboard;
                v.nonempty("beta_j", c.beta_j.len());
                v.all_positive("beta_j", &c.beta_j);
                v.positive("coupling", c.coupling);
                v.positive("t", c.t);
                v.at_least("sets", c.sets, 1);
                v.at_least("n_terms", c.n_terms, 1);
                v.at_least("n_grid", c.n_grid, 2);
                if c.n_grid > 64 {
                    v.fail("n_grid must be at most 64");
                }
                v.nonnegative("tolerance", c.tolerance);
            }
            ExperimentKind::PolymerCheck => {
                let c = &self.polymer_check;
                v.at_least("max_polymers", c.max_polymers, 1);
                if c.max_polymers > 20 {
                    v.fail("max_polymers must be at most 20 for brute-force enumeration");
                }
                v.at_least("n_sites", c.n_sites, 1);
                v.at_least("max_support", c.max_support, 1);
                if c.max_support > c.n_sites {
                    v.fail("max_support must not exceed n_sites");
                }
                v.positive("weight_scale", c.weight_scale);
                v.at_least("max_order", c.max_order, 1);
                v.positive("tolerance", c.tolerance);
            }
        }
        v.finish()
    }
}

struct Validator {
    section: &'static str,
    problems: Vec<String>,
}

impl Validator {
    fn new(kind: ExperimentKind) -> Self {
        Self { section: kind.name(), problems: Vec::new() }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.problems.push(msg.into());
    }

    fn positive(&mut self, name: &str, x: f64) {
        if !(x > 0.0 && x.is_finite()) {
            self.fail(format!("{name} must be positive and finite, got {x}"));
        }
    }

    fn nonnegative(&mut self, name: &str, x: f64) {
        if !(x >= 0.0 && x.is_finite()) {
            self.fail(format!("{name} must be non-negative and finite, got {x}"));
        }
    }

    fn unit_interval(&mut self, name: &str, x: f64) {
        if !(0.0..=1.0).contains(&x) {
            self.fail(format!("{name} must lie in [0, 1], got {x}"));
        }
    }

    fn all_positive(&mut self, name: &str, xs: &[f64]) {
        for &x in xs {
            self.positive(name, x);
        }
    }

    fn all_nonnegative(&mut self, name: &str, xs: &[f64]) {
        for &x in xs {
            self.nonnegative(name, x);
        }
    }

    fn nonempty(&mut self, name: &str, len: usize) {
        if len == 0 {
            self.fail(format!("{name} must not be empty"));
        }
    }

    fn at_least(&mut self, name: &str, n: usize, min: usize) {
        if n < min {
            self.fail(format!("{name} must be at least {min}, got {n}"));
        }
    }

    fn even_side(&mut self, name: &str, side: usize) {
        if side < 2 || side % 2 != 0 {
            self.fail(format!("{name} must be even and at least 2, got {side}"));
        }
    }

    fn sampler(&mut self, sweeps: usize, burn_in: usize, width: f64) {
        if sweeps < burn_in {
            self.fail(format!("sweeps ({sweeps}) must be at least burn_in ({burn_in})"));
        }
        if !(width > 0.0 && width <= std::f64::consts::PI) {
            self.fail(format!("proposal_width must lie in (0, π], got {width}"));
        }
    }

    fn finish(self) -> Result<(), HarnessError> {
        if self.problems.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(format!("[{}] {}", self.section.replace('-', "_"), self.problems.join("; "))))
        }
    }
}
