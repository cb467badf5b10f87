//! One module per experiment. Each returns its data files and acceptance
//! checks; [`run_experiment`] owns all file writing.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::{info, warn};

use crate::manifest::{content_hash, file_digest, Check, FileEntry, RunRecord, RunStatus, Timings};
use crate::{ExperimentConfig, ExperimentKind, HarnessError};

mod badprobe;
mod chains;
mod chessboard;
mod dobrushin;
mod girsanov;
mod groundstate;
mod kernel;
mod metastability;
mod percolation;
mod polymer;

pub type Result<T> = std::result::Result<T, HarnessError>;

/// A named output file held in memory until the run finishes.
#[derive(Debug, Clone)]
pub struct DataFile {
    pub name: String,
    pub contents: Vec<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<DataFile>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn file(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push(DataFile { name: name.into(), contents: contents.into() });
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }
}

/// Validates, writes a `running` manifest, computes, writes the data files
/// and finalises the manifest. Numerical failures end up in the manifest
/// with status `error` rather than as an `Err`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let mut record = RunRecord {
        experiment: config.experiment,
        status: RunStatus::Running,
        seed: config.seed,
        threads: rayon::current_num_threads(),
        input_hash: content_hash(config.to_toml().as_bytes()),
        config: config.clone(),
        files: Vec::new(),
        checks: Vec::new(),
        timings: Timings { started_unix, wall_seconds: 0.0 },
        error: None,
    };
    record.write(out_dir)?;
    info!("{} -> {}", config.experiment, out_dir.display());
    let clock = Instant::now();
    match compute(config) {
        Ok(outcome) => {
            for f in &outcome.files {
                let path = out_dir.join(&f.name);
                std::fs::write(&path, &f.contents).map_err(|e| HarnessError::io(&path, e))?;
                record.files.push(FileEntry {
                    name: f.name.clone(),
                    bytes: f.contents.len() as u64,
                    sha256: file_digest(&f.contents),
                });
            }
            for c in outcome.checks.iter().filter(|c| !c.passed) {
                warn!("check {} failed: {}", c.name, c.detail);
            }
            record.status =
                if outcome.checks.iter().all(|c| c.passed) { RunStatus::Passed } else { RunStatus::Failed };
            record.checks = outcome.checks;
        }
        Err(e) => {
            warn!("{} aborted: {e}", config.experiment);
            record.status = RunStatus::Error;
            record.error = Some(e.to_string());
        }
    }
    record.timings.wall_seconds = clock.elapsed().as_secs_f64();
    record.write(out_dir)?;
    Ok(record)
}

/// Runs the experiment without touching the file system.
pub fn compute(config: &ExperimentConfig) -> Result<Outcome> {
    let seed = config.seed;
    match config.experiment {
        ExperimentKind::KernelTable => kernel::run(&config.kernel_table),
        ExperimentKind::GroundstateScan => groundstate::run(&config.groundstate_scan),
        ExperimentKind::Dobrushin => dobrushin::run(&config.dobrushin),
        ExperimentKind::GirsanovCheck => girsanov::run(&config.girsanov_check, seed),
        ExperimentKind::Metastability => metastability::run(&config.metastability, seed),
        ExperimentKind::PercolationScan => percolation::run(&config.percolation_scan, seed),
        ExperimentKind::Badprobe => badprobe::run(&config.badprobe, seed),
        ExperimentKind::Chessboard => chessboard::run(&config.chessboard, seed),
        ExperimentKind::PolymerCheck => polymer::run(&config.polymer_check, seed),
    }
}

/// Fixed-precision float for CSV: 17 significant digits.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// RFC-4180 table built row by row.
pub(crate) struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub(crate) fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub(crate) fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub(crate) fn finish(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}
