use rotor_gibbs::gibbs_sampler::mean_stderr;
use serde::Serialize;

use super::chains::{run_chains, ChainPlan, ChainRun};
use super::{num, Outcome, Result, Table};
use crate::config::MetastabilityConfig;

/// JSON sidecar next to every series file.
#[derive(Serialize)]
struct SeriesMeta<'a> {
    temperature: &'a str,
    beta_j: f64,
    coupling: f64,
    t: f64,
    side: usize,
    start: &'a str,
    replica: usize,
    seed: u64,
    sweeps: usize,
    burn_in: usize,
    thin: usize,
    proposal_width: f64,
    tuned_width: f64,
    samples: usize,
}

pub(super) fn run(c: &MetastabilityConfig, seed: u64) -> Result<Outcome> {
    let plan = ChainPlan {
        side: c.side,
        t: c.t,
        coupling: c.coupling,
        beta_j_low: c.beta_j_low,
        beta_j_high: c.beta_j_high,
        sweeps: c.sweeps,
        burn_in: c.burn_in,
        proposal_width: c.proposal_width,
        thin: c.thin,
        replicas: c.replicas,
    };
    let runs = run_chains(&plan, seed)?;
    let mut out = Outcome::default();
    let mut summary = Table::new(&[
        "temperature", "beta_j", "start", "replica", "samples", "mean_M_LR", "stderr", "min_M_LR", "max_M_LR",
    ]);
    for r in &runs {
        let tag = r.tag();
        out.file(format!("series_{tag}.csv"), r.series.to_csv());
        let meta = SeriesMeta {
            temperature: r.temperature,
            beta_j: r.beta_j,
            coupling: c.coupling,
            t: c.t,
            side: c.side,
            start: r.start,
            replica: r.replica,
            seed: r.seed,
            sweeps: c.sweeps,
            burn_in: c.burn_in,
            thin: c.thin,
            proposal_width: c.proposal_width,
            tuned_width: r.series.width,
            samples: r.series.len(),
        };
        let mut json = serde_json::to_string_pretty(&meta).expect("sidecar serialises");
        json.push('\n');
        out.file(format!("series_{tag}.json"), json);
        let (mean, err) = mean_stderr(&r.series.m_lr, c.batches);
        let (lo, hi) = r.series.m_lr_range.unwrap_or((f64::NAN, f64::NAN));
        summary.row([
            r.temperature.to_string(),
            num(r.beta_j),
            r.start.to_string(),
            r.replica.to_string(),
            r.series.len().to_string(),
            num(mean),
            num(err),
            num(lo),
            num(hi),
        ]);
    }
    out.file("metastability_summary.csv", summary.finish());
    checks(&mut out, &runs, c);
    Ok(out)
}

fn checks(out: &mut Outcome, runs: &[ChainRun], c: &MetastabilityConfig) {
    let thr = c.order_threshold;
    for (start, sign) in [("ri", 1.0), ("le", -1.0)] {
        let low: Vec<&ChainRun> = runs.iter().filter(|r| r.temperature == "low" && r.start == start).collect();
        // worst signed excursion towards the other phase over every sweep
        let extremes: Option<Vec<f64>> = low
            .iter()
            .map(|r| r.series.m_lr_range.map(|(lo, hi)| if sign > 0.0 { lo } else { -hi }))
            .collect();
        let name = format!("low_temperature_{start}_keeps_phase");
        match extremes {
            Some(v) if !v.is_empty() => {
                let worst = v.iter().copied().fold(f64::INFINITY, f64::min);
                let relation = if sign > 0.0 { format!("> {thr}") } else { format!("< -{thr}") };
                out.check(
                    name,
                    worst > thr,
                    format!("βJ = {}: extreme M_LR over every sweep = {:.4} (needs {relation})", c.beta_j_low, sign * worst),
                );
            }
            _ => out.check(name, false, "no post-burn-in sweeps"),
        }
    }
    for start in ["ri", "le"] {
        let mut bad = Vec::new();
        let mut details = Vec::new();
        for r in runs.iter().filter(|r| r.temperature == "high" && r.start == start) {
            let (m, e) = mean_stderr(&r.series.m_lr, c.batches);
            details.push(format!("{m:.4} ± {e:.4}"));
            if !(m.abs() < c.symmetric_bound && m.abs() <= 3.0 * e) {
                bad.push(r.replica);
            }
        }
        out.check(
            format!("high_temperature_{start}_symmetric"),
            bad.is_empty(),
            format!("βJ = {}: mean M_LR {}", c.beta_j_high, details.join(", ")),
        );
    }
}
