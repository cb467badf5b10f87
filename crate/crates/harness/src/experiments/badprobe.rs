use rotor_gibbs::conditioned_model::ConditionedParams;
use rotor_gibbs::gibbs_sampler::{bad_config_probe, BadProbeRow, SamplerConfig, RING_PAIR};

use super::{num, Outcome, Result, Table};
use crate::config::BadprobeConfig;

pub(super) fn run(c: &BadprobeConfig, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut detail = Table::new(&[
        "temperature", "beta_j", "L", "mean_xi", "stderr_xi", "mean_eta", "stderr_eta", "gap", "stderr",
    ]);
    let mut results: Vec<(&str, f64, Vec<BadProbeRow>)> = Vec::new();
    // the probe uses seeds seed + 2k and seed + 2k + 1 for side k
    let stride = 2 * c.sides.len() as u64;
    for (k, (temperature, beta_j)) in [("low", c.beta_j_low), ("high", c.beta_j_high)].into_iter().enumerate() {
        let p = ConditionedParams::new(beta_j / c.coupling, c.coupling, c.t)?;
        let cfg = SamplerConfig {
            sweeps: c.sweeps,
            burn_in: c.burn_in,
            proposal_width: c.proposal_width,
            seed: seed.wrapping_add(k as u64 * stride),
            thin: 1,
        };
        let rows = bad_config_probe(&c.sides, &p, RING_PAIR, &cfg)?;
        let mut gaps = Table::new(&["L", "gap", "stderr"]);
        for r in &rows {
            gaps.row([r.side.to_string(), num(r.gap), num(r.stderr)]);
            detail.row([
                temperature.to_string(),
                num(beta_j),
                r.side.to_string(),
                num(r.mean_xi),
                num(r.stderr_xi),
                num(r.mean_eta),
                num(r.stderr_eta),
                num(r.gap),
                num(r.stderr),
            ]);
        }
        out.file(format!("badprobe_{temperature}.csv"), gaps.finish());
        results.push((temperature, beta_j, rows));
    }
    out.file("badprobe_detail.csv", detail.finish());

    let (_, bj, low) = &results[0];
    let small: Vec<String> =
        low.iter().filter(|r| !(r.gap >= c.min_gap)).map(|r| format!("L={}: {:.4}", r.side, r.gap)).collect();
    let all: Vec<String> = low.iter().map(|r| format!("L={}: {:.4} ± {:.4}", r.side, r.gap, r.stderr)).collect();
    out.check(
        "low_temperature_boundary_sensitive",
        small.is_empty(),
        format!("βJ = {bj}, needs gap ≥ {}: {}", c.min_gap, all.join(", ")),
    );
    let (_, bj, high) = &results[1];
    let largest = high.iter().max_by_key(|r| r.side).expect("sides validated non-empty");
    out.check(
        "high_temperature_boundary_insensitive",
        largest.gap <= c.max_gap,
        format!("βJ = {bj}, L = {}: gap {:.4} ± {:.4} (needs ≤ {})", largest.side, largest.gap, largest.stderr, c.max_gap),
    );
    Ok(out)
}
