use rotor_gibbs::dual_percolation::{build_low_energy_graph, connected_clusters, ground_plaquette_energy, ClusterReport};
use rotor_gibbs::gibbs_sampler::m_lr;

use super::chains::{run_chains, ChainPlan};
use super::{num, Outcome, Result, Table};
use crate::config::PercolationScanConfig;

fn orientation(r: &ClusterReport) -> String {
    r.orientation_of_largest().map_or_else(|| "none".to_string(), |o| o.to_string())
}

pub(super) fn run(c: &PercolationScanConfig, seed: u64) -> Result<Outcome> {
    let plan = ChainPlan {
        side: c.side,
        t: c.t,
        coupling: c.coupling,
        beta_j_low: c.beta_j_low,
        beta_j_high: c.beta_j_high,
        sweeps: c.sweeps,
        burn_in: c.burn_in,
        proposal_width: c.proposal_width,
        // only the final state is analysed; thinning does not touch the chain itself
        thin: c.sweeps.max(1),
        replicas: c.replicas,
    };
    let runs = run_chains(&plan, seed)?;
    let mut out = Outcome::default();
    let mut summary = Table::new(&[
        "temperature", "beta_j", "start", "replica", "delta", "n_vertices", "largest_fraction", "spans",
        "orientation_of_largest", "final_M_LR",
    ]);
    let mut nested = true;
    let mut low_fail = Vec::new();
    let mut high_fail = Vec::new();
    let mut low_detail = Vec::new();
    let mut high_detail = Vec::new();
    for r in &runs {
        let m = ground_plaquette_energy(&r.params)?;
        let mut table =
            Table::new(&["delta", "n_vertices", "n_clusters", "largest_fraction", "spans", "orientation_of_largest"]);
        let mut previous: Option<Vec<bool>> = None;
        for k in 0..=c.delta_steps {
            let delta = k as f64 / c.delta_steps as f64 * c.delta_max_factor * r.beta_j;
            let g = build_low_energy_graph(&r.last, &r.params, m, delta)?;
            let rep = connected_clusters(&g);
            table.row([
                num(delta),
                g.n_vertices().to_string(),
                rep.n_clusters().to_string(),
                num(rep.largest_fraction),
                rep.spans.to_string(),
                orientation(&rep),
            ]);
            if let Some(prev) = &previous {
                nested &= prev.iter().zip(g.membership()).all(|(a, b)| !a || *b);
            }
            previous = Some(g.membership().to_vec());
        }
        out.file(format!("percolation_{}.csv", r.tag()), table.finish());

        let delta = c.delta_factor * r.beta_j;
        let g = build_low_energy_graph(&r.last, &r.params, m, delta)?;
        let rep = connected_clusters(&g);
        summary.row([
            r.temperature.to_string(),
            num(r.beta_j),
            r.start.to_string(),
            r.replica.to_string(),
            num(delta),
            g.n_vertices().to_string(),
            num(rep.largest_fraction),
            rep.spans.to_string(),
            orientation(&rep),
            num(m_lr(r.last.angles())),
        ]);
        let line = format!("{}: fraction {:.3}, spans {}, {}", r.tag(), rep.largest_fraction, rep.spans, orientation(&rep));
        if r.temperature == "low" {
            if !(rep.largest_fraction > c.low_fraction && rep.spans) {
                low_fail.push(r.tag());
            }
            low_detail.push(line);
        } else {
            if !(rep.largest_fraction < c.high_fraction && !rep.spans) {
                high_fail.push(r.tag());
            }
            high_detail.push(line);
        }
    }
    out.file("percolation_summary.csv", summary.finish());
    out.check("low_energy_sets_nested", nested, "V_δ ⊆ V_δ′ for every consecutive pair of scan values");
    out.check(
        "low_temperature_percolates",
        low_fail.is_empty(),
        format!("δ = {}·βJ, needs fraction > {} and spanning; {}", c.delta_factor, c.low_fraction, low_detail.join("; ")),
    );
    out.check(
        "high_temperature_does_not_percolate",
        high_fail.is_empty(),
        format!("δ = {}·βJ, needs fraction < {} and not spanning; {}", c.delta_factor, c.high_fraction, high_detail.join("; ")),
    );
    Ok(out)
}
