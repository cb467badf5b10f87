//! Chains shared by the metastability and percolation experiments.

use rayon::prelude::*;
use rotor_gibbs::conditioned_model::{ground_states, ConditionedParams};
use rotor_gibbs::gibbs_sampler::{run_chain_with, GibbsModel, ObservableSeries, SamplerConfig};
use rotor_gibbs::rotor_model::{LatticeShape, SpinConfig};

use super::Result;

#[derive(Debug, Clone, Copy)]
pub(super) struct ChainPlan {
    pub side: usize,
    pub t: f64,
    pub coupling: f64,
    pub beta_j_low: f64,
    pub beta_j_high: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub proposal_width: f64,
    pub thin: usize,
    pub replicas: usize,
}

pub(super) struct ChainRun {
    /// `low` or `high`.
    pub temperature: &'static str,
    pub beta_j: f64,
    /// `ri` or `le`.
    pub start: &'static str,
    pub replica: usize,
    pub seed: u64,
    pub params: ConditionedParams,
    pub series: ObservableSeries,
    pub last: SpinConfig,
}

impl ChainRun {
    pub fn tag(&self) -> String {
        format!("{}_{}_r{}", self.temperature, self.start, self.replica)
    }
}

/// Runs every (temperature, start, replica) chain. Chain `k` in that
/// nesting order uses seed `base + k`, so the thread count never matters.
pub(super) fn run_chains(plan: &ChainPlan, base: u64) -> Result<Vec<ChainRun>> {
    let shape = LatticeShape::new(plan.side)?;
    let mut jobs = Vec::new();
    for (temperature, beta_j) in [("low", plan.beta_j_low), ("high", plan.beta_j_high)] {
        for start in ["ri", "le"] {
            for replica in 0..plan.replicas {
                let seed = base.wrapping_add(jobs.len() as u64);
                jobs.push((temperature, beta_j, start, replica, seed));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(temperature, beta_j, start, replica, seed)| {
            let params = ConditionedParams::new(beta_j / plan.coupling, plan.coupling, plan.t)?;
            let gs = ground_states(&params, shape)?;
            let model = GibbsModel::conditioned(shape, &params)?;
            let init = if start == "ri" { &gs.x_ri } else { &gs.x_le };
            let cfg = SamplerConfig {
                sweeps: plan.sweeps,
                burn_in: plan.burn_in,
                proposal_width: plan.proposal_width,
                seed,
                thin: plan.thin,
            };
            let (series, last) = run_chain_with(init.angles(), &model, &cfg, false, |_, _| {})?;
            Ok(ChainRun {
                temperature,
                beta_j,
                start,
                replica,
                seed,
                params,
                series,
                last: SpinConfig::from_angles(shape, last)?,
            })
        })
        .collect()
}
