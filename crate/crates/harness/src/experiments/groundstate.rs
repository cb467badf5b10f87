use std::f64::consts::{FRAC_PI_2, PI};

use rotor_gibbs::conditioned_model::{
    classify_stationary, ground_states, minimize_cell_by_grid, ConditionedParams, StationaryKind,
};
use rotor_gibbs::rotor_model::LatticeShape;

use super::{num, Outcome, Result, Table};
use crate::config::GroundstateScanConfig;

fn label(k: StationaryKind) -> &'static str {
    match k {
        StationaryKind::Minimum => "minimum",
        StationaryKind::Maximum => "maximum",
        StationaryKind::Saddle => "saddle",
        StationaryKind::Degenerate => "degenerate",
    }
}

pub(super) fn run(c: &GroundstateScanConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let shape = LatticeShape::new(c.side)?;
    let mut gs_table = Table::new(&["beta_j", "t", "h", "epsilon", "oracle_epsilon", "abs_error", "m"]);
    let mut st_table = Table::new(&["beta_j", "t", "z", "y", "kind", "expected"]);
    let mut worst = 0.0f64;
    // (group, mismatches)
    let mut mismatches: Vec<(&str, Vec<String>)> = vec![("saddles", vec![]), ("maxima", vec![]), ("minima", vec![])];
    for &bj in &c.beta_j {
        for &t in &c.times {
            let p = ConditionedParams::new(bj / c.coupling, c.coupling, t)?;
            let gs = ground_states(&p, shape)?;
            let eps = gs.epsilon_t;
            // the two minima are degenerate; the oracle may land on either mirror image
            let oracle = minimize_cell_by_grid(&p, c.oracle_grid).tilt().abs();
            let err = (oracle - eps).abs();
            worst = worst.max(err);
            gs_table.row([num(bj), num(t), num(p.field()), num(eps), num(oracle), num(err), num(gs.m)]);

            let points = [
                (0, 0.0, 0.0, StationaryKind::Saddle),
                (0, PI, PI, StationaryKind::Saddle),
                (1, 0.0, PI, StationaryKind::Maximum),
                (1, PI, 0.0, StationaryKind::Maximum),
                (2, FRAC_PI_2 + eps, FRAC_PI_2 - eps, StationaryKind::Minimum),
                (2, 3.0 * FRAC_PI_2 - eps, 3.0 * FRAC_PI_2 + eps, StationaryKind::Minimum),
            ];
            for (group, z, y, expected) in points {
                let kind = classify_stationary(z, y, &p)?;
                st_table.row([num(bj), num(t), num(z), num(y), label(kind).into(), label(expected).to_string()]);
                if kind != expected {
                    mismatches[group].1.push(format!("({z:.4},{y:.4}) at βJ={bj}, t={t} is a {}", label(kind)));
                }
            }
        }
    }
    out.file("groundstate.csv", gs_table.finish());
    out.file("stationary.csv", st_table.finish());
    out.check(
        "epsilon_matches_oracle",
        worst <= c.tolerance,
        format!("worst |ε_closed − ε_oracle| = {worst:.3e} (tolerance {:.1e})", c.tolerance),
    );
    for (group, bad) in mismatches {
        let detail = if bad.is_empty() {
            "all points carry the expected Hessian signature".to_string()
        } else {
            format!("{} mismatches, first: {}", bad.len(), bad[0])
        };
        out.check(format!("labels_{group}"), bad.is_empty(), detail);
    }
    Ok(out)
}
