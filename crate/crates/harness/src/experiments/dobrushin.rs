use rotor_gibbs::rotor_model::{dobrushin_sum, XyParams};

use super::{num, Outcome, Result, Table};
use crate::config::DobrushinConfig;

pub(super) fn run(c: &DobrushinConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut grid = c.beta_j.clone();
    grid.sort_by(f64::total_cmp);
    let mut table = Table::new(&["beta_j", "dimension", "sum", "satisfied"]);
    let mut rows = Vec::with_capacity(grid.len());
    for &bj in &grid {
        let r = dobrushin_sum(&XyParams::new(bj, 1.0)?, c.dimension);
        table.row([num(bj), c.dimension.to_string(), num(r.sum), r.satisfied.to_string()]);
        rows.push((bj, r.satisfied));
    }
    out.file("dobrushin.csv", table.finish());

    let threshold = 1.0 / (2.0 * c.dimension as f64);
    let consistent = rows.iter().all(|&(bj, s)| s == (bj < threshold));
    out.check("criterion_iff_4dbj_below_2", consistent, format!("threshold βJ = {threshold}"));
    let last_in = rows.iter().rev().find(|r| r.1).map(|r| r.0);
    let first_out = rows.iter().find(|r| !r.1).map(|r| r.0);
    let (passed, detail) = match (last_in, first_out) {
        (Some(a), Some(b)) => (
            a < threshold && threshold <= b && a < b,
            format!("crossing between βJ = {a} and βJ = {b}"),
        ),
        _ => (false, "grid does not straddle the threshold".to_string()),
    };
    out.check("threshold_detected", passed, detail);
    Ok(out)
}
