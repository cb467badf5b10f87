use rayon::prelude::*;
use rotor_gibbs::path_dynamics::{check_potential_bound, girsanov_density, integrate_sde, DriftSpec, PathGrid};
use rotor_gibbs::rng::stream;
use rotor_gibbs::rotor_model::{LatticeShape, SpinConfig};

use super::{num, Outcome, Result, Table};
use crate::config::GirsanovCheckConfig;

pub(super) fn run(c: &GirsanovCheckConfig, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let shape = LatticeShape::new(c.side)?;
    let grid = PathGrid::with_step(c.t, c.dt)?;
    let samples: Vec<(f64, bool, f64)> = (0..c.paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k);
            let init = SpinConfig::random(shape, &mut rng);
            let traj = integrate_sde(&init, &DriftSpec::free(), grid, &mut rng)?;
            let bound = check_potential_bound(&traj, c.beta, c.coupling)?;
            Ok((girsanov_density(&traj, c.beta, c.coupling), bound.holds, bound.worst_ratio))
        })
        .collect::<Result<_>>()?;

    let mut paths = Table::new(&["path", "F", "bound_ratio"]);
    for (k, (f, _, r)) in samples.iter().enumerate() {
        paths.row([k.to_string(), num(*f), num(*r)]);
    }
    out.file("girsanov_paths.csv", paths.finish());

    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    let violations = samples.iter().filter(|s| !s.1).count();
    let worst = samples.iter().map(|s| s.2).fold(0.0, f64::max);
    let mut summary = Table::new(&["paths", "mean_F", "stderr", "bound_violations", "worst_bound_ratio"]);
    summary.row([c.paths.to_string(), num(mean), num(stderr), violations.to_string(), num(worst)]);
    out.file("girsanov_summary.csv", summary.finish());

    out.check(
        "martingale",
        (mean - 1.0).abs() <= 3.0 * stderr,
        format!("mean F = {mean:.6} ± {stderr:.6} over {} paths", c.paths),
    );
    out.check(
        "pathwise_bound",
        violations == 0,
        format!("{violations} violating paths, worst ratio {worst:.4}"),
    );
    Ok(out)
}
