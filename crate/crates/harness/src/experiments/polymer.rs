use rand::seq::index::sample;
use rand::Rng;
use rotor_gibbs::polymer_expansion::{brute_force_log_z, kp_check, truncated_expansion, Polymer, PolymerSystem};
use rotor_gibbs::rng::stream;

use super::{num, Outcome, Result, Table};
use crate::config::PolymerCheckConfig;
use crate::HarnessError;

const HAND_VALUES: [(f64, f64, bool); 2] = [(0.3, 0.8155, true), (0.4, 1.0873, false)];

fn random_system<R: Rng>(c: &PolymerCheckConfig, rng: &mut R) -> Result<PolymerSystem> {
    let n = rng.random_range(1..=c.max_polymers);
    let entries = (0..n)
        .map(|id| {
            let size = rng.random_range(1..=c.max_support);
            let support = sample(rng, c.n_sites, size).into_vec();
            let w = c.weight_scale * (2.0 * rng.random::<f64>() - 1.0);
            Ok((Polymer::new(id as u64, support)?, w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolymerSystem::new(entries)?)
}

pub(super) fn run(c: &PolymerCheckConfig, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut rng = stream(seed, 0);
    let mut systems: Vec<(String, PolymerSystem)> = Vec::new();
    let mut attempts = 0usize;
    while systems.len() < c.systems && attempts < 1000 * c.systems.max(1) {
        attempts += 1;
        let s = random_system(c, &mut rng)?;
        if kp_check(&s)?.holds {
            systems.push((format!("random{}", systems.len()), s));
        }
    }
    out.check(
        "enough_kp_systems",
        systems.len() == c.systems,
        format!("{} of {} systems pass KP after {attempts} draws", systems.len(), c.systems),
    );
    if let Some(path) = &c.input {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        systems.push(("input".to_string(), PolymerSystem::parse(&text)?));
    }

    let mut table = Table::new(&["system", "n_polymers", "kp_holds", "kp_worst_ratio", "brute_force", "truncated", "abs_error"]);
    let mut worst = 0.0f64;
    for (name, s) in &systems {
        let kp = kp_check(s)?;
        let exact = brute_force_log_z(s)?;
        let approx = truncated_expansion(s, c.max_order)?;
        let err = (exact - approx).abs();
        if kp.holds {
            worst = worst.max(err);
        }
        table.row([
            name.clone(),
            s.len().to_string(),
            kp.holds.to_string(),
            num(kp.worst_ratio),
            num(exact),
            num(approx),
            num(err),
        ]);
    }
    out.file("polymer.csv", table.finish());
    out.check(
        "expansion_matches_enumeration",
        worst <= c.tolerance,
        format!("worst |truncated({}) − ln Z| = {worst:.3e} over KP systems", c.max_order),
    );

    let mut thresholds = Table::new(&["weight", "lhs", "holds"]);
    let mut ok = true;
    for (w, hand, expect) in HAND_VALUES {
        let s = PolymerSystem::new(vec![(Polymer::new(0, [0])?, w)])?;
        let r = kp_check(&s)?;
        ok &= (r.worst_ratio - hand).abs() <= 5e-5 && r.holds == expect;
        thresholds.row([num(w), num(r.worst_ratio), r.holds.to_string()]);
    }
    out.file("polymer_thresholds.csv", thresholds.finish());
    out.check("single_polymer_thresholds", ok, "w = 0.3 → 0.8155 holds, w = 0.4 → 1.0873 fails");
    Ok(out)
}
