//! Abstract polymer systems: Kotecký–Preiss criterion, brute-force partition
//! functions and truncated cluster expansions.
//!
//! Polymers are finite non-empty supports with real weights; two polymers
//! are compatible iff their supports are disjoint. The partition function is
//! the sum over pairwise-compatible families of the product of weights.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{domain, usage, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polymer {
    pub id: u64,
    support: BTreeSet<usize>,
}

impl Polymer {
    pub fn new(id: u64, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let support: BTreeSet<usize> = support.into_iter().collect();
        if support.is_empty() {
            return usage(format!("polymer {id} has an empty support"));
        }
        Ok(Polymer { id, support })
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn size(&self) -> usize {
        self.support.len()
    }

    pub fn compatible(&self, other: &Polymer) -> bool {
        self.support.is_disjoint(&other.support)
    }
}

/// Polymers together with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymerSystem {
    polymers: Vec<Polymer>,
    weights: Vec<f64>,
}

impl PolymerSystem {
    pub fn new(entries: Vec<(Polymer, f64)>) -> Result<Self> {
        let mut ids = HashSet::new();
        for (p, w) in &entries {
            if !ids.insert(p.id) {
                return usage(format!("duplicate polymer id {}", p.id));
            }
            if !w.is_finite() {
                return usage(format!("polymer {} has a non-finite weight", p.id));
            }
        }
        let (polymers, weights) = entries.into_iter().unzip();
        Ok(PolymerSystem { polymers, weights })
    }

    pub fn empty() -> Self {
        PolymerSystem { polymers: Vec::new(), weights: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.polymers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polymers.is_empty()
    }

    pub fn polymers(&self) -> &[Polymer] {
        &self.polymers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same polymers with weights multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        PolymerSystem { polymers: self.polymers.clone(), weights: self.weights.iter().map(|w| w * factor).collect() }
    }

    /// Disjoint union; supports of `other` are shifted past those of `self`
    /// and its ids past the largest id of `self`.
    pub fn disjoint_union(&self, other: &PolymerSystem) -> Self {
        let site_shift = self.polymers.iter().flat_map(|p| p.support.iter()).max().map_or(0, |m| m + 1);
        let id_shift = self.polymers.iter().map(|p| p.id).max().map_or(0, |m| m + 1);
        let mut polymers = self.polymers.clone();
        let mut weights = self.weights.clone();
        for (p, w) in other.polymers.iter().zip(&other.weights) {
            polymers.push(Polymer { id: p.id + id_shift, support: p.support.iter().map(|s| s + site_shift).collect() });
            weights.push(*w);
        }
        PolymerSystem { polymers, weights }
    }

    /// Parses lines `id: s1,s2,... : weight`; blank lines and `#` comments
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(':').map(str::trim).collect();
            if parts.len() != 3 {
                return usage(format!("line {}: expected `id: sites : weight`", n + 1));
            }
            let id: u64 = parts[0].parse().map_err(|e| crate::Error::Usage(format!("line {}: bad id: {e}", n + 1)))?;
            let sites = parts[1]
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| crate::Error::Usage(format!("line {}: bad site: {e}", n + 1)))?;
            let w: f64 = parts[2].parse().map_err(|e| crate::Error::Usage(format!("line {}: bad weight: {e}", n + 1)))?;
            entries.push((Polymer::new(id, sites)?, w));
        }
        PolymerSystem::new(entries)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, w) in self.polymers.iter().zip(&self.weights) {
            let sites: Vec<String> = p.support.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}: {} : {:.16e}", p.id, sites.join(","), w);
        }
        s
    }

    /// Bitmask of polymers incompatible with each polymer (itself included).
    fn conflict_masks(&self) -> Vec<u64> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).filter(|&j| !self.polymers[i].compatible(&self.polymers[j])).fold(0u64, |m, j| m | (1 << j)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpReport {
    pub holds: bool,
    /// `max_γ Σ_{γ′ ≁ γ} |w(γ′)| e^{a(γ′)+d(γ′)} / a(γ)`.
    pub worst_ratio: f64,
}

/// Kotecký–Preiss check with `a(γ) = |supp γ|` and `d ≡ 0`.
pub fn kp_check(system: &PolymerSystem) -> Result<KpReport> {
    kp_check_with(system, |p| p.size() as f64, |_| 0.0)
}

/// Kotecký–Preiss check with caller-supplied `a > 0` and `d`.
pub fn kp_check_with(
    system: &PolymerSystem,
    a: impl Fn(&Polymer) -> f64,
    d: impl Fn(&Polymer) -> f64,
) -> Result<KpReport> {
    let av: Vec<f64> = system.polymers.iter().map(&a).collect();
    if let Some(k) = av.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return usage(format!("a must be positive and finite; a = {} on polymer {}", av[k], system.polymers[k].id));
    }
    let dv: Vec<f64> = system.polymers.iter().map(&d).collect();
    let mut worst = 0.0f64;
    for (i, g) in system.polymers.iter().enumerate() {
        let lhs: f64 = system
            .polymers
            .iter()
            .enumerate()
            .filter(|(_, h)| !g.compatible(h))
            .map(|(j, _)| system.weights[j].abs() * (av[j] + dv[j]).exp())
            .sum();
        worst = worst.max(lhs / av[i]);
    }
    Ok(KpReport { holds: worst <= 1.0, worst_ratio: worst })
}

const BRUTE_FORCE_LIMIT: usize = 20;

/// `ln Z` by enumerating every compatible family (at most 20 polymers).
pub fn brute_force_log_z(system: &PolymerSystem) -> Result<f64> {
    if system.len() > BRUTE_FORCE_LIMIT {
        return usage(format!("{} polymers; brute force is limited to {BRUTE_FORCE_LIMIT}", system.len()));
    }
    let z: f64 = family_sums(system, system.len()).iter().sum();
    if !(z > 0.0) {
        return domain(format!("partition function is not positive (Z = {z})"));
    }
    Ok(z.ln())
}

/// `z_k`: sum over compatible families of exactly `k` polymers of the
/// product of weights, for `k = 0..=max_k`.
fn family_sums(system: &PolymerSystem, max_k: usize) -> Vec<f64> {
    fn walk(start: usize, blocked: u64, k: usize, prod: f64, masks: &[u64], w: &[f64], max_k: usize, z: &mut [f64]) {
        z[k] += prod;
        if k == max_k {
            return;
        }
        for i in start..w.len() {
            if blocked & (1 << i) == 0 {
                walk(i + 1, blocked | masks[i], k + 1, prod * w[i], masks, w, max_k, z);
            }
        }
    }
    let masks = system.conflict_masks();
    let mut z = vec![0.0; max_k + 1];
    walk(0, 0, 0, 1.0, &masks, &system.weights, max_k, &mut z);
    z
}

/// Cluster expansion of `ln Z` summed over clusters of at most `max_order`
/// polymers (counted with multiplicity).
///
/// Clusters of `n` polymers are exactly the `λ^n` coefficient of
/// `ln Z(λ)`, where every weight is scaled by `λ`; these coefficients follow
/// from the family sums `z_k` by the logarithm recurrence
/// `n ℓ_n = n z_n − Σ_{k<n} k ℓ_k z_{n−k}`.
pub fn truncated_expansion(system: &PolymerSystem, max_order: usize) -> Result<f64> {
    Ok(expansion_orders(system, max_order)?.iter().sum())
}

/// The individual orders `ℓ_1, …, ℓ_max_order` of the cluster expansion.
pub fn expansion_orders(system: &PolymerSystem, max_order: usize) -> Result<Vec<f64>> {
    if max_order == 0 {
        return usage("max_order must be at least 1");
    }
    if system.len() > 64 {
        return usage("at most 64 polymers are supported");
    }
    let z = family_sums(system, max_order);
    let mut l = vec![0.0; max_order + 1];
    for n in 1..=max_order {
        let mut s = n as f64 * z[n];
        for k in 1..n {
            s -= k as f64 * l[k] * z[n - k];
        }
        l[n] = s / n as f64;
    }
    Ok(l[1..].to_vec())
}

/// Ursell function `φ(γ₁…γ_n)`: signed count of connected spanning
/// subgraphs of the incompatibility graph of the sequence.
fn ursell(seq: &[usize], polymers: &[Polymer]) -> f64 {
    let n = seq.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !polymers[seq[i]].compatible(&polymers[seq[j]]) {
                edges.push((i, j));
            }
        }
    }
    let mut total = 0i64;
    for subset in 0u32..(1 << edges.len()) {
        let mut reach = 1u32;
        loop {
            let mut next = reach;
            for (e, &(i, j)) in edges.iter().enumerate() {
                if subset & (1 << e) != 0 && ((reach >> i) & 1 == 1 || (reach >> j) & 1 == 1) {
                    next |= (1 << i) | (1 << j);
                }
            }
            if next == reach {
                break;
            }
            reach = next;
        }
        if reach == (1 << n) - 1 {
            total += if subset.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    total as f64
}

/// Cluster expansion up to order 4 evaluated directly from Ursell functions:
/// `Σ_n (1/n!) Σ_{γ₁…γ_n} φ(γ₁…γ_n) Π w(γ_k)` over ordered sequences.
pub fn ursell_expansion(system: &PolymerSystem, max_order: usize) -> Result<Vec<f64>> {
    if max_order == 0 || max_order > 4 {
        return usage("the Ursell cross-check covers orders 1 to 4");
    }
    let n = system.len();
    let mut out = Vec::with_capacity(max_order);
    let mut factorial = 1.0;
    for order in 1..=max_order {
        factorial *= order as f64;
        let mut sum = 0.0;
        let mut seq = vec![0usize; order];
        let count = n.pow(order as u32);
        for idx in 0..count {
            let mut r = idx;
            for s in seq.iter_mut() {
                *s = r % n;
                r /= n;
            }
            let prod: f64 = seq.iter().map(|&i| system.weights[i]).product();
            if prod != 0.0 {
                sum += ursell(&seq, &system.polymers) * prod;
            }
        }
        out.push(sum / factorial);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn single(w: f64) -> PolymerSystem {
        PolymerSystem::new(vec![(Polymer::new(0, [0]).unwrap(), w)]).unwrap()
    }

    fn random_system<R: Rng>(rng: &mut R, n: usize, sites: usize, scale: f64) -> PolymerSystem {
        let entries = (0..n)
            .map(|i| {
                let k = rng.random_range(1..=3);
                let support: Vec<usize> = (0..k).map(|_| rng.random_range(0..sites)).collect();
                let w = scale * (2.0 * rng.random::<f64>() - 1.0);
                (Polymer::new(i as u64, support).unwrap(), w)
            })
            .collect();
        PolymerSystem::new(entries).unwrap()
    }

    #[test]
    fn kp_single_polymer_thresholds() {
        let r = kp_check(&single(0.3)).unwrap();
        assert!(r.holds && (r.worst_ratio - 0.3 * 1f64.exp()).abs() < 1e-15);
        assert!((r.worst_ratio - 0.8155).abs() < 1e-4);
        let r = kp_check(&single(0.4)).unwrap();
        assert!(!r.holds && (r.worst_ratio - 1.0873).abs() < 1e-4);
        let r = kp_check(&PolymerSystem::empty()).unwrap();
        assert!(r.holds && r.worst_ratio == 0.0);
        assert!(kp_check_with(&single(0.1), |_| 0.0, |_| 0.0).is_err());
    }

    #[test]
    fn brute_force_small_cases() {
        assert!((brute_force_log_z(&single(0.7)).unwrap() - 1.7f64.ln()).abs() < 1e-15);
        let a = Polymer::new(0, [0, 1]).unwrap();
        let b = Polymer::new(1, [1, 2]).unwrap();
        let c = Polymer::new(2, [5]).unwrap();
        let s = PolymerSystem::new(vec![(a.clone(), 0.2), (b, 0.3)]).unwrap();
        assert!((brute_force_log_z(&s).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        let s = PolymerSystem::new(vec![(a, 0.2), (c, 0.3)]).unwrap();
        assert!((brute_force_log_z(&s).unwrap() - (1.2f64 * 1.3).ln()).abs() < 1e-15);
        assert!(matches!(brute_force_log_z(&single(-1.5)), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn truncated_single_polymer() {
        let v = truncated_expansion(&single(0.1), 3).unwrap();
        assert!((v - (0.1 - 0.005 + 0.001 / 3.0)).abs() < 1e-15);
        assert!(truncated_expansion(&single(0.1), 0).is_err());
        let mut rng = stream(1, 0);
        let zero = random_system(&mut rng, 6, 5, 0.0);
        assert_eq!(truncated_expansion(&zero, 8).unwrap(), 0.0);
    }

    #[test]
    fn ursell_matches_power_series() {
        let mut rng = stream(2, 0);
        for _ in 0..20 {
            let s = random_system(&mut rng, 6, 6, 0.2);
            let a = expansion_orders(&s, 4).unwrap();
            let b = ursell_expansion(&s, 4).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-13, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn converges_to_brute_force_under_kp() {
        let mut rng = stream(3, 0);
        let mut tested = 0;
        while tested < 20 {
            let s = random_system(&mut rng, 6, 8, 0.1);
            if !kp_check(&s).unwrap().holds {
                continue;
            }
            tested += 1;
            let exact = brute_force_log_z(&s).unwrap();
            assert!((truncated_expansion(&s, 12).unwrap() - exact).abs() <= 1e-6);
        }
    }

    #[test]
    fn factorization_and_text() {
        let mut rng = stream(4, 0);
        let a = random_system(&mut rng, 5, 4, 0.3);
        let b = random_system(&mut rng, 4, 4, 0.3);
        let u = a.disjoint_union(&b);
        let lhs = brute_force_log_z(&u).unwrap();
        let rhs = brute_force_log_z(&a).unwrap() + brute_force_log_z(&b).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let back = PolymerSystem::parse(&u.to_text()).unwrap();
        assert_eq!(back, u);
        assert!(PolymerSystem::parse("1: : 0.3").is_err());
        assert!(PolymerSystem::parse("1: 2 : 0.3\n1: 3 : 0.1").is_err());
        let s = PolymerSystem::parse("# comment\n\n7: 1, 2 : 0.25\n").unwrap();
        assert_eq!(s.polymers()[0].id, 7);
    }

    #[test]
    fn kp_is_monotone_in_weights() {
        let mut rng = stream(5, 0);
        for _ in 0..50 {
            let s = random_system(&mut rng, 6, 6, 0.2);
            if kp_check(&s).unwrap().holds {
                for f in [0.9, 0.5, 0.1] {
                    assert!(kp_check(&s.scaled(f)).unwrap().holds);
                }
            }
        }
    }
}
