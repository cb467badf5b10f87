//! Low-energy site percolation on the dual lattice.
//!
//! Dual site `a` names the plaquette with lower-left corner `a`. For a
//! configuration `x` it belongs to `V_δ(x)` when its plaquette energy is at
//! most `m + δ`, with `m` the ground-state plaquette value. Clusters of `V_δ`
//! are labelled `ri` or `le` when every plaquette in them has positive or
//! negative mean `sin`, and `mixed` otherwise.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::conditioned_model::{cell_energy, yspec_fields, ConditionedParams};
use crate::error::{usage, Result};
use crate::rotor_model::{plaquette_energy_unchecked, LatticeShape, SpinConfig};

/// Vertex set `V_δ` on the dual torus; adjacency is dual nearest-neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct LowEnergyGraph {
    shape: LatticeShape,
    delta: f64,
    member: Vec<bool>,
    energy: Vec<f64>,
    mean_sin: Vec<f64>,
}

impl LowEnergyGraph {
    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn contains(&self, dual_site: usize) -> bool {
        self.member[dual_site]
    }

    pub fn membership(&self) -> &[bool] {
        &self.member
    }

    pub fn n_vertices(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&a| self.member[a]).collect()
    }

    /// Plaquette energies of every dual site.
    pub fn plaquette_energies(&self) -> &[f64] {
        &self.energy
    }

    /// Edges `(a, b)` with `b` the right or lower neighbour of `a`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.vertices() {
            let [right, _, down, _] = self.shape.neighbors(a);
            for b in [right, down] {
                if self.member[b] {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Closed-form minimal plaquette energy `2 Φ(π/2 + ε, π/2 − ε)`.
pub fn ground_plaquette_energy(p: &ConditionedParams) -> Result<f64> {
    let e = p.epsilon()?;
    Ok(2.0 * cell_energy(FRAC_PI_2 + e, FRAC_PI_2 - e, p))
}

/// Builds `V_δ(x)` for the conditioned model with `y^spec` fields. `m` must be
/// the ground-state plaquette energy of the same parameters.
pub fn build_low_energy_graph(config: &SpinConfig, p: &ConditionedParams, m: f64, delta: f64) -> Result<LowEnergyGraph> {
    if !(delta >= 0.0) {
        return usage(format!("delta must be non-negative, got {delta}"));
    }
    let expected = ground_plaquette_energy(p)?;
    if (m - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return usage(format!("m = {m} does not belong to these parameters (expected {expected})"));
    }
    let shape = config.shape();
    let fields = yspec_fields(shape, p);
    let xy = p.xy();
    let n = shape.n_sites();
    let energy: Vec<f64> = (0..n).map(|a| plaquette_energy_unchecked(config, a, &xy, Some(&fields))).collect();
    // a tolerance keeps the exact ground state inside V_0 despite rounding
    let cut = m + delta + 1e-12 * m.abs().max(1.0);
    let member = energy.iter().map(|&e| e <= cut).collect();
    let mean_sin = (0..n).map(|a| plaquette_mean_sin(config, a)).collect();
    Ok(LowEnergyGraph { shape, delta, member, energy, mean_sin })
}

fn plaquette_mean_sin(config: &SpinConfig, dual_site: usize) -> f64 {
    let corners = config.shape().plaquette_corners(dual_site);
    0.25 * corners.iter().map(|&i| config.get(i).sin()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ri,
    Le,
    Mixed,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Ri => "ri",
            Orientation::Le => "le",
            Orientation::Mixed => "mixed",
        })
    }
}

fn orientation_of(mean_sin: impl IntoIterator<Item = f64>) -> Orientation {
    let (mut pos, mut neg, mut other) = (false, false, false);
    for s in mean_sin {
        if s > 0.0 {
            pos = true;
        } else if s < 0.0 {
            neg = true;
        } else {
            other = true;
        }
    }
    match (pos, neg, other) {
        (true, false, false) => Orientation::Ri,
        (false, true, false) => Orientation::Le,
        _ => Orientation::Mixed,
    }
}

/// Orientation of a set of dual sites of `config`.
pub fn classify_cluster(config: &SpinConfig, cluster: &[usize]) -> Result<Orientation> {
    if cluster.is_empty() {
        return usage("cannot classify an empty cluster");
    }
    let n = config.shape().n_sites();
    if let Some(&a) = cluster.iter().find(|&&a| a >= n) {
        return usage(format!("dual site {a} out of range"));
    }
    Ok(orientation_of(cluster.iter().map(|&a| plaquette_mean_sin(config, a))))
}

/// Connected components of a [`LowEnergyGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    /// Cluster id of every dual site, `None` outside `V_δ`.
    pub labels: Vec<Option<usize>>,
    pub sizes: Vec<usize>,
    /// Whether each cluster winds around the torus.
    pub wraps: Vec<bool>,
    pub orientations: Vec<Orientation>,
    /// Id of the largest cluster (lowest id on ties).
    pub largest: Option<usize>,
    /// Largest cluster size over `L²`.
    pub largest_fraction: f64,
    /// The largest cluster wraps in at least one direction.
    pub spans: bool,
}

impl ClusterReport {
    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self, id: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&a| self.labels[a] == Some(id)).collect()
    }

    pub fn orientation_of_largest(&self) -> Option<Orientation> {
        self.largest.map(|k| self.orientations[k])
    }
}

/// Union-find whose nodes remember their displacement to the parent, so
/// that closing a loop with non-zero net displacement reveals a wrap.
struct OffsetUnionFind {
    parent: Vec<usize>,
    offset: Vec<(i64, i64)>,
    size: Vec<usize>,
    wraps: Vec<bool>,
}

impl OffsetUnionFind {
    fn new(n: usize) -> Self {
        OffsetUnionFind { parent: (0..n).collect(), offset: vec![(0, 0); n], size: vec![1; n], wraps: vec![false; n] }
    }

    /// Root of `i` and the displacement `pos(i) − pos(root)`.
    fn find(&mut self, i: usize) -> (usize, (i64, i64)) {
        let p = self.parent[i];
        if p == i {
            return (i, (0, 0));
        }
        let (root, po) = self.find(p);
        let o = self.offset[i];
        let total = (o.0 + po.0, o.1 + po.1);
        self.parent[i] = root;
        self.offset[i] = total;
        (root, total)
    }

    /// Records the edge `pos(v) = pos(u) + d`.
    fn union(&mut self, u: usize, v: usize, d: (i64, i64)) {
        let (ru, ou) = self.find(u);
        let (rv, ov) = self.find(v);
        if ru == rv {
            if (ov.0 - ou.0, ov.1 - ou.1) != d {
                self.wraps[ru] = true;
            }
            return;
        }
        // pos(rv) − pos(ru)
        let shift = (d.0 + ou.0 - ov.0, d.1 + ou.1 - ov.1);
        let (big, small, off) = if self.size[ru] >= self.size[rv] { (ru, rv, shift) } else { (rv, ru, (-shift.0, -shift.1)) };
        self.parent[small] = big;
        self.offset[small] = off;
        self.size[big] += self.size[small];
        self.wraps[big] = self.wraps[big] || self.wraps[small];
    }
}

/// Cluster decomposition with torus-wrap detection.
pub fn connected_clusters(graph: &LowEnergyGraph) -> ClusterReport {
    let shape = graph.shape;
    let n = shape.n_sites();
    let mut uf = OffsetUnionFind::new(n);
    for a in graph.vertices() {
        let [right, _, down, _] = shape.neighbors(a);
        if graph.member[right] {
            uf.union(a, right, (1, 0));
        }
        if graph.member[down] {
            uf.union(a, down, (0, 1));
        }
    }
    let mut labels = vec![None; n];
    let mut root_label = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut wraps = Vec::new();
    let mut signs: Vec<Vec<f64>> = Vec::new();
    for a in 0..n {
        if !graph.member[a] {
            continue;
        }
        let (r, _) = uf.find(a);
        if root_label[r] == usize::MAX {
            root_label[r] = sizes.len();
            sizes.push(0);
            wraps.push(uf.wraps[r]);
            signs.push(Vec::new());
        }
        let k = root_label[r];
        labels[a] = Some(k);
        sizes[k] += 1;
        signs[k].push(graph.mean_sin[a]);
    }
    let orientations = signs.into_iter().map(orientation_of).collect();
    let mut largest: Option<usize> = None;
    for (k, &s) in sizes.iter().enumerate() {
        if largest.is_none_or(|b| s > sizes[b]) {
            largest = Some(k);
        }
    }
    let largest_fraction = largest.map_or(0.0, |k| sizes[k] as f64 / n as f64);
    let spans = largest.is_some_and(|k| wraps[k]);
    ClusterReport { labels, sizes, wraps, orientations, largest, largest_fraction, spans }
}

/// Largest `δ` on the grid `max_delta·k/steps` such that every cluster of
/// every configuration is unanimously `ri` or `le` for all grid values up to
/// it. Returns 0 when mixed clusters already occur at the smallest positive
/// grid value.
pub fn stable_delta(configs: &[SpinConfig], p: &ConditionedParams, m: f64, max_delta: f64, steps: usize) -> Result<f64> {
    if !(max_delta > 0.0) || steps == 0 {
        return usage("need max_delta > 0 and steps > 0");
    }
    let mut best = 0.0;
    for k in 1..=steps {
        let delta = max_delta * k as f64 / steps as f64;
        for c in configs {
            let report = connected_clusters(&build_low_energy_graph(c, p, m, delta)?);
            if report.orientations.contains(&Orientation::Mixed) {
                return Ok(best);
            }
        }
        best = delta;
    }
    Ok(best)
}
