//! Nearest-neighbour planar rotors on the periodic square lattice.
//!
//! Energies follow
//!
//! ```text
//! H(x) = −βJ Σ_{⟨i,j⟩} cos(x_i − x_j) − Σ_i h_i cos(x_i − y_i)
//! ```
//!
//! where the bond sum runs over the `2L²` right/down bonds of the torus. On
//! the `L = 2` torus every neighbouring pair is joined by two bonds; that
//! multigraph convention is kept everywhere (energies, plaquettes, drifts).

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{usage, Error, Result};
use crate::{wrap_angle, TAU};

/// Side length of an even periodic `L × L` lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeShape {
    side: usize,
}

impl LatticeShape {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 || side % 2 != 0 {
            return usage(format!("lattice side must be even and at least 2, got {side}"));
        }
        Ok(LatticeShape { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_sites(&self) -> usize {
        self.side * self.side
    }

    /// Row-major index of site `(x, y)`, coordinates taken modulo `L`.
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        (y % self.side) * self.side + (x % self.side)
    }

    #[inline]
    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.side, site / self.side)
    }

    /// `0` for even sites (`x + y` even), `1` for odd ones.
    #[inline]
    pub fn parity(&self, site: usize) -> usize {
        let (x, y) = self.coords(site);
        (x + y) % 2
    }

    /// Right, left, down and up neighbours.
    #[inline]
    pub fn neighbors(&self, site: usize) -> [usize; 4] {
        let l = self.side;
        let (x, y) = self.coords(site);
        [
            self.index(x + 1, y),
            self.index(x + l - 1, y),
            self.index(x, y + 1),
            self.index(x, y + l - 1),
        ]
    }

    /// All `2L²` bonds as `(site, right)` then `(site, down)` pairs.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.n_sites());
        for s in 0..self.n_sites() {
            let (x, y) = self.coords(s);
            out.push((s, self.index(x + 1, y)));
            out.push((s, self.index(x, y + 1)));
        }
        out
    }

    /// Corners of the plaquette whose lower-left site is `dual_site`:
    /// `(x, y), (x+1, y), (x, y+1), (x+1, y+1)`.
    #[inline]
    pub fn plaquette_corners(&self, dual_site: usize) -> [usize; 4] {
        let (x, y) = self.coords(dual_site);
        [
            self.index(x, y),
            self.index(x + 1, y),
            self.index(x, y + 1),
            self.index(x + 1, y + 1),
        ]
    }
}

/// Spin angles on every site, row-major, each in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfig {
    shape: LatticeShape,
    angles: Vec<f64>,
}

impl SpinConfig {
    pub fn uniform(shape: LatticeShape, angle: f64) -> Self {
        SpinConfig { shape, angles: vec![wrap_angle(angle); shape.n_sites()] }
    }

    pub fn from_angles(shape: LatticeShape, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != shape.n_sites() {
            return usage(format!("expected {} angles, got {}", shape.n_sites(), angles.len()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return usage("angles must be finite");
        }
        let angles = angles.into_iter().map(wrap_angle).collect();
        Ok(SpinConfig { shape, angles })
    }

    pub fn from_fn(shape: LatticeShape, mut f: impl FnMut(usize) -> f64) -> Self {
        SpinConfig { shape, angles: (0..shape.n_sites()).map(|i| wrap_angle(f(i))).collect() }
    }

    pub fn random<R: Rng + ?Sized>(shape: LatticeShape, rng: &mut R) -> Self {
        Self::from_fn(shape, |_| rng.random::<f64>() * TAU)
    }

    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn get(&self, site: usize) -> f64 {
        self.angles[site]
    }

    pub fn set(&mut self, site: usize, angle: f64) {
        self.angles[site] = wrap_angle(angle);
    }

    /// The left-right reflection `x ↦ 2π − x`.
    pub fn reflect(&self) -> Self {
        Self::from_fn(self.shape, |i| TAU - self.angles[i])
    }

    /// Global rotation by `c`.
    pub fn rotate(&self, c: f64) -> Self {
        Self::from_fn(self.shape, |i| self.angles[i] + c)
    }

    /// Plain-text dump: `L=<side>` header then one angle per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("L={}\n", self.shape.side);
        for a in &self.angles {
            let _ = writeln!(s, "{a:.16e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Usage("empty configuration text".into()))?;
        let side = header
            .strip_prefix("L=")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Usage(format!("bad header line {header:?}")))?;
        let shape = LatticeShape::new(side)?;
        let angles = lines
            .map(|l| l.parse::<f64>().map_err(|e| Error::Usage(format!("bad angle {l:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_angles(shape, angles)
    }
}

/// Inverse temperature and ferromagnetic coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyParams {
    pub beta: f64,
    pub coupling: f64,
}

impl XyParams {
    pub fn new(beta: f64, coupling: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 || !coupling.is_finite() || coupling < 0.0 {
            return usage(format!("need finite beta ≥ 0 and J ≥ 0, got beta={beta}, J={coupling}"));
        }
        Ok(XyParams { beta, coupling })
    }

    #[inline]
    pub fn beta_j(&self) -> f64 {
        self.beta * self.coupling
    }
}

/// Site fields `−h_i cos(x_i − y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub targets: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl FieldSpec {
    pub fn new(targets: Vec<f64>, magnitudes: Vec<f64>) -> Result<Self> {
        if targets.len() != magnitudes.len() {
            return usage("field targets and magnitudes differ in length");
        }
        Ok(FieldSpec { targets: targets.into_iter().map(wrap_angle).collect(), magnitudes })
    }

    /// Field of common magnitude `h` pulling every site towards `y_i`.
    pub fn aligned_to(y: &SpinConfig, h: f64) -> Self {
        FieldSpec { targets: y.angles.clone(), magnitudes: vec![h; y.angles.len()] }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    #[inline]
    pub fn site_energy(&self, site: usize, angle: f64) -> f64 {
        -self.magnitudes[site] * (angle - self.targets[site]).cos()
    }
}

fn check_fields(config: &SpinConfig, fields: Option<&FieldSpec>) -> Result<()> {
    if let Some(f) = fields {
        if f.len() != config.angles.len() {
            return usage(format!("field spec has {} sites, configuration has {}", f.len(), config.angles.len()));
        }
    }
    Ok(())
}

/// Total energy over the periodic torus.
pub fn energy_total(config: &SpinConfig, params: &XyParams, fields: Option<&FieldSpec>) -> Result<f64> {
    check_fields(config, fields)?;
    let shape = config.shape;
    let x = &config.angles;
    let bj = params.beta_j();
    let mut bonds = 0.0;
    for s in 0..shape.n_sites() {
        let [right, _, down, _] = shape.neighbors(s);
        bonds += (x[s] - x[right]).cos() + (x[s] - x[down]).cos();
    }
    let mut e = -bj * bonds;
    if let Some(f) = fields {
        e += (0..x.len()).map(|i| f.site_energy(i, x[i])).sum::<f64>();
    }
    Ok(e)
}

/// `H(after) − H(before)` for a single-site move, from the four incident
/// bonds and the local field.
pub fn energy_delta(
    config: &SpinConfig,
    site: usize,
    new_angle: f64,
    params: &XyParams,
    fields: Option<&FieldSpec>,
) -> Result<f64> {
    if site >= config.angles.len() {
        return usage(format!("site {site} out of range for {} sites", config.angles.len()));
    }
    check_fields(config, fields)?;
    let x = &config.angles;
    let old = x[site];
    let mut d = 0.0;
    for n in config.shape.neighbors(site) {
        d += (old - x[n]).cos() - (new_angle - x[n]).cos();
    }
    let mut delta = params.beta_j() * d;
    if let Some(f) = fields {
        delta += f.site_energy(site, new_angle) - f.site_energy(site, old);
    }
    Ok(delta)
}

/// Outcome of the high-temperature Dobrushin test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DobrushinReport {
    pub sum: f64,
    pub satisfied: bool,
}

/// `sup_i Σ_{Λ∋i} (|Λ|−1) osc(φ_Λ)` for the nearest-neighbour pair potential
/// on `ℤ^d`: each of the `2d` bonds through a site has oscillation `2βJ`.
pub fn dobrushin_sum(params: &XyParams, dimension: usize) -> DobrushinReport {
    let oscillation = 2.0 * params.beta_j();
    let sum = 2.0 * dimension as f64 * oscillation;
    DobrushinReport { sum, satisfied: sum < 2.0 }
}

/// Energy attributed to one plaquette: half of each of its four bonds plus a
/// quarter of each corner field. Summing over all `L²` plaquettes gives
/// [`energy_total`].
pub fn plaquette_energy(
    config: &SpinConfig,
    dual_site: usize,
    params: &XyParams,
    fields: Option<&FieldSpec>,
) -> Result<f64> {
    if dual_site >= config.angles.len() {
        return usage(format!("dual site {dual_site} out of range"));
    }
    check_fields(config, fields)?;
    Ok(plaquette_energy_unchecked(config, dual_site, params, fields))
}

pub(crate) fn plaquette_energy_unchecked(
    config: &SpinConfig,
    dual_site: usize,
    params: &XyParams,
    fields: Option<&FieldSpec>,
) -> f64 {
    let [a, b, c, d] = config.shape.plaquette_corners(dual_site);
    let x = &config.angles;
    let bonds = (x[a] - x[b]).cos() + (x[c] - x[d]).cos() + (x[a] - x[c]).cos() + (x[b] - x[d]).cos();
    let mut e = -0.5 * params.beta_j() * bonds;
    if let Some(f) = fields {
        e += 0.25 * [a, b, c, d].iter().map(|&i| f.site_energy(i, x[i])).sum::<f64>();
    }
    e
}
