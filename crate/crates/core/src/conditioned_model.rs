//! The time-zero layer conditioned on the alternating configuration at time `t`.
//!
//! Conditioning the free evolution on `y` at time `t` multiplies the initial
//! Gibbs weight by `Π_i 2π K_t(x_i − y_i)`, so the conditioned Hamiltonian is
//!
//! ```text
//! H^t(x, y) = −βJ Σ_{⟨ij⟩} cos(x_i − x_j) − Σ_i ln(2π K_t(x_i − y_i))
//!           ≈ −βJ Σ_{⟨ij⟩} cos(x_i − x_j) − h(t) Σ_i cos(x_i − y_i),   h(t) = 2e^{−t}.
//! ```
//!
//! The field pulls each spin towards its target. With `y` the alternating
//! up/down configuration the model has exactly two ground states, exchanged
//! by the reflection `x ↦ 2π − x`: spins point right (resp. left) with a
//! sublattice-alternating tilt `ε_t = arcsin(h / 8βJ)` towards their targets.
//!
//! Ground states are analysed through the two-angle cell function
//!
//! ```text
//! Φ(z, y) = −βJ cos(z − y) + ¼ h (cos z − cos y)
//! ```
//!
//! where `z` is a site with target `π` and `y` a neighbouring site with
//! target `0`; every plaquette energy of a two-sublattice configuration is
//! `2 Φ(z, y)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circle_kernel::{effective_field, log_relative_kernel};
use crate::error::{usage, Error, Result};
use crate::rotor_model::{plaquette_energy, FieldSpec, LatticeShape, SpinConfig, XyParams};
use crate::{wrap_angle, TAU};

/// Parameters `(β, J, t)` of the conditioned model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedParams {
    pub beta: f64,
    pub coupling: f64,
    pub t: f64,
}

impl ConditionedParams {
    pub fn new(beta: f64, coupling: f64, t: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) || !(coupling.is_finite() && coupling >= 0.0) || !(t.is_finite() && t > 0.0) {
            return usage(format!("need beta > 0, J ≥ 0, t > 0; got beta={beta}, J={coupling}, t={t}"));
        }
        Ok(ConditionedParams { beta, coupling, t })
    }

    pub fn beta_j(&self) -> f64 {
        self.beta * self.coupling
    }

    pub fn xy(&self) -> XyParams {
        XyParams { beta: self.beta, coupling: self.coupling }
    }

    /// `h(t) = 2e^{−t}`.
    pub fn field(&self) -> f64 {
        2.0 * (-self.t).exp()
    }

    /// `h / 8βJ`.
    pub fn tilt_ratio(&self) -> f64 {
        self.field() / (8.0 * self.beta_j())
    }

    /// `ε_t = arcsin(h / 8βJ)`, defined while the ratio is at most 1.
    pub fn epsilon(&self) -> Result<f64> {
        let r = self.tilt_ratio();
        if !(r <= 1.0) {
            return Err(Error::Regime(format!(
                "field dominates coupling (h/8βJ = {r}); low-temperature ground-state analysis inapplicable"
            )));
        }
        Ok(r.asin())
    }
}

/// Alternating configuration: `0` on even sites, `π` on odd sites.
pub fn make_yspec(side: usize) -> Result<SpinConfig> {
    let shape = LatticeShape::new(side)?;
    Ok(SpinConfig::from_fn(shape, |i| if shape.parity(i) == 0 { 0.0 } else { PI }))
}

/// Field `h(t)` towards `y^spec` on every site.
pub fn yspec_fields(shape: LatticeShape, p: &ConditionedParams) -> FieldSpec {
    let y = SpinConfig::from_fn(shape, |i| if shape.parity(i) == 0 { 0.0 } else { PI });
    FieldSpec::aligned_to(&y, p.field())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianForm {
    /// Keeps the full `−ln(2π K_t)` single-site term.
    Exact,
    /// First Fourier mode only: `−h(t) cos(x_i − y_i)`.
    FieldApprox,
}

/// Conditioned Hamiltonian `H^t(x, y)`.
pub fn conditioned_hamiltonian(x: &SpinConfig, y: &SpinConfig, p: &ConditionedParams, form: HamiltonianForm) -> Result<f64> {
    if x.shape() != y.shape() {
        return usage("x and y live on different lattices");
    }
    let pair = crate::rotor_model::energy_total(x, &p.xy(), None)?;
    let site = match form {
        HamiltonianForm::Exact => {
            let mut s = 0.0;
            for (a, b) in x.angles().iter().zip(y.angles()) {
                s -= log_relative_kernel(a - b, p.t)?;
            }
            s
        }
        HamiltonianForm::FieldApprox => {
            let h = effective_field(p.t)?;
            -h * x.angles().iter().zip(y.angles()).map(|(a, b)| (a - b).cos()).sum::<f64>()
        }
    };
    Ok(pair + site)
}

/// Two-angle cell function `Φ(z, y)`; `z` has target `π`, `y` target `0`.
pub fn cell_energy(z: f64, y: f64, p: &ConditionedParams) -> f64 {
    -p.beta_j() * (z - y).cos() + 0.25 * p.field() * (z.cos() - y.cos())
}

pub fn cell_gradient(z: f64, y: f64, p: &ConditionedParams) -> [f64; 2] {
    let bj = p.beta_j();
    let q = 0.25 * p.field();
    let s = (z - y).sin();
    [bj * s - q * z.sin(), -bj * s + q * y.sin()]
}

pub fn cell_hessian(z: f64, y: f64, p: &ConditionedParams) -> [[f64; 2]; 2] {
    let bj = p.beta_j();
    let q = 0.25 * p.field();
    let c = (z - y).cos();
    [[bj * c - q * z.cos(), -bj * c], [-bj * c, bj * c + q * y.cos()]]
}

/// The two ground states with their tilt and plaquette minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStatePair {
    pub x_ri: SpinConfig,
    pub x_le: SpinConfig,
    pub epsilon_t: f64,
    /// Minimal plaquette energy.
    pub m: f64,
}

/// Minimum of the cell function found by brute force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMinimum {
    pub z: f64,
    pub y: f64,
    pub value: f64,
}

impl CellMinimum {
    /// Half the angular gap `z − y`, i.e. the tilt of this minimiser.
    pub fn tilt(&self) -> f64 {
        let d = (self.z - self.y).rem_euclid(TAU);
        let d = if d > PI { d - TAU } else { d };
        0.5 * d
    }
}

/// Grid search over `[0, 2π)²` followed by compass descent (axis and
/// diagonal moves, step halving from 0.01 to 1e−12).
///
/// The cell function is exactly `−βJ` along `z = y`, so the best grid value
/// is a many-way tie that includes the saddle `(0, 0)`; descent is therefore
/// started from the best 512 grid points and the lowest end point kept.
pub fn minimize_cell_by_grid(p: &ConditionedParams, n_grid: usize) -> CellMinimum {
    let step = TAU / n_grid as f64;
    let mut grid = Vec::with_capacity(n_grid * n_grid);
    for a in 0..n_grid {
        let z = a as f64 * step;
        for b in 0..n_grid {
            let y = b as f64 * step;
            grid.push(CellMinimum { z, y, value: cell_energy(z, y, p) });
        }
    }
    grid.sort_by(|u, v| u.value.total_cmp(&v.value));
    grid.truncate(512);
    grid.into_iter().map(|start| descend(start, p)).min_by(|u, v| u.value.total_cmp(&v.value)).expect("non-empty grid")
}

fn descend(start: CellMinimum, p: &ConditionedParams) -> CellMinimum {
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
    let (mut z, mut y, mut v) = (start.z, start.y, start.value);
    let mut h = 0.01;
    while h >= 1e-12 {
        let mut improved = true;
        while improved {
            improved = false;
            for (dz, dy) in dirs {
                let (nz, ny) = (z + dz * h, y + dy * h);
                let nv = cell_energy(nz, ny, p);
                if nv < v {
                    z = nz;
                    y = ny;
                    v = nv;
                    improved = true;
                }
            }
        }
        h *= 0.5;
    }
    CellMinimum { z: wrap_angle(z), y: wrap_angle(y), value: v }
}

/// Closed-form ground states, checked against the numeric cell oracle.
pub fn ground_states(p: &ConditionedParams, shape: LatticeShape) -> Result<GroundStatePair> {
    if !(p.tilt_ratio() < 1.0) {
        return Err(Error::Regime(
            "field dominates coupling (h/8βJ ≥ 1); low-temperature ground-state analysis inapplicable".into(),
        ));
    }
    let eps = p.epsilon()?;
    // target-0 (even) sites tilt down towards 0, target-π (odd) sites up towards π
    let x_ri = SpinConfig::from_fn(shape, |i| if shape.parity(i) == 0 { FRAC_PI_2 - eps } else { FRAC_PI_2 + eps });
    let x_le = x_ri.reflect();
    let fields = yspec_fields(shape, p);
    let m = plaquette_energy(&x_ri, 0, &p.xy(), Some(&fields))?;

    let oracle = minimize_cell_by_grid(p, 400);
    let closed = 2.0 * cell_energy(FRAC_PI_2 + eps, FRAC_PI_2 - eps, p);
    if 2.0 * oracle.value < closed - 1e-10 {
        return Err(Error::Oracle(format!(
            "numeric cell minimum {} lies below the closed form {closed}",
            2.0 * oracle.value
        )));
    }
    Ok(GroundStatePair { x_ri, x_le, epsilon_t: eps, m })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryKind {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

/// Classifies a stationary point of the cell function by its Hessian.
pub fn classify_stationary(z: f64, y: f64, p: &ConditionedParams) -> Result<StationaryKind> {
    let g = cell_gradient(z, y, p);
    let norm = g[0].hypot(g[1]);
    if norm > 1e-8 {
        return usage(format!("({z}, {y}) is not stationary: gradient norm {norm:e}"));
    }
    let [[a, b], [_, d]] = cell_hessian(z, y, p);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
    let (l1, l2) = (mean - rad, mean + rad);
    if l1.abs() < 1e-12 || l2.abs() < 1e-12 {
        return Ok(StationaryKind::Degenerate);
    }
    Ok(match (l1 > 0.0, l2 > 0.0) {
        (true, true) => StationaryKind::Minimum,
        (false, false) => StationaryKind::Maximum,
        _ => StationaryKind::Saddle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn shape(l: usize) -> LatticeShape {
        LatticeShape::new(l).unwrap()
    }

    #[test]
    fn yspec_layout() {
        let y = make_yspec(4).unwrap();
        let s = y.shape();
        assert_eq!(y.get(s.index(0, 0)), 0.0);
        assert_eq!(y.get(s.index(1, 0)), PI);
        for (i, j) in s.bonds() {
            assert!(((y.get(i) - y.get(j)).abs() - PI).abs() < 1e-15);
        }
        let sum: f64 = y.angles().iter().map(|a| a.cos()).sum();
        assert!(sum.abs() < 1e-12);
        assert!(matches!(make_yspec(5), Err(Error::Usage(_))));
    }

    #[test]
    fn epsilon_examples() {
        let e = ConditionedParams::new(1.0, 1.0, 2.0).unwrap().epsilon().unwrap();
        assert!((e - 0.033_840_279_220_404_25).abs() < 1e-15);
        let e = ConditionedParams::new(20.0, 1.0, 2.0).unwrap().epsilon().unwrap();
        assert!((e - 0.001_691_691_847_344_172).abs() < 1e-15);
        let e = ConditionedParams::new(1.0, 1.0, 40.0).unwrap().epsilon().unwrap();
        assert!(e <= 1e-17);
        let weak = ConditionedParams::new(0.01, 1.0, 0.1).unwrap();
        assert!(matches!(weak.epsilon(), Err(Error::Regime(_))));
        assert!(matches!(ground_states(&weak, shape(4)), Err(Error::Regime(_))));
    }

    #[test]
    fn hamiltonian_forms() {
        let s = shape(4);
        let mut rng = stream(2, 0);
        // large t: forms coincide
        let p = ConditionedParams::new(1.0, 1.0, 40.0).unwrap();
        let x = SpinConfig::random(s, &mut rng);
        let y = SpinConfig::random(s, &mut rng);
        let a = conditioned_hamiltonian(&x, &y, &p, HamiltonianForm::Exact).unwrap();
        let b = conditioned_hamiltonian(&x, &y, &p, HamiltonianForm::FieldApprox).unwrap();
        assert!((a - b).abs() <= 1e-12);
        // perfect alignment without coupling
        let p0 = ConditionedParams::new(1.0, 0.0, 1.5).unwrap();
        let v = conditioned_hamiltonian(&x, &x, &p0, HamiltonianForm::FieldApprox).unwrap();
        assert!((v + 16.0 * p0.field()).abs() < 1e-12);
        // t = 2 bound
        let p2 = ConditionedParams::new(0.7, 1.0, 2.0).unwrap();
        for _ in 0..100 {
            let x = SpinConfig::random(s, &mut rng);
            let y = SpinConfig::random(s, &mut rng);
            let a = conditioned_hamiltonian(&x, &y, &p2, HamiltonianForm::Exact).unwrap();
            let b = conditioned_hamiltonian(&x, &y, &p2, HamiltonianForm::FieldApprox).unwrap();
            assert!((a - b).abs() <= 16.0 * 3.0 * (-4.0f64).exp());
        }
        assert!(conditioned_hamiltonian(&x, &make_yspec(2).unwrap(), &p2, HamiltonianForm::Exact).is_err());
    }

    #[test]
    fn ground_state_structure() {
        let s = shape(6);
        let p = ConditionedParams::new(1.0, 1.0, 2.0).unwrap();
        let gs = ground_states(&p, s).unwrap();
        let f = yspec_fields(s, &p);
        let xy = p.xy();
        for a in 0..s.n_sites() {
            let e = plaquette_energy(&gs.x_ri, a, &xy, Some(&f)).unwrap();
            assert!((e - gs.m).abs() < 1e-12);
        }
        assert_eq!(gs.x_le, gs.x_ri.reflect());
        let y = make_yspec(6).unwrap();
        let er = conditioned_hamiltonian(&gs.x_ri, &y, &p, HamiltonianForm::FieldApprox).unwrap();
        let el = conditioned_hamiltonian(&gs.x_le, &y, &p, HamiltonianForm::FieldApprox).unwrap();
        assert!((er - el).abs() < 1e-12);
        assert!((gs.m - 2.0 * cell_energy(FRAC_PI_2 + gs.epsilon_t, FRAC_PI_2 - gs.epsilon_t, &p)).abs() < 1e-12);

        let far = ConditionedParams::new(1.0, 1.0, 40.0).unwrap();
        let gs = ground_states(&far, s).unwrap();
        assert!(gs.x_ri.angles().iter().all(|a| (a - FRAC_PI_2).abs() < 1e-15));
        assert!(gs.x_le.angles().iter().all(|a| (a - 3.0 * FRAC_PI_2).abs() < 1e-15));
    }

    #[test]
    fn oracle_recovers_tilt() {
        for (bj, t) in [(1.0, 2.0), (20.0, 2.0)] {
            let p = ConditionedParams::new(bj, 1.0, t).unwrap();
            let m = minimize_cell_by_grid(&p, 400);
            assert!((m.tilt() - p.epsilon().unwrap()).abs() < 1e-6, "{} vs {}", m.tilt(), p.epsilon().unwrap());
        }
    }

    #[test]
    fn stationary_labels() {
        let p = ConditionedParams::new(5.0, 1.0, 2.0).unwrap();
        let e = p.epsilon().unwrap();
        assert_eq!(classify_stationary(0.0, 0.0, &p).unwrap(), StationaryKind::Saddle);
        assert_eq!(classify_stationary(PI, PI, &p).unwrap(), StationaryKind::Saddle);
        assert_eq!(classify_stationary(0.0, PI, &p).unwrap(), StationaryKind::Maximum);
        // Hessian eigenvalues at (π, 0) are h/4 and h/4 − 2βJ
        assert_eq!(classify_stationary(PI, 0.0, &p).unwrap(), StationaryKind::Saddle);
        assert_eq!(classify_stationary(FRAC_PI_2 + e, FRAC_PI_2 - e, &p).unwrap(), StationaryKind::Minimum);
        assert_eq!(classify_stationary(1.5 * PI - e, 1.5 * PI + e, &p).unwrap(), StationaryKind::Minimum);
        assert!(matches!(classify_stationary(1.0, 0.3, &p), Err(Error::Usage(_))));
        // J = 0: flat directions
        let flat = ConditionedParams::new(1.0, 0.0, 60.0).unwrap();
        assert_eq!(classify_stationary(0.0, 0.0, &flat).unwrap(), StationaryKind::Degenerate);
    }

    #[test]
    fn closed_form_dominates_random_cells() {
        let mut rng = stream(4, 0);
        let p = ConditionedParams::new(2.0, 1.0, 1.5).unwrap();
        let e = p.epsilon().unwrap();
        let min = cell_energy(FRAC_PI_2 + e, FRAC_PI_2 - e, &p);
        for _ in 0..10_000 {
            let (z, y) = (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
            assert!(cell_energy(z, y, &p) >= min - 1e-12);
        }
    }
}
