//! Rotor diffusions on the torus and their Girsanov path weights.
//!
//! Time is measured on the clock of the circle heat kernel (generator `∂²`):
//!
//! ```text
//! dX_i = b_i(X) dt + √2 dB_i,   b_i = −U′(X_i) − βJ Σ_{j∼i} sin(X_i − X_j)
//! ```
//!
//! On this clock the Girsanov/Itô computation against free motion gives, for
//! the pair potential `φ_A = −J cos(x_i − x_j)`,
//!
//! ```text
//! Φ_A = (β/2)[φ_A(X_t) − φ_A(X_0)] − ∫_0^t g_A(X_s) ds
//! g_A = (β/2) Σ_{k∈A} (∂²_k φ_A − U′(x_k) ∂_k φ_A) − (β²/4) Σ_{B∪C=A} Σ_{k∈B∩C} ∂_k φ_B ∂_k φ_C
//! ```
//!
//! and the density of the interacting path law is `exp(−Σ_A Φ_A)`.
//! Distinct bonds sharing a site contribute the cross terms `B ≠ C`, which
//! live on three-site sets (or on the doubled bonds of the `L = 2` torus).

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::circle_kernel::sample_increment;
use crate::error::{domain, usage, Error, Result};
use crate::rotor_model::{LatticeShape, SpinConfig, XyParams};
use crate::{circular_distance, wrap_angle, TAU};

/// Uniform time grid on `[0, t_final]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    t_final: f64,
    n_steps: usize,
}

impl PathGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !t_final.is_finite() || t_final <= 0.0 || n_steps == 0 {
            return usage(format!("need t_final > 0 and n_steps ≥ 1, got {t_final}, {n_steps}"));
        }
        Ok(PathGrid { t_final, n_steps })
    }

    /// Grid with step as close to `dt` as possible.
    pub fn with_step(t_final: f64, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return usage(format!("time step must be positive, got {dt}"));
        }
        Self::new(t_final, ((t_final / dt).round() as usize).max(1))
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }
}

/// A discretised path: `n_steps + 1` configurations, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: PathGrid,
    shape: LatticeShape,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn grid(&self) -> PathGrid {
        self.grid
    }

    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    pub fn n_states(&self) -> usize {
        self.grid.n_steps + 1
    }

    pub fn state(&self, k: usize) -> &[f64] {
        let n = self.shape.n_sites();
        &self.data[k * n..(k + 1) * n]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.shape.n_sites())
    }

    pub fn config(&self, k: usize) -> SpinConfig {
        SpinConfig::from_fn(self.shape, |i| self.state(k)[i])
    }

    pub fn initial(&self) -> &[f64] {
        self.state(0)
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.grid.n_steps)
    }

    /// Every `factor`-th state, on the coarser grid.
    pub fn subsample(&self, factor: usize) -> Result<Trajectory> {
        if factor == 0 || self.grid.n_steps % factor != 0 {
            return usage(format!("cannot subsample {} steps by {factor}", self.grid.n_steps));
        }
        let grid = PathGrid::new(self.grid.t_final, self.grid.n_steps / factor)?;
        let mut data = Vec::with_capacity((grid.n_steps + 1) * self.shape.n_sites());
        for k in (0..self.n_states()).step_by(factor) {
            data.extend_from_slice(self.state(k));
        }
        Ok(Trajectory { grid, shape: self.shape, data })
    }

    /// Debug dump: one `step site angle` line per entry.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (k, st) in self.states().enumerate() {
            for (i, a) in st.iter().enumerate() {
                s.push_str(&format!("{k} {i} {a:.16e}\n"));
            }
        }
        s
    }
}

/// Derivative of a 2π-periodic single-site potential.
pub type SitePotentialDerivative = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftMode {
    /// Every site feels the single-site and pair drift.
    Interacting,
    /// Site `k` is a free Brownian motion and the other sites ignore it.
    Decoupled(usize),
    /// No drift at all.
    Free,
}

#[derive(Clone)]
pub struct DriftSpec {
    u_prime: Option<SitePotentialDerivative>,
    params: XyParams,
    mode: DriftMode,
}

impl std::fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DriftSpec")
            .field("u_prime", &self.u_prime.as_ref().map(|_| "<fn>"))
            .field("params", &self.params)
            .field("mode", &self.mode)
            .finish()
    }
}

impl DriftSpec {
    pub fn free() -> Self {
        DriftSpec { u_prime: None, params: XyParams { beta: 0.0, coupling: 0.0 }, mode: DriftMode::Free }
    }

    pub fn interacting(params: XyParams) -> Self {
        DriftSpec { u_prime: None, params, mode: DriftMode::Interacting }
    }

    /// Adds a single-site drift `−U′`; `U′` must be 2π-periodic.
    pub fn with_site_potential(mut self, u_prime: SitePotentialDerivative) -> Result<Self> {
        let (a, b) = (u_prime(0.0), u_prime(TAU - 1e-9));
        if !a.is_finite() || (a - b).abs() > 1e-6 * (1.0 + a.abs()) {
            return usage(format!("U′ is not 2π-periodic: U′(0)={a}, U′(2π−1e−9)={b}"));
        }
        self.u_prime = Some(u_prime);
        Ok(self)
    }

    pub fn with_mode(mut self, mode: DriftMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> DriftMode {
        self.mode
    }

    fn site_drift(&self, shape: &LatticeShape, x: &[f64], i: usize) -> f64 {
        let skip = match self.mode {
            DriftMode::Free => return 0.0,
            DriftMode::Decoupled(k) if k == i => return 0.0,
            DriftMode::Decoupled(k) => Some(k),
            DriftMode::Interacting => None,
        };
        let mut pair = 0.0;
        for j in shape.neighbors(i) {
            if Some(j) != skip {
                pair += (x[i] - x[j]).sin();
            }
        }
        let site = self.u_prime.as_ref().map_or(0.0, |u| u(x[i]));
        -site - self.params.beta_j() * pair
    }
}

/// Euler–Maruyama integration of the rotor diffusion.
pub fn integrate_sde<R: Rng + ?Sized>(
    initial: &SpinConfig,
    drift: &DriftSpec,
    grid: PathGrid,
    rng: &mut R,
) -> Result<Trajectory> {
    let shape = initial.shape();
    let n = shape.n_sites();
    if let DriftMode::Decoupled(k) = drift.mode {
        if k >= n {
            return usage(format!("decoupled site {k} out of range"));
        }
    }
    let dt = grid.dt();
    if dt > 0.01 {
        log::warn!("time step {dt} exceeds the recommended 0.01");
    }
    let noise = (2.0 * dt).sqrt();
    let mut data = Vec::with_capacity((grid.n_steps + 1) * n);
    data.extend_from_slice(initial.angles());
    let mut b = vec![0.0; n];
    for step in 0..grid.n_steps {
        let cur = &data[step * n..(step + 1) * n];
        for (i, bi) in b.iter_mut().enumerate() {
            let v = drift.site_drift(&shape, cur, i);
            if !v.is_finite() {
                return Err(Error::NonFiniteDrift { site: i, message: format!("drift {v} at step {step}") });
            }
            *bi = v;
        }
        for i in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let next = wrap_angle(data[step * n + i] + b[i] * dt + noise * z);
            data.push(next);
        }
    }
    Ok(Trajectory { grid, shape, data })
}

/// Exact free propagation: an independent circle Brownian increment per site.
pub fn free_propagate<R: Rng + ?Sized>(initial: &SpinConfig, t: f64, rng: &mut R) -> Result<SpinConfig> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("propagation time must be non-negative, got {t}"));
    }
    let mut out = initial.clone();
    for i in 0..out.angles().len() {
        let inc = sample_increment(t, rng)?.value();
        out.set(i, initial.get(i) + inc);
    }
    Ok(out)
}

fn check_edge(shape: &LatticeShape, edge: (usize, usize)) -> Result<()> {
    let (i, j) = edge;
    if i >= shape.n_sites() || j >= shape.n_sites() || i == j || !shape.neighbors(i).contains(&j) {
        return usage(format!("{edge:?} is not a nearest-neighbour pair"));
    }
    Ok(())
}

/// `g_A` for the bond `A = {i, j}` with `φ_A = −J cos(x_i − x_j)`; only the
/// diagonal `B = C = A` product term belongs to a single bond.
pub fn girsanov_integrand(
    x: &SpinConfig,
    edge: (usize, usize),
    u_prime: Option<&dyn Fn(f64) -> f64>,
    beta: f64,
    coupling: f64,
) -> Result<f64> {
    check_edge(&x.shape(), edge)?;
    Ok(edge_integrand(x.get(edge.0), x.get(edge.1), u_prime, beta, coupling))
}

#[inline]
fn edge_integrand(xi: f64, xj: f64, u_prime: Option<&dyn Fn(f64) -> f64>, beta: f64, coupling: f64) -> f64 {
    let d = xi - xj;
    let (s, c) = d.sin_cos();
    // ∂_i φ = J sin d, ∂_j φ = −J sin d, ∂²_i φ = ∂²_j φ = J cos d
    let mut lap = 2.0 * coupling * c;
    if let Some(u) = u_prime {
        lap -= u(xi) * coupling * s - u(xj) * coupling * s;
    }
    0.5 * beta * lap - 0.25 * beta * beta * 2.0 * coupling * coupling * s * s
}

/// Trapezoid rule over the grid for a per-state integrand.
fn trapezoid(traj: &Trajectory, f: impl Fn(&[f64]) -> f64) -> f64 {
    let dt = traj.grid.dt();
    let m = traj.n_states();
    let mut acc = 0.5 * (f(traj.state(0)) + f(traj.state(m - 1)));
    for k in 1..m - 1 {
        acc += f(traj.state(k));
    }
    acc * dt
}

/// Path potential `Φ_A` of one bond (free reference, `U ≡ 0`).
pub fn girsanov_potential(edge: (usize, usize), traj: &Trajectory, beta: f64, coupling: f64) -> Result<f64> {
    check_edge(&traj.shape, edge)?;
    let (i, j) = edge;
    let phi = |x: &[f64]| -coupling * (x[i] - x[j]).cos();
    let boundary = 0.5 * beta * (phi(traj.last()) - phi(traj.initial()));
    Ok(boundary - trapezoid(traj, |x| edge_integrand(x[i], x[j], None, beta, coupling)))
}

/// Cross potential of two distinct bonds sharing at least one site: both
/// orderings `(B, C)` and `(C, B)` of the gradient-product term.
pub fn girsanov_cross_potential(
    first: (usize, usize),
    second: (usize, usize),
    traj: &Trajectory,
    beta: f64,
    coupling: f64,
) -> Result<f64> {
    check_edge(&traj.shape, first)?;
    check_edge(&traj.shape, second)?;
    let shared: Vec<usize> = [first.0, first.1].into_iter().filter(|k| *k == second.0 || *k == second.1).collect();
    if shared.is_empty() {
        return Ok(0.0);
    }
    let grad = |edge: (usize, usize), k: usize, x: &[f64]| {
        let s = coupling * (x[edge.0] - x[edge.1]).sin();
        if k == edge.0 {
            s
        } else {
            -s
        }
    };
    let integral = trapezoid(traj, |x| shared.iter().map(|&k| grad(first, k, x) * grad(second, k, x)).sum());
    Ok(0.5 * beta * beta * integral)
}

/// Pairs of distinct bonds (by index in [`LatticeShape::bonds`]) that share a site.
pub fn touching_bond_pairs(shape: &LatticeShape) -> Vec<(usize, usize)> {
    let bonds = shape.bonds();
    let mut out = Vec::new();
    for a in 0..bonds.len() {
        for b in a + 1..bonds.len() {
            let (p, q) = (bonds[a], bonds[b]);
            if p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// `ln F^t = −Σ_A Φ_A` summed over every bond and bond pair, computed from the
/// total potential `V = −βJ Σ cos` as `−½ΔV + ∫ (½ ΔV − ¼ |∇V|²)`.
pub fn girsanov_log_density(traj: &Trajectory, beta: f64, coupling: f64) -> f64 {
    let shape = traj.shape;
    let bonds = shape.bonds();
    let n = shape.n_sites();
    let bj = beta * coupling;
    let potential = |x: &[f64]| -> f64 { -bj * bonds.iter().map(|&(i, j)| (x[i] - x[j]).cos()).sum::<f64>() };
    let integrand = |x: &[f64]| -> f64 {
        let mut lap = 0.0;
        let mut grad_sq = 0.0;
        for i in 0..n {
            let mut g = 0.0;
            for j in shape.neighbors(i) {
                let (s, c) = (x[i] - x[j]).sin_cos();
                g += s;
                lap += c;
            }
            grad_sq += g * g;
        }
        0.5 * bj * lap - 0.25 * bj * bj * grad_sq
    };
    -0.5 * (potential(traj.last()) - potential(traj.initial())) + trapezoid(traj, integrand)
}

/// Girsanov density `F^t` of the interacting law against free paths.
/// The trajectory must have been generated by the free dynamics.
pub fn girsanov_density(traj: &Trajectory, beta: f64, coupling: f64) -> f64 {
    girsanov_log_density(traj, beta, coupling).exp()
}

/// Constant `C` in `|Φ_A| ≤ C (t + sup_{j∈A} d(X_j(t), X_j(0)))` for a bond:
/// `max(sup|φ″|·|A| + ¼ (sup|φ′|)² · #pairs, sup|φ′|)` with `sup|φ′| = sup|φ″| = βJ`.
pub fn edge_bound_constant(beta: f64, coupling: f64) -> f64 {
    let s = (beta * coupling).abs();
    (s * 2.0 + 0.25 * s * s * 2.0).max(s)
}

/// Outcome of the pathwise potential bound on one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// Largest `|Φ| / (C (t + displacement))` seen.
    pub worst_ratio: f64,
}

/// Checks the pathwise bound for every bond potential and every cross potential.
pub fn check_potential_bound(traj: &Trajectory, beta: f64, coupling: f64) -> Result<BoundCheck> {
    let shape = traj.shape;
    let bonds = shape.bonds();
    let t = traj.grid.t_final;
    let c_edge = edge_bound_constant(beta, coupling);
    let disp = |i: usize| circular_distance(traj.last()[i], traj.initial()[i]);
    let mut worst: f64 = 0.0;
    for &(i, j) in &bonds {
        let phi = girsanov_potential((i, j), traj, beta, coupling)?;
        let scale = c_edge * (t + disp(i).max(disp(j)));
        if phi != 0.0 {
            worst = worst.max(phi.abs() / scale);
        }
    }
    for (a, b) in touching_bond_pairs(&shape) {
        let (p, q) = (bonds[a], bonds[b]);
        let shared = [p.0, p.1].iter().filter(|k| **k == q.0 || **k == q.1).count();
        let phi = girsanov_cross_potential(p, q, traj, beta, coupling)?;
        let c_pair = 0.5 * (beta * coupling).powi(2) * shared as f64;
        if phi != 0.0 {
            let sites = [p.0, p.1, q.0, q.1];
            let d = sites.iter().map(|&k| disp(k)).fold(0.0, f64::max);
            worst = worst.max(phi.abs() / (c_pair * (t + d)));
        }
    }
    Ok(BoundCheck { holds: worst <= 1.0, worst_ratio: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn shape(l: usize) -> LatticeShape {
        LatticeShape::new(l).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(PathGrid::new(0.0, 10).is_err());
        assert!(PathGrid::new(1.0, 0).is_err());
        let g = PathGrid::with_step(0.5, 1e-3).unwrap();
        assert_eq!(g.n_steps(), 500);
        assert!((g.dt() * g.n_steps() as f64 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trajectories_are_wrapped_and_reproducible() {
        let s = shape(4);
        let init = SpinConfig::random(s, &mut stream(1, 0));
        let drift = DriftSpec::interacting(XyParams::new(2.0, 1.0).unwrap())
            .with_site_potential(Arc::new(|x: f64| 0.3 * x.sin()))
            .unwrap();
        let g = PathGrid::new(0.2, 200).unwrap();
        let a = integrate_sde(&init, &drift, g, &mut stream(2, 0)).unwrap();
        let b = integrate_sde(&init, &drift, g, &mut stream(2, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_states(), 201);
        assert!(a.states().flatten().all(|&v| (0.0..TAU).contains(&v)));
        assert_eq!(a.initial(), init.angles());
    }

    #[test]
    fn non_periodic_site_potential_rejected() {
        let r = DriftSpec::free().with_site_potential(Arc::new(|x: f64| x));
        assert!(r.is_err());
    }

    #[test]
    fn non_finite_drift_reports_site() {
        let s = shape(2);
        let drift = DriftSpec::interacting(XyParams::new(1.0, 1.0).unwrap())
            .with_site_potential(Arc::new(|x: f64| if x == 0.0 { f64::NAN } else { 0.0 }))
            .unwrap_err();
        assert!(matches!(drift, Error::Usage(_)));
        // periodic but singular away from the spot-check points
        let bad = DriftSpec::interacting(XyParams::new(1.0, 1.0).unwrap())
            .with_site_potential(Arc::new(|x: f64| if (x - 1.0).abs() < 0.5 { f64::INFINITY } else { 0.0 }))
            .unwrap();
        let init = SpinConfig::from_fn(s, |i| if i == 3 { 1.0 } else { 3.0 });
        let err = integrate_sde(&init, &bad, PathGrid::new(0.01, 1).unwrap(), &mut stream(0, 0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteDrift { site: 3, .. }));
    }

    #[test]
    fn decoupled_site_moves_freely() {
        let s = shape(4);
        let p = XyParams::new(1.0, 1.0).unwrap();
        let init = SpinConfig::random(s, &mut stream(4, 0));
        let d = DriftSpec::interacting(p).with_mode(DriftMode::Decoupled(5));
        assert_eq!(d.site_drift(&s, init.angles(), 5), 0.0);
        // neighbours of 5 ignore it
        let n = s.neighbors(5)[0];
        let mut moved = init.angles().to_vec();
        moved[5] += 1.0;
        assert_eq!(d.site_drift(&s, init.angles(), n), d.site_drift(&s, &moved, n));
        assert!(integrate_sde(&init, &d.clone().with_mode(DriftMode::Decoupled(99)), PathGrid::new(1.0, 1).unwrap(), &mut stream(0, 0)).is_err());
    }

    #[test]
    fn free_propagate_zero_time_is_identity() {
        let init = SpinConfig::random(shape(4), &mut stream(6, 0));
        assert_eq!(free_propagate(&init, 0.0, &mut stream(7, 0)).unwrap(), init);
        assert!(free_propagate(&init, -1.0, &mut stream(7, 0)).is_err());
    }

    fn finite_difference_integrand(xi: f64, xj: f64, u: &dyn Fn(f64) -> f64, beta: f64, j: f64) -> f64 {
        let phi = |a: f64, b: f64| -j * (a - b).cos();
        let h = 1e-4;
        let di = (phi(xi + h, xj) - phi(xi - h, xj)) / (2.0 * h);
        let dj = (phi(xi, xj + h) - phi(xi, xj - h)) / (2.0 * h);
        let dii = (phi(xi + h, xj) - 2.0 * phi(xi, xj) + phi(xi - h, xj)) / (h * h);
        let djj = (phi(xi, xj + h) - 2.0 * phi(xi, xj) + phi(xi, xj - h)) / (h * h);
        0.5 * beta * (dii - u(xi) * di + djj - u(xj) * dj) - 0.25 * beta * beta * (di * di + dj * dj)
    }

    #[test]
    fn integrand_examples() {
        let s = shape(4);
        let x = SpinConfig::random(s, &mut stream(8, 0));
        assert_eq!(girsanov_integrand(&x, (0, 1), None, 0.0, 2.0).unwrap(), 0.0);
        let aligned = SpinConfig::uniform(s, 0.7);
        let g = girsanov_integrand(&aligned, (0, 1), None, 0.8, 1.5).unwrap();
        assert!((g - 0.8 * 1.5).abs() < 1e-12);
        assert!(girsanov_integrand(&x, (0, 5), None, 1.0, 1.0).is_err());

        let u = |v: f64| 0.4 * v.sin() + 0.1 * (2.0 * v).cos();
        let mut rng = stream(9, 0);
        for _ in 0..50 {
            let x = SpinConfig::random(s, &mut rng);
            let site = rng.random_range(0..16);
            let nb = s.neighbors(site)[rng.random_range(0..4)];
            let (beta, j) = (rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0);
            let g = girsanov_integrand(&x, (site, nb), Some(&u), beta, j).unwrap();
            let fd = finite_difference_integrand(x.get(site), x.get(nb), &u, beta, j);
            assert!((g - fd).abs() < 1e-6, "{g} vs {fd}");
        }
    }

    #[test]
    fn potential_examples() {
        let s = shape(4);
        let traj = integrate_sde(&SpinConfig::random(s, &mut stream(1, 2)), &DriftSpec::free(), PathGrid::new(0.5, 500).unwrap(), &mut stream(3, 3)).unwrap();
        assert_eq!(girsanov_potential((0, 1), &traj, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(girsanov_log_density(&traj, 1.0, 0.0), 0.0);
        assert_eq!(girsanov_density(&traj, 1.0, 0.0), 1.0);

        // constant-in-time path
        let x = SpinConfig::random(s, &mut stream(5, 5));
        let still = Trajectory { grid: PathGrid::new(0.7, 70).unwrap(), shape: s, data: x.angles().repeat(71) };
        let phi = girsanov_potential((0, 1), &still, 0.9, 1.1).unwrap();
        let g = girsanov_integrand(&x, (0, 1), None, 0.9, 1.1).unwrap();
        assert!((phi + 0.7 * g).abs() < 1e-12);
    }

    #[test]
    fn potentials_sum_to_log_density() {
        for l in [2, 4] {
            let s = shape(l);
            let traj = integrate_sde(&SpinConfig::random(s, &mut stream(l as u64, 0)), &DriftSpec::free(), PathGrid::new(0.3, 300).unwrap(), &mut stream(11, l as u64)).unwrap();
            let (beta, j) = (0.7, 0.9);
            let bonds = s.bonds();
            let mut total = 0.0;
            for &e in &bonds {
                total += girsanov_potential(e, &traj, beta, j).unwrap();
            }
            for (a, b) in touching_bond_pairs(&s) {
                total += girsanov_cross_potential(bonds[a], bonds[b], &traj, beta, j).unwrap();
            }
            let lf = girsanov_log_density(&traj, beta, j);
            assert!((lf + total).abs() < 1e-10, "L={l}: {lf} vs {}", -total);
        }
    }

    #[test]
    fn subsample_keeps_endpoints() {
        let s = shape(2);
        let traj = integrate_sde(&SpinConfig::uniform(s, 0.0), &DriftSpec::free(), PathGrid::new(1.0, 10).unwrap(), &mut stream(0, 1)).unwrap();
        let c = traj.subsample(2).unwrap();
        assert_eq!(c.grid().n_steps(), 5);
        assert_eq!(c.last(), traj.last());
        assert!(traj.subsample(3).is_err());
        assert_eq!(traj.dump().lines().count(), 11 * 4);
    }
}
