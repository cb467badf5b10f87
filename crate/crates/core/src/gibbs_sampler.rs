//! Metropolis sampling of finite-volume rotor Gibbs measures, quadrature
//! oracles for tiny volumes, the chessboard estimate on the 2×2 torus and the
//! frozen-ring boundary probe.
//!
//! Samplers work on a [`GibbsModel`]: an arbitrary neighbour multigraph with
//! coupling `βJ`, optional site fields and optionally frozen sites. The
//! measure is `e^{−H}` with respect to the uniform product measure.

use std::f64::consts::{FRAC_PI_2, PI};

use log::debug;
use rand::Rng;
use rayon::prelude::*;

use crate::conditioned_model::{yspec_fields, ConditionedParams};
use crate::error::{usage, Result};
use crate::quadrature::circle_midpoints;
use crate::rng::{stream, Stream};
use crate::rotor_model::{FieldSpec, LatticeShape, SpinConfig, XyParams};
use crate::wrap_angle;

/// Run-length parameters of a Metropolis chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Total number of sweeps, burn-in included.
    pub sweeps: usize,
    pub burn_in: usize,
    /// Initial proposal half-width; tuned during burn-in.
    pub proposal_width: f64,
    pub seed: u64,
    pub thin: usize,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps < self.burn_in {
            return usage(format!("sweeps ({}) must be at least burn_in ({})", self.sweeps, self.burn_in));
        }
        if !(self.proposal_width > 0.0 && self.proposal_width <= PI) {
            return usage(format!("proposal width must lie in (0, π], got {}", self.proposal_width));
        }
        if self.thin == 0 {
            return usage("thin must be positive");
        }
        Ok(())
    }
}

/// Neighbour multigraph with coupling, fields and frozen sites.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsModel {
    neighbors: Vec<Vec<usize>>,
    beta_j: f64,
    fields: Option<FieldSpec>,
    frozen: Vec<bool>,
    /// `(−1)^{i₁+i₂}` (or `(−1)^i` on a chain), used for `M_UD`.
    stagger: Vec<f64>,
    shape: Option<LatticeShape>,
}

impl GibbsModel {
    /// Nearest-neighbour model on the periodic `L×L` torus. On `L = 2` every
    /// neighbour appears twice, matching [`crate::rotor_model::energy_total`].
    pub fn torus(shape: LatticeShape, params: XyParams, fields: Option<FieldSpec>) -> Result<Self> {
        let n = shape.n_sites();
        if let Some(f) = &fields {
            if f.len() != n {
                return usage(format!("field spec has {} sites, lattice has {n}", f.len()));
            }
        }
        Ok(GibbsModel {
            neighbors: (0..n).map(|s| shape.neighbors(s).to_vec()).collect(),
            beta_j: params.beta_j(),
            fields,
            frozen: vec![false; n],
            stagger: (0..n).map(|s| if shape.parity(s) == 0 { 1.0 } else { -1.0 }).collect(),
            shape: Some(shape),
        })
    }

    /// The conditioned time-zero model: torus with `y^spec` fields of size `h(t)`.
    pub fn conditioned(shape: LatticeShape, p: &ConditionedParams) -> Result<Self> {
        Self::torus(shape, p.xy(), Some(yspec_fields(shape, p)))
    }

    /// Open chain `0 − 1 − … − (n−1)`.
    pub fn chain(n_sites: usize, params: XyParams, fields: Option<FieldSpec>) -> Result<Self> {
        if n_sites == 0 {
            return usage("chain needs at least one site");
        }
        if let Some(f) = &fields {
            if f.len() != n_sites {
                return usage(format!("field spec has {} sites, chain has {n_sites}", f.len()));
            }
        }
        let neighbors = (0..n_sites)
            .map(|i| {
                let mut v = Vec::new();
                if i > 0 {
                    v.push(i - 1);
                }
                if i + 1 < n_sites {
                    v.push(i + 1);
                }
                v
            })
            .collect();
        Ok(GibbsModel {
            neighbors,
            beta_j: params.beta_j(),
            fields,
            frozen: vec![false; n_sites],
            stagger: (0..n_sites).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            shape: None,
        })
    }

    /// Marks sites that the sampler never updates.
    pub fn with_frozen(mut self, frozen: Vec<bool>) -> Result<Self> {
        if frozen.len() != self.n_sites() {
            return usage("frozen mask length differs from the number of sites");
        }
        self.frozen = frozen;
        Ok(self)
    }

    pub fn n_sites(&self) -> usize {
        self.neighbors.len()
    }

    pub fn shape(&self) -> Option<LatticeShape> {
        self.shape
    }

    pub fn beta_j(&self) -> f64 {
        self.beta_j
    }

    pub fn fields(&self) -> Option<&FieldSpec> {
        self.fields.as_ref()
    }

    pub fn is_frozen(&self, site: usize) -> bool {
        self.frozen[site]
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        let mut bonds = 0.0;
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                bonds += (x[i] - x[j]).cos();
            }
        }
        let mut e = -0.5 * self.beta_j * bonds;
        if let Some(f) = &self.fields {
            e += x.iter().enumerate().map(|(i, &a)| f.site_energy(i, a)).sum::<f64>();
        }
        e
    }

    #[inline]
    pub fn energy_delta(&self, x: &[f64], site: usize, new: f64) -> f64 {
        let old = x[site];
        let mut d = 0.0;
        for &j in &self.neighbors[site] {
            d += (old - x[j]).cos() - (new - x[j]).cos();
        }
        let mut delta = self.beta_j * d;
        if let Some(f) = &self.fields {
            delta += f.site_energy(site, new) - f.site_energy(site, old);
        }
        delta
    }

    fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_sites() {
            return usage(format!("state has {} sites, model has {}", x.len(), self.n_sites()));
        }
        Ok(())
    }
}

/// `M_LR = mean sin x_i`.
pub fn m_lr(x: &[f64]) -> f64 {
    x.iter().map(|a| a.sin()).sum::<f64>() / x.len() as f64
}

fn m_ud(x: &[f64], stagger: &[f64]) -> f64 {
    x.iter().zip(stagger).map(|(a, s)| s * a.cos()).sum::<f64>() / x.len() as f64
}

/// One row-major sweep over the unfrozen sites. Returns the accepted fraction.
pub fn metropolis_sweep<R: Rng + ?Sized>(x: &mut [f64], model: &GibbsModel, width: f64, rng: &mut R) -> f64 {
    sweep(x, model, width, rng, false)
}

/// As [`metropolis_sweep`] but with every proposal increment negated. Run
/// from the reflected initial state with the same stream, it produces the
/// mirror image of the plain chain.
pub fn metropolis_sweep_mirrored<R: Rng + ?Sized>(x: &mut [f64], model: &GibbsModel, width: f64, rng: &mut R) -> f64 {
    sweep(x, model, width, rng, true)
}

fn sweep<R: Rng + ?Sized>(x: &mut [f64], model: &GibbsModel, width: f64, rng: &mut R, mirror: bool) -> f64 {
    let mut tried = 0usize;
    let mut accepted = 0usize;
    for site in 0..x.len() {
        if model.frozen[site] {
            continue;
        }
        let step = width * (2.0 * rng.random::<f64>() - 1.0);
        let step = if mirror { -step } else { step };
        let proposal = wrap_angle(x[site] + step);
        let dh = model.energy_delta(x, site, proposal);
        // the uniform is always drawn so that mirrored chains stay in lockstep
        let u: f64 = rng.random();
        tried += 1;
        if u < (-dh).exp() {
            x[site] = proposal;
            accepted += 1;
        }
    }
    if tried == 0 {
        1.0
    } else {
        accepted as f64 / tried as f64
    }
}

/// Thinned post-burn-in observables of one chain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSeries {
    pub sweep: Vec<usize>,
    pub m_lr: Vec<f64>,
    pub m_ud: Vec<f64>,
    pub energy: Vec<f64>,
    pub acc: Vec<f64>,
    /// Proposal width after burn-in tuning.
    pub width: f64,
    /// Smallest and largest `M_LR` over every post-burn-in sweep, thinned or not.
    pub m_lr_range: Option<(f64, f64)>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.sweep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sweep.is_empty()
    }

    /// CSV with header `sweep,M_LR,M_UD,energy,acc`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sweep,M_LR,M_UD,energy,acc\n");
        for k in 0..self.len() {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.sweep[k], self.m_lr[k], self.m_ud[k], self.energy[k], self.acc[k]
            ));
        }
        s
    }
}

/// Runs a chain and returns its observable series.
pub fn run_chain(initial: &[f64], model: &GibbsModel, cfg: &SamplerConfig) -> Result<ObservableSeries> {
    Ok(run_chain_with(initial, model, cfg, false, |_, _| {})?.0)
}

/// Runs a chain, calling `visit(sweep, state)` at every recorded sample, and
/// returns the series together with the final state. The stream is
/// `stream(cfg.seed, 0)`.
pub fn run_chain_with(
    initial: &[f64],
    model: &GibbsModel,
    cfg: &SamplerConfig,
    mirror: bool,
    mut visit: impl FnMut(usize, &[f64]),
) -> Result<(ObservableSeries, Vec<f64>)> {
    cfg.validate()?;
    model.check_state(initial)?;
    let mut rng: Stream = stream(cfg.seed, 0);
    let mut x: Vec<f64> = initial.iter().map(|&a| wrap_angle(a)).collect();
    let mut width = cfg.proposal_width;
    let mut out = ObservableSeries::default();
    for s in 1..=cfg.sweeps {
        let acc = sweep(&mut x, model, width, &mut rng, mirror);
        if s <= cfg.burn_in {
            if acc < 0.4 {
                width *= 0.9;
            } else if acc > 0.6 {
                width *= 1.1;
            }
            width = width.clamp(1e-3, PI);
            continue;
        }
        let m = m_lr(&x);
        out.m_lr_range = Some(match out.m_lr_range {
            Some((lo, hi)) => (lo.min(m), hi.max(m)),
            None => (m, m),
        });
        if (s - cfg.burn_in).is_multiple_of(cfg.thin) {
            out.sweep.push(s);
            out.m_lr.push(m);
            out.m_ud.push(m_ud(&x, &model.stagger));
            out.energy.push(model.energy(&x));
            out.acc.push(acc);
            visit(s, &x);
        }
    }
    out.width = width;
    debug!("chain done: {} samples, width {width:.4}", out.len());
    Ok((out, x))
}

/// Mean and batch-means standard error of a series.
pub fn mean_stderr(values: &[f64], n_batches: usize) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let b = n_batches.max(2).min(n);
    let size = n / b;
    if size == 0 || b < 2 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = (0..b).map(|k| values[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let mm = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - mm).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

/// Expectations of the one- and two-site observables under `e^{−H}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallVolumeTable {
    /// `∫ e^{−H} Π dx_i / 2π` over the unfrozen sites.
    pub z: f64,
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
    /// `⟨cos(x_i − x_j)⟩`, symmetric.
    pub cos_pair: Vec<Vec<f64>>,
}

/// Tensor-product midpoint quadrature over the unfrozen sites (at most 4,
/// `n_grid ≤ 64`). Frozen sites keep the angles given in `frozen_state`.
pub fn exact_small_volume(model: &GibbsModel, frozen_state: Option<&[f64]>, n_grid: usize) -> Result<SmallVolumeTable> {
    let n = model.n_sites();
    let free: Vec<usize> = (0..n).filter(|&i| !model.frozen[i]).collect();
    if free.len() > 4 {
        return usage(format!("{} free sites; quadrature is limited to 4", free.len()));
    }
    if n_grid == 0 || n_grid > 64 {
        return usage(format!("n_grid must lie in 1..=64, got {n_grid}"));
    }
    let base: Vec<f64> = match frozen_state {
        Some(s) => {
            model.check_state(s)?;
            s.to_vec()
        }
        None => vec![0.0; n],
    };
    let nodes = circle_midpoints(n_grid);
    let k = free.len();
    let total = n_grid.pow(k as u32);
    // one partial sum per first-coordinate slice, reduced in order
    let slices = if k == 0 { 1 } else { n_grid };
    let per = total / slices;
    let partial: Vec<Vec<f64>> = (0..slices)
        .into_par_iter()
        .map(|first| {
            let mut x = base.clone();
            let mut acc = vec![0.0; 1 + 2 * n + n * n];
            for r in 0..per {
                let mut idx = first * per + r;
                for &site in free.iter().rev() {
                    x[site] = nodes[idx % n_grid];
                    idx /= n_grid;
                }
                let w = (-model.energy(&x)).exp();
                acc[0] += w;
                for i in 0..n {
                    acc[1 + i] += w * x[i].sin();
                    acc[1 + n + i] += w * x[i].cos();
                    for j in 0..n {
                        acc[1 + 2 * n + i * n + j] += w * (x[i] - x[j]).cos();
                    }
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![0.0; 1 + 2 * n + n * n];
    for p in &partial {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
    }
    let z_sum = acc[0];
    Ok(SmallVolumeTable {
        z: z_sum / total as f64,
        sin: (0..n).map(|i| acc[1 + i] / z_sum).collect(),
        cos: (0..n).map(|i| acc[1 + n + i] / z_sum).collect(),
        cos_pair: (0..n).map(|i| (0..n).map(|j| acc[1 + 2 * n + i * n + j] / z_sum).collect()).collect(),
    })
}

/// A function of the four corner angles of a plaquette, in the corner order
/// of [`LatticeShape::plaquette_corners`].
pub type PlaquetteFn = dyn Fn(&[f64; 4]) -> f64 + Sync;

/// Corner permutation of the horizontal reflection of the elementary cube.
pub fn reflect_horizontal(c: &[f64; 4]) -> [f64; 4] {
    [c[1], c[0], c[3], c[2]]
}

/// Corner permutation of the vertical reflection of the elementary cube.
pub fn reflect_vertical(c: &[f64; 4]) -> [f64; 4] {
    [c[2], c[3], c[0], c[1]]
}

/// Random trigonometric polynomial of degree at most 2 in the four corner
/// angles, averaged over both cube reflections and shifted to be at least
/// `0.1` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantTrigPolynomial {
    terms: Vec<([i32; 4], f64, f64)>,
    shift: f64,
}

impl InvariantTrigPolynomial {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_terms: usize) -> Self {
        let mut terms = Vec::with_capacity(n_terms);
        for _ in 0..n_terms {
            let mut k = [0i32; 4];
            let degree = rng.random_range(1..=2);
            for _ in 0..degree {
                let i = rng.random_range(0..4);
                k[i] += if rng.random::<bool>() { 1 } else { -1 };
            }
            terms.push((k, 2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0));
        }
        let shift = terms.iter().map(|(_, a, b)| a.abs() + b.abs()).sum::<f64>() + 0.1;
        InvariantTrigPolynomial { terms, shift }
    }

    fn raw(&self, c: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(k, a, b)| {
                let phase: f64 = k.iter().zip(c).map(|(&ki, &ci)| ki as f64 * ci).sum();
                a * phase.cos() + b * phase.sin()
            })
            .sum()
    }

    pub fn eval(&self, c: &[f64; 4]) -> f64 {
        let h = reflect_horizontal(c);
        let v = reflect_vertical(c);
        let hv = reflect_vertical(&h);
        0.25 * (self.raw(c) + self.raw(&h) + self.raw(&v) + self.raw(&hv)) + self.shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChessboardReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Chessboard estimate on the 2×2 torus by full quadrature:
///
/// ```text
/// ∫ Π_a f_a(x_a) dν  ≤  Π_a [ ∫ Π_b f_a(x_b) dν ]^{1/|Λ|}
/// ```
pub fn chessboard_check(f_set: &[&PlaquetteFn], model: &GibbsModel, n_grid: usize) -> Result<ChessboardReport> {
    let shape = match model.shape {
        Some(s) if s.side() == 2 => s,
        _ => return usage("chessboard check needs a 2×2 torus model"),
    };
    if model.frozen.iter().any(|&f| f) {
        return usage("chessboard check needs an unconstrained model");
    }
    let n_dual = shape.n_sites();
    if f_set.len() != n_dual {
        return usage(format!("need {n_dual} plaquette functions, got {}", f_set.len()));
    }
    if n_grid == 0 || n_grid > 64 {
        return usage(format!("n_grid must lie in 1..=64, got {n_grid}"));
    }
    let mut rng = stream(0x00c4_e55b, 0);
    for (a, f) in f_set.iter().enumerate() {
        for _ in 0..100 {
            let c: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * crate::TAU);
            let v = f(&c);
            let dh = (f(&reflect_horizontal(&c)) - v).abs();
            let dv = (f(&reflect_vertical(&c)) - v).abs();
            if dh > 1e-9 || dv > 1e-9 {
                return usage(format!("plaquette function {a} is not reflection invariant (gap {:e})", dh.max(dv)));
            }
        }
    }
    let corners: Vec<[usize; 4]> = (0..n_dual).map(|b| shape.plaquette_corners(b)).collect();
    let nodes = circle_midpoints(n_grid);
    let total = n_grid.pow(4);
    let partial: Vec<Result<Vec<f64>>> = (0..n_grid)
        .into_par_iter()
        .map(|first| {
            let mut acc = vec![0.0; 2 + n_dual];
            let mut x = [0.0; 4];
            let per = total / n_grid;
            for r in 0..per {
                let idx = first * per + r;
                x[0] = nodes[first];
                x[1] = nodes[(idx / (n_grid * n_grid)) % n_grid];
                x[2] = nodes[(idx / n_grid) % n_grid];
                x[3] = nodes[idx % n_grid];
                let w = (-model.energy(&x)).exp();
                acc[0] += w;
                let local: Vec<[f64; 4]> = corners.iter().map(|c| [x[c[0]], x[c[1]], x[c[2]], x[c[3]]]).collect();
                let mut lhs = w;
                for (a, f) in f_set.iter().enumerate() {
                    let v = f(&local[a]);
                    if !(v >= 0.0) {
                        return usage(format!("plaquette function {a} is negative or NaN ({v})"));
                    }
                    lhs *= v;
                    acc[2 + a] += w * local.iter().map(f).product::<f64>();
                }
                acc[1] += lhs;
            }
            Ok(acc)
        })
        .collect();
    let mut acc = vec![0.0; 2 + n_dual];
    for p in partial {
        for (a, b) in acc.iter_mut().zip(p?) {
            *a += b;
        }
    }
    let z = acc[0];
    let lhs = acc[1] / z;
    let rhs = (0..n_dual).map(|a| (acc[2 + a] / z).powf(1.0 / n_dual as f64)).product::<f64>();
    Ok(ChessboardReport { lhs, rhs, holds: lhs <= rhs + 1e-9 })
}

/// Frozen-ring expectations at one lattice size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BadProbeRow {
    pub side: usize,
    pub mean_xi: f64,
    pub stderr_xi: f64,
    pub mean_eta: f64,
    pub stderr_eta: f64,
    pub gap: f64,
    pub stderr: f64,
}

/// `L×L` conditioned model whose outer ring of sites is frozen at `ring`.
pub fn frozen_ring_model(side: usize, p: &ConditionedParams) -> Result<GibbsModel> {
    let shape = LatticeShape::new(side)?;
    let mask = (0..shape.n_sites())
        .map(|s| {
            let (x, y) = shape.coords(s);
            x == 0 || y == 0 || x == side - 1 || y == side - 1
        })
        .collect();
    GibbsModel::conditioned(shape, p)?.with_frozen(mask)
}

/// Frozen-ring boundary probe: for every `L`, samples the conditioned model
/// with the outer ring frozen at `ξ` and at `η` and reports
/// `|⟨sin x₀⟩_ξ − ⟨sin x₀⟩_η|` at the centre site `x₀ = (L/2, L/2)`.
///
/// The interior starts at the reflection-neutral configuration `x ≡ 0`.
/// Run `k` of the list uses streams `seed + 2k` (ξ) and `seed + 2k + 1` (η).
pub fn bad_config_probe(
    sides: &[usize],
    p: &ConditionedParams,
    outer: (f64, f64),
    cfg: &SamplerConfig,
) -> Result<Vec<BadProbeRow>> {
    cfg.validate()?;
    for &l in sides {
        if l < 4 || l % 2 != 0 {
            return usage(format!("probe sides must be even and at least 4, got {l}"));
        }
    }
    let jobs: Vec<(usize, usize, f64)> = sides
        .iter()
        .enumerate()
        .flat_map(|(k, &l)| [(2 * k, l, outer.0), (2 * k + 1, l, outer.1)])
        .collect();
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(run, l, ring)| {
            let model = frozen_ring_model(l, p)?;
            let shape = model.shape().expect("torus model");
            let centre = shape.index(l / 2, l / 2);
            let init: Vec<f64> = (0..shape.n_sites()).map(|s| if model.is_frozen(s) { ring } else { 0.0 }).collect();
            let run_cfg = SamplerConfig { seed: cfg.seed.wrapping_add(run as u64), ..*cfg };
            let mut obs = Vec::new();
            run_chain_with(&init, &model, &run_cfg, false, |_, x| obs.push(x[centre].sin()))?;
            Ok(mean_stderr(&obs, 20))
        })
        .collect();
    let mut rows = Vec::new();
    for (k, &l) in sides.iter().enumerate() {
        let (mx, ex) = results[2 * k].clone()?;
        let (me, ee) = results[2 * k + 1].clone()?;
        rows.push(BadProbeRow {
            side: l,
            mean_xi: mx,
            stderr_xi: ex,
            mean_eta: me,
            stderr_eta: ee,
            gap: (mx - me).abs(),
            stderr: ex.hypot(ee),
        });
    }
    Ok(rows)
}

/// Default boundary pair: all spins right (`π/2`) and all spins left (`3π/2`).
pub const RING_PAIR: (f64, f64) = (FRAC_PI_2, 3.0 * FRAC_PI_2);

/// Convenience: the state vector of a lattice configuration.
pub fn state_of(config: &SpinConfig) -> Vec<f64> {
    config.angles().to_vec()
}
