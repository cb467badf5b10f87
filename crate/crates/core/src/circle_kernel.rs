//! Heat kernel of Brownian motion on the circle.
//!
//! The kernel is normalised with Fourier coefficients `e^{-n² t}`:
//!
//! ```text
//! K_t(Δ) = (1/2π) (1 + 2 Σ_{n≥1} e^{-n² t} cos nΔ)
//!        = (4π t)^{-1/2} Σ_{n∈ℤ} exp(-(Δ - 2πn)² / 4t)
//! ```
//!
//! i.e. the generator is `∂²` and the wrapped Gaussian has variance `2t`.
//! Each representation is used on the side of the crossover `t* = π` where
//! its terms decay fastest.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::{wrap_angle, TAU};

/// Time at which the Fourier and wrapped-Gaussian series decay equally fast.
pub const CROSSOVER_TIME: f64 = PI;

const TERM_CUTOFF: f64 = 1e-16;
const MAX_TERMS: usize = 64;

/// An angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub fn new(value: f64) -> Self {
        Angle(wrap_angle(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Circular distance to `other`, in `[0, π]`.
    pub fn distance(self, other: Angle) -> f64 {
        crate::circular_distance(self.0, other.0)
    }
}

impl std::ops::Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// A strictly positive diffusion time.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct KernelTime(f64);

impl KernelTime {
    pub fn new(t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(KernelTime(t))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return domain(format!("kernel time must be finite and positive, got {t}"));
    }
    Ok(())
}

/// Folds an angle difference to `[0, π]`. `fold(Δ) == fold(-Δ)` bit-for-bit.
fn fold(delta: f64) -> f64 {
    let d = delta.abs().rem_euclid(TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// `1 + 2 Σ e^{-n² t} cos nΔ` without the `1/2π` prefactor, returned as the
/// correction `u = 2 Σ ...` so that callers can take `ln(1 + u)` accurately.
fn fourier_correction(d: f64, t: f64) -> f64 {
    let mut u = 0.0;
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        let a = (-nf * nf * t).exp();
        if a < TERM_CUTOFF {
            return u;
        }
        u += 2.0 * a * (nf * d).cos();
    }
    debug_assert!(false, "Fourier series hit the term cap at t={t}");
    u
}

/// Fourier-series evaluation of `K_t(Δ)`, valid for every `t > 0` but slow
/// for small `t`.
pub fn fourier_density(delta: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((1.0 + fourier_correction(fold(delta), t)) / TAU)
}

/// Wrapped-Gaussian evaluation of `K_t(Δ)` with variance `2t`.
pub fn wrapped_gaussian_density(delta: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let d = fold(delta);
    let four_t = 4.0 * t;
    let mut sum = (-(d * d) / four_t).exp();
    for k in 1..=MAX_TERMS {
        let shift = TAU * k as f64;
        let term = (-(d - shift).powi(2) / four_t).exp() + (-(d + shift).powi(2) / four_t).exp();
        sum += term;
        if term <= TERM_CUTOFF * sum {
            return Ok(sum / (PI * four_t).sqrt());
        }
    }
    debug_assert!(false, "wrapped Gaussian hit the term cap at t={t}");
    Ok(sum / (PI * four_t).sqrt())
}

/// Density of the circle heat kernel `K_t(Δ)` with respect to `dx` on `[0, 2π)`.
pub fn kernel_density(delta: f64, t: f64) -> Result<f64> {
    if t < CROSSOVER_TIME {
        wrapped_gaussian_density(delta, t)
    } else {
        fourier_density(delta, t)
    }
}

/// `ln K_t(Δ)`; for `t ≥ π` this is `ln(1/2π) + ln1p(u)` so it stays exact
/// as the kernel flattens out.
pub fn log_kernel(delta: f64, t: f64) -> Result<f64> {
    if t < CROSSOVER_TIME {
        Ok(wrapped_gaussian_density(delta, t)?.ln())
    } else {
        check_time(t)?;
        Ok(fourier_correction(fold(delta), t).ln_1p() - TAU.ln())
    }
}

/// `ln(2π K_t(Δ))`, the single-site term of the conditioned Hamiltonian.
pub fn log_relative_kernel(delta: f64, t: f64) -> Result<f64> {
    if t < CROSSOVER_TIME {
        Ok((TAU * wrapped_gaussian_density(delta, t)?).ln())
    } else {
        check_time(t)?;
        Ok(fourier_correction(fold(delta), t).ln_1p())
    }
}

/// Draws an increment of circle Brownian motion over time `t`.
pub fn sample_increment<R: Rng + ?Sized>(t: f64, rng: &mut R) -> Result<Angle> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("increment time must be finite and non-negative, got {t}"));
    }
    if t == 0.0 {
        return Ok(Angle(0.0));
    }
    let z: f64 = rng.sample(StandardNormal);
    Ok(Angle::new(z * (2.0 * t).sqrt()))
}

/// `ε(T) = sup_{t≥T} sup_Δ |2π K_t(Δ) − 1| = 2 Σ_{n≥1} e^{-n² T}`.
pub fn kernel_fluctuation(t: f64) -> Result<f64> {
    check_time(t)?;
    // the leading term is always kept so that ε(T) / 2e^{-T} → 1 even deep in the tail
    let mut s = (-t).exp();
    for n in 2..=MAX_TERMS {
        let nf = n as f64;
        let a = (-nf * nf * t).exp();
        if a < TERM_CUTOFF * s {
            break;
        }
        s += a;
    }
    Ok(2.0 * s)
}

/// Magnitude of the induced single-site field, `h(t) = 2 e^{-t}`.
pub fn effective_field(t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("field time must be finite and non-negative, got {t}"));
    }
    Ok(2.0 * (-t).exp())
}
