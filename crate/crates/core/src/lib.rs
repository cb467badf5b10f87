//! Planar rotors on the circle: exact heat kernels, interacting diffusions,
//! conditioned two-layer Gibbs models and their low-temperature structure.
//!
//! The crate is organised bottom-up:
//!
//! - [`circle_kernel`]: heat kernel of Brownian motion on the circle.
//! - [`rotor_model`]: nearest-neighbour XY Hamiltonians on the periodic square lattice.
//! - [`path_dynamics`]: Euler–Maruyama rotor diffusions and Girsanov path weights.
//! - [`conditioned_model`]: the time-zero layer conditioned on the alternating configuration.
//! - [`gibbs_sampler`]: Metropolis chains, quadrature oracles, chessboard and boundary probes.
//! - [`dual_percolation`]: low-energy site percolation on the dual lattice.
//! - [`polymer_expansion`]: Kotecký–Preiss checks and cluster-expansion oracles.

pub mod circle_kernel;
pub mod conditioned_model;
pub mod dual_percolation;
mod error;
pub mod gibbs_sampler;
pub mod path_dynamics;
pub mod polymer_expansion;
pub mod quadrature;
pub mod rotor_model;
pub mod rng;

pub use error::{Error, Result};

/// 2π.
pub const TAU: f64 = std::f64::consts::TAU;

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance `min(|a-b|, 2π-|a-b|)`, in `[0, π]`.
#[inline]
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    d.min(TAU - d)
}
