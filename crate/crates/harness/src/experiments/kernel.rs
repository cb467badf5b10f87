use rotor_gibbs::circle_kernel::{fourier_density, kernel_density, log_kernel, wrapped_gaussian_density};
use rotor_gibbs::quadrature::integrate_circle;
use rotor_gibbs::TAU;

use super::{num, Outcome, Result, Table};
use crate::config::KernelTableConfig;

/// Density at `Δ = 0`, `t = 1`, to seven digits.
const REFERENCE_AT_ONE: f64 = 0.2821240;

pub(super) fn run(c: &KernelTableConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut table = Table::new(&["t", "delta", "density", "log_density"]);
    let mut worst_repr = 0.0f64;
    for &t in &c.times {
        for k in 0..c.n_delta {
            let d = TAU * k as f64 / c.n_delta as f64;
            table.row([num(t), num(d), num(kernel_density(d, t)?), num(log_kernel(d, t)?)]);
            if t >= 0.5 {
                worst_repr = worst_repr.max((wrapped_gaussian_density(d, t)? - fourier_density(d, t)?).abs());
            }
        }
    }
    out.file("kernel.csv", table.finish());

    let mut norm = Table::new(&["t", "integral", "abs_error"]);
    let mut worst_norm = 0.0f64;
    for &t in &c.times {
        let z = integrate_circle(|y| kernel_density(y, t).unwrap_or(f64::NAN), c.quadrature_nodes);
        let err = (z - 1.0).abs();
        worst_norm = worst_norm.max(if err.is_nan() { f64::INFINITY } else { err });
        norm.row([num(t), num(z), num(err)]);
    }
    out.file("kernel_normalization.csv", norm.finish());

    out.check("normalization", worst_norm <= 1e-10, format!("worst |∫K_t − 1| = {worst_norm:.3e}"));
    out.check(
        "representations_agree",
        worst_repr <= 1e-12,
        format!("worst wrapped-Gaussian vs Fourier gap for t ≥ 0.5: {worst_repr:.3e}"),
    );
    if c.times.contains(&1.0) {
        let v = kernel_density(0.0, 1.0)?;
        out.check("reference_value", (v - REFERENCE_AT_ONE).abs() <= 5e-8, format!("K_1(0) = {v:.10}"));
    }
    Ok(out)
}
