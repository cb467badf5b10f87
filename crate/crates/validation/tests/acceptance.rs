//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N PASS|FAIL` line straight to stderr so it survives capture.

use std::io::Write;

use rand::Rng;
use rotor_gibbs::circle_kernel::{effective_field, fourier_density, kernel_density, wrapped_gaussian_density};
use rotor_gibbs::gibbs_sampler::{exact_small_volume, mean_stderr, run_chain_with, GibbsModel, SamplerConfig};
use rotor_gibbs::quadrature::integrate_circle;
use rotor_gibbs::rng::stream;
use rotor_gibbs::rotor_model::{FieldSpec, XyParams};
use rotor_gibbs::TAU;
use rotor_gibbs_harness::{compute, ExperimentConfig, ExperimentKind, Outcome};

fn report(n: u32, title: &str, passed: bool, detail: &str) {
    let line = format!("criterion {n:>2} {} {title}: {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(passed, "criterion {n} ({title}) failed: {detail}");
}

/// Runs an experiment at its default (criterion-sized) configuration and
/// reports its checks as one criterion.
fn experiment_criterion(n: u32, title: &str, kind: ExperimentKind) {
    let outcome = compute(&ExperimentConfig::new(kind)).expect("experiment runs");
    let passed = outcome.checks.iter().all(|c| c.passed);
    let detail: Vec<String> = outcome
        .checks
        .iter()
        .map(|c| format!("[{} {}] {}", if c.passed { "ok" } else { "FAILED" }, c.name, c.detail))
        .collect();
    report(n, title, passed, &detail.join(" "));
}

#[test]
fn criterion_01_kernel_normalization() {
    let worst = [0.05, 0.5, 1.0, 5.0, 20.0]
        .iter()
        .map(|&t| (integrate_circle(|y| kernel_density(y, t).unwrap(), 256) - 1.0).abs())
        .fold(0.0, f64::max);
    report(1, "kernel normalization", worst <= 1e-10, &format!("worst |∫K_t − 1| = {worst:.2e} (≤ 1e-10)"));
}

#[test]
fn criterion_02_representation_agreement() {
    let mut rng = stream(2, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = TAU * rng.random::<f64>();
        let t = 0.5 + 9.5 * rng.random::<f64>();
        worst = worst.max((wrapped_gaussian_density(d, t).unwrap() - fourier_density(d, t).unwrap()).abs());
    }
    report(2, "representation agreement", worst <= 1e-12, &format!("worst gap {worst:.2e} on 10³ draws (≤ 1e-12)"));
}

#[test]
fn criterion_03_chapman_kolmogorov() {
    let (x, y) = (0.4, 2.3);
    let mut worst = 0.0f64;
    for s in [0.3, 1.0, 2.0] {
        for t in [0.3, 1.0, 2.0] {
            let conv = integrate_circle(|z| kernel_density(x - z, s).unwrap() * kernel_density(z - y, t).unwrap(), 256);
            worst = worst.max((conv - kernel_density(x - y, s + t).unwrap()).abs());
        }
    }
    report(3, "Chapman–Kolmogorov", worst <= 1e-8, &format!("worst gap {worst:.2e} (≤ 1e-8)"));
}

#[test]
fn criterion_04_effective_field_expansion() {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [1.0, 2.0, 3.0, 5.0] {
        let h = effective_field(t).unwrap();
        let sup = (0..1000)
            .map(|k| {
                let d = TAU * k as f64 / 1000.0;
                (TAU * kernel_density(d, t).unwrap() - 1.0 - h * d.cos()).abs()
            })
            .fold(0.0, f64::max);
        let bound = 2.1 * (-4.0 * t).exp();
        ok &= sup <= bound;
        parts.push(format!("t={t}: {:.3}·e^(-4t)", sup / (-4.0 * t).exp()));
    }
    report(4, "effective-field expansion", ok, &format!("{} (≤ 2.1·e^(-4t))", parts.join(", ")));
}

#[test]
fn criterion_05_ground_states() {
    experiment_criterion(5, "ground states and stationary labels", ExperimentKind::GroundstateScan);
}

#[test]
fn criterion_06_dobrushin() {
    experiment_criterion(6, "Dobrushin threshold", ExperimentKind::Dobrushin);
}

#[test]
fn criterion_07_girsanov_martingale() {
    experiment_criterion(7, "Girsanov martingale and pathwise bound", ExperimentKind::GirsanovCheck);
}

#[test]
fn criterion_08_sampler_correctness() {
    let mut ok = true;
    let mut worst = 0.0f64;
    for (k, (bj, field)) in [(0.5, false), (2.0, false), (0.5, true), (2.0, true)].into_iter().enumerate() {
        let h = effective_field(1.0).unwrap();
        let fields = field.then(|| FieldSpec::new(vec![0.0, std::f64::consts::PI], vec![h, h]).unwrap());
        let model = GibbsModel::chain(2, XyParams::new(bj, 1.0).unwrap(), fields).unwrap();
        let exact = exact_small_volume(&model, None, 64).unwrap();
        let expected = [exact.sin[0], exact.sin[1], exact.cos[0], exact.cos[1], exact.cos_pair[0][1]];
        let cfg = SamplerConfig { sweeps: 201_000, burn_in: 1_000, proposal_width: 1.0, seed: 80 + k as u64, thin: 1 };
        let mut obs: Vec<[f64; 5]> = Vec::new();
        run_chain_with(&[0.3, 2.0], &model, &cfg, false, |_, x| {
            obs.push([x[0].sin(), x[1].sin(), x[0].cos(), x[1].cos(), (x[0] - x[1]).cos()])
        })
        .unwrap();
        for (j, e) in expected.iter().enumerate() {
            let v: Vec<f64> = obs.iter().map(|o| o[j]).collect();
            let (m, se) = mean_stderr(&v, 50);
            let z = (m - e).abs() / se;
            worst = worst.max(z);
            ok &= z <= 3.0;
        }
    }
    report(8, "sampler vs two-site quadrature", ok, &format!("worst deviation {worst:.2} stderr over 20 observables (≤ 3)"));
}

#[test]
fn criterion_09_chessboard() {
    experiment_criterion(9, "chessboard estimate", ExperimentKind::Chessboard);
}

#[test]
fn criterion_10_metastability() {
    experiment_criterion(10, "metastability and symmetry", ExperimentKind::Metastability);
}

#[test]
fn criterion_11_percolation() {
    experiment_criterion(11, "percolation signature", ExperimentKind::PercolationScan);
}

#[test]
fn criterion_12_bad_configuration_probe() {
    experiment_criterion(12, "bad-configuration probe", ExperimentKind::Badprobe);
}

#[test]
fn criterion_13_polymer_oracle() {
    experiment_criterion(13, "polymer expansion oracle", ExperimentKind::PolymerCheck);
}

/// Reduced configurations: determinism does not depend on run length.
fn small_config(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.seed = 1_414;
    c.girsanov_check.paths = 500;
    c.metastability.sweeps = 1_500;
    c.metastability.burn_in = 500;
    c.metastability.side = 8;
    c.metastability.replicas = 2;
    c.percolation_scan.sweeps = 1_500;
    c.percolation_scan.burn_in = 500;
    c.percolation_scan.side = 8;
    c.badprobe.sweeps = 1_000;
    c.badprobe.burn_in = 200;
    c.badprobe.sides = vec![4, 6];
    c.chessboard.sets = 3;
    c.chessboard.n_grid = 8;
    c
}

fn csv_bytes(o: &Outcome) -> Vec<(String, Vec<u8>)> {
    o.files.iter().filter(|f| f.name.ends_with(".csv")).map(|f| (f.name.clone(), f.contents.clone())).collect()
}

#[test]
fn criterion_14_determinism() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut differing = Vec::new();
    let mut files = 0;
    for kind in ExperimentKind::ALL {
        let cfg = small_config(kind);
        let a = csv_bytes(&one.install(|| compute(&cfg)).unwrap());
        let b = csv_bytes(&four.install(|| compute(&cfg)).unwrap());
        files += a.len();
        if a.is_empty() || a != b {
            differing.push(kind.to_string());
        }
    }
    report(
        14,
        "determinism",
        differing.is_empty(),
        &format!("{files} CSV files from 9 experiments byte-identical across 1- and 4-thread runs; differing: {differing:?}"),
    );
}
