use std::f64::consts::PI;

use rayon::prelude::*;
use rotor_gibbs::conditioned_model::*;
use rotor_gibbs::dual_percolation::*;
use rotor_gibbs::gibbs_sampler::*;
use rotor_gibbs::quadrature::circle_midpoints;
use rotor_gibbs::rng::stream;
use rotor_gibbs::rotor_model::*;
use rotor_gibbs::TAU;

fn sampler(sweeps: usize, burn_in: usize, seed: u64) -> SamplerConfig {
    SamplerConfig { sweeps, burn_in, proposal_width: 1.0, seed, thin: 1 }
}

#[test]
fn infinite_temperature_marginals_are_uniform() {
    let shape = LatticeShape::new(4).unwrap();
    let model = GibbsModel::torus(shape, XyParams::new(0.0, 1.0).unwrap(), None).unwrap();
    // width π makes every sweep an exact independent redraw
    let cfg = SamplerConfig { proposal_width: PI, ..sampler(100_000, 0, 1) };
    let mut xs = Vec::new();
    let (series, _) = run_chain_with(&vec![0.0; 16], &model, &cfg, false, |_, x| xs.push(x[5])).unwrap();
    assert!(series.acc.iter().all(|&a| a == 1.0));
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x / TAU - i as f64 / n).abs().max(((i + 1) as f64 / n - x / TAU).abs()))
        .fold(0.0, f64::max);
    assert!(d < 1.628 / n.sqrt(), "KS {d}");
}

fn two_site_check(bj: f64, field: Option<f64>, seed: u64) {
    let fields = field.map(|h| FieldSpec::new(vec![0.0, PI], vec![h, h]).unwrap());
    let model = GibbsModel::chain(2, XyParams::new(bj, 1.0).unwrap(), fields).unwrap();
    let exact = exact_small_volume(&model, None, 64).unwrap();
    let mut obs: Vec<[f64; 5]> = Vec::new();
    run_chain_with(&[0.3, 2.0], &model, &sampler(201_000, 1_000, seed), false, |_, x| {
        obs.push([x[0].sin(), x[1].sin(), x[0].cos(), x[1].cos(), (x[0] - x[1]).cos()])
    })
    .unwrap();
    let expected = [exact.sin[0], exact.sin[1], exact.cos[0], exact.cos[1], exact.cos_pair[0][1]];
    for k in 0..5 {
        let v: Vec<f64> = obs.iter().map(|o| o[k]).collect();
        let (m, e) = mean_stderr(&v, 50);
        assert!((m - expected[k]).abs() <= 3.0 * e, "βJ={bj} field={field:?} obs {k}: {m} ± {e} vs {}", expected[k]);
    }
}

#[test]
fn two_site_chain_matches_quadrature() {
    two_site_check(0.5, None, 11);
    two_site_check(2.0, None, 12);
    two_site_check(0.5, Some(effective_field_at(1.0)), 13);
    two_site_check(2.0, Some(effective_field_at(1.0)), 14);
}

fn effective_field_at(t: f64) -> f64 {
    rotor_gibbs::circle_kernel::effective_field(t).unwrap()
}

#[test]
fn partition_function_against_half_resolution_riemann_sum() {
    let p = ConditionedParams::new(1.5, 1.0, 1.0).unwrap();
    let model = GibbsModel::conditioned(LatticeShape::new(2).unwrap(), &p).unwrap();
    let z = exact_small_volume(&model, None, 32).unwrap().z;
    // independent left-endpoint sum on a 16-point grid
    let n = 16;
    let nodes: Vec<f64> = (0..n).map(|k| k as f64 * TAU / n as f64).collect();
    let f = yspec_fields(LatticeShape::new(2).unwrap(), &p);
    let shape = LatticeShape::new(2).unwrap();
    let mut acc = 0.0;
    for a in &nodes {
        for b in &nodes {
            for c in &nodes {
                for d in &nodes {
                    let cfg = SpinConfig::from_angles(shape, vec![*a, *b, *c, *d]).unwrap();
                    acc += (-energy_total(&cfg, &p.xy(), Some(&f)).unwrap()).exp();
                }
            }
        }
    }
    let riemann = acc / (n as f64).powi(4);
    assert!((z - riemann).abs() <= 1e-6 * z, "{z} vs {riemann}");
    assert_eq!(circle_midpoints(4).len(), 4);
}

#[test]
fn high_temperature_chain_is_symmetric() {
    let shape = LatticeShape::new(16).unwrap();
    let p = ConditionedParams::new(0.2, 1.0, 2.0).unwrap();
    let model = GibbsModel::conditioned(shape, &p).unwrap();
    let gs = ground_states(&p, shape).unwrap();
    let s = run_chain(gs.x_ri.angles(), &model, &sampler(20_000, 500, 3)).unwrap();
    let (m, e) = mean_stderr(&s.m_lr, 20);
    assert!(m.abs() < 0.05 && m.abs() <= 3.0 * e + 0.01, "{m} ± {e}");
}

#[test]
fn chessboard_holds_for_random_invariant_functions() {
    let shape = LatticeShape::new(2).unwrap();
    let mut rng = stream(21, 0);
    for bj in [0.5, 5.0] {
        let p = ConditionedParams::new(bj, 1.0, 2.0).unwrap();
        let model = GibbsModel::conditioned(shape, &p).unwrap();
        for _ in 0..20 {
            let polys: Vec<InvariantTrigPolynomial> = (0..4).map(|_| InvariantTrigPolynomial::random(&mut rng, 6)).collect();
            let fs: Vec<Box<PlaquetteFn>> =
                polys.into_iter().map(|q| Box::new(move |c: &[f64; 4]| q.eval(c)) as Box<PlaquetteFn>).collect();
            let refs: Vec<&PlaquetteFn> = fs.iter().map(|f| f.as_ref()).collect();
            let r = chessboard_check(&refs, &model, 16).unwrap();
            assert!(r.holds, "βJ={bj}: {} > {}", r.lhs, r.rhs);
        }
    }
}

#[test]
fn random_configurations_rarely_reach_low_energy() {
    let shape = LatticeShape::new(16).unwrap();
    let p = ConditionedParams::new(20.0, 1.0, 2.0).unwrap();
    let m = ground_plaquette_energy(&p).unwrap();
    let mut rng = stream(30, 0);
    let passing = (0..100)
        .filter(|_| {
            let c = SpinConfig::random(shape, &mut rng);
            let g = build_low_energy_graph(&c, &p, m, 2.0).unwrap();
            (g.n_vertices() as f64) / 256.0 < 0.1
        })
        .count();
    assert!(passing >= 99);
}

#[test]
fn low_temperature_splitting_is_stable() {
    let shape = LatticeShape::new(8).unwrap();
    let p = ConditionedParams::new(20.0, 1.0, 2.0).unwrap();
    let gs = ground_states(&p, shape).unwrap();
    let model = GibbsModel::conditioned(shape, &p).unwrap();
    let configs: Vec<SpinConfig> = (0..10u64)
        .into_par_iter()
        .flat_map_iter(|r| {
            let start = if r % 2 == 0 { &gs.x_ri } else { &gs.x_le };
            let mut snaps = Vec::new();
            run_chain_with(start.angles(), &model, &SamplerConfig { thin: 200, ..sampler(2_200, 200, 40 + r) }, false, |_, x| {
                snaps.push(SpinConfig::from_angles(shape, x.to_vec()).unwrap())
            })
            .unwrap();
            snaps
        })
        .collect();
    assert_eq!(configs.len(), 100);
    // configurations whose spins have rotated to point almost up or down
    // limit δ* to a small value; see the notes on the soft rotation mode
    let star = stable_delta(&configs, &p, gs.m, 2.0, 200).unwrap();
    eprintln!("δ* = {star}");
    assert!(star > 0.0, "no stable δ");
    for c in &configs {
        let r = connected_clusters(&build_low_energy_graph(c, &p, gs.m, star).unwrap());
        assert!(r.orientations.iter().all(|o| *o != Orientation::Mixed));
    }
}

#[test]
fn frozen_ring_selects_the_phase() {
    let p = ConditionedParams::new(200.0, 1.0, 2.0).unwrap();
    let rows = bad_config_probe(&[8], &p, RING_PAIR, &SamplerConfig { proposal_width: 0.1, ..sampler(3_000, 500, 50) }).unwrap();
    assert!(rows[0].gap >= 1.5, "{:?}", rows[0]);
    let p = ConditionedParams::new(1.0, 1.0, 2.0).unwrap();
    let rows = bad_config_probe(&[8], &p, RING_PAIR, &sampler(20_000, 1_000, 51)).unwrap();
    let r = rows[0];
    assert!((r.mean_xi + r.mean_eta).abs() <= 3.0 * r.stderr, "{r:?}");
}
