use proptest::prelude::*;
use rotor_gibbs::conditioned_model::*;
use rotor_gibbs::dual_percolation::*;
use rotor_gibbs::rotor_model::*;
use rotor_gibbs::TAU;

fn config_strategy(side: usize) -> impl Strategy<Value = SpinConfig> {
    prop::collection::vec(0.0..TAU, side * side)
        .prop_map(move |v| SpinConfig::from_angles(LatticeShape::new(side).unwrap(), v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rotation_invariance_without_fields(c in config_strategy(4), shift in -10.0f64..10.0, bj in 0.0f64..5.0) {
        let p = XyParams::new(bj, 1.0).unwrap();
        let a = energy_total(&c, &p, None).unwrap();
        let b = energy_total(&c.rotate(shift), &p, None).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn reflection_invariance_with_up_down_fields(c in config_strategy(4), bj in 0.0f64..5.0, t in 0.5f64..5.0) {
        let p = ConditionedParams::new(bj.max(1e-3), 1.0, t).unwrap();
        let y = make_yspec(4).unwrap();
        for form in [HamiltonianForm::Exact, HamiltonianForm::FieldApprox] {
            let a = conditioned_hamiltonian(&c, &y, &p, form).unwrap();
            let b = conditioned_hamiltonian(&c.reflect(), &y, &p, form).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn energy_delta_is_consistent(c in config_strategy(4), site in 0usize..16, angle in 0.0f64..TAU, h in -2.0f64..2.0) {
        let p = XyParams::new(1.3, 0.8).unwrap();
        let f = FieldSpec::aligned_to(&make_yspec(4).unwrap(), h);
        let mut after = c.clone();
        after.set(site, angle);
        let direct = energy_total(&after, &p, Some(&f)).unwrap() - energy_total(&c, &p, Some(&f)).unwrap();
        prop_assert!((energy_delta(&c, site, angle, &p, Some(&f)).unwrap() - direct).abs() <= 1e-10);
    }

    #[test]
    fn plaquettes_partition_the_energy(c in config_strategy(6), h in -1.0f64..1.0) {
        let p = XyParams::new(0.9, 1.1).unwrap();
        let f = FieldSpec::aligned_to(&make_yspec(6).unwrap(), h);
        let sum: f64 = (0..36).map(|a| plaquette_energy(&c, a, &p, Some(&f)).unwrap()).sum();
        prop_assert!((sum - energy_total(&c, &p, Some(&f)).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn low_energy_sets_are_nested(c in config_strategy(6), d1 in 0.0f64..20.0, d2 in 0.0f64..20.0) {
        let p = ConditionedParams::new(5.0, 1.0, 2.0).unwrap();
        let m = ground_plaquette_energy(&p).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = build_low_energy_graph(&c, &p, m, lo).unwrap();
        let b = build_low_energy_graph(&c, &p, m, hi).unwrap();
        prop_assert!(a.membership().iter().zip(b.membership()).all(|(x, y)| !x || *y));
        let r = connected_clusters(&a);
        prop_assert_eq!(r.sizes.iter().sum::<usize>(), a.n_vertices());
        prop_assert!((0.0..=1.0).contains(&r.largest_fraction));
        prop_assert_eq!(r, connected_clusters(&a));
    }

    #[test]
    fn tilt_decreases_in_coupling_and_time(bj in 0.2f64..50.0, t in 1.0f64..10.0) {
        let e = |bj: f64, t: f64| ConditionedParams::new(bj, 1.0, t).unwrap().epsilon().unwrap();
        prop_assert!(e(bj * 1.01, t) < e(bj, t));
        prop_assert!(e(bj, t + 0.01) < e(bj, t));
    }

    #[test]
    fn forms_stay_close(c in config_strategy(4), d in config_strategy(4), t in 1.0f64..10.0) {
        let p = ConditionedParams::new(0.8, 1.0, t).unwrap();
        let a = conditioned_hamiltonian(&c, &d, &p, HamiltonianForm::Exact).unwrap();
        let b = conditioned_hamiltonian(&c, &d, &p, HamiltonianForm::FieldApprox).unwrap();
        prop_assert!((a - b).abs() / 16.0 <= 3.0 * (-2.0 * t).exp());
    }
}

#[test]
fn dobrushin_is_linear_and_size_free() {
    for k in 0..50 {
        let bj = 0.01 * k as f64;
        let r = dobrushin_sum(&XyParams::new(bj, 1.0).unwrap(), 2);
        assert!((r.sum - 8.0 * bj).abs() < 1e-12);
        assert_eq!(r.satisfied, 8.0 * bj < 2.0);
    }
    assert!(!dobrushin_sum(&XyParams::new(0.25, 1.0).unwrap(), 2).satisfied);
    assert!(dobrushin_sum(&XyParams::new(0.2, 1.0).unwrap(), 2).satisfied);
}

#[test]
fn ground_state_energies_match() {
    for (bj, t) in [(0.5, 1.0), (1.0, 2.0), (20.0, 4.0)] {
        let p = ConditionedParams::new(bj, 1.0, t).unwrap();
        let shape = LatticeShape::new(8).unwrap();
        let gs = ground_states(&p, shape).unwrap();
        let y = make_yspec(8).unwrap();
        for form in [HamiltonianForm::Exact, HamiltonianForm::FieldApprox] {
            let a = conditioned_hamiltonian(&gs.x_ri, &y, &p, form).unwrap();
            let b = conditioned_hamiltonian(&gs.x_le, &y, &p, form).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
