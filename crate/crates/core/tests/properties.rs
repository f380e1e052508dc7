use icausal::branch::{
    apply_plan, measure_mass, run_superposed, simulate_all, standard_mass_basis, MassRegister, SignalingStrategy,
    UnitaryRegistry,
};
use icausal::oracles::{controlled_unitary, light_time_quadrature, mat_vec, max_abs_diff_vec, plan_matrix, product_vector};
use icausal::protocols::{ics_unitaries, teleport, Direction};
use icausal::qcore::random::Sampler;
use icausal::qcore::{entanglement_entropy, measure_exhaustive, Basis, DensityState, PureState};
use icausal::spacetime::{
    classify_order, definite_future_threshold, light_coordinate_time, tau_star_threshold, Clock, EventSpec, Relation,
    SpacetimeConfig,
};
use proptest::prelude::*;

fn clock() -> impl Strategy<Value = Clock> {
    prop_oneof![Just(Clock::A), Just(Clock::B)]
}

fn config() -> impl Strategy<Value = SpacetimeConfig> {
    (0.05f64..3.0, 1.01f64..8.0, 0.01f64..20.0)
        .prop_map(|(m, k, h)| SpacetimeConfig::geometric(m, 2.0 * m * k, h).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_survives_local_unitaries(seed in any::<u64>(), d in 2usize..5) {
        let mut s = Sampler::new(seed);
        let st = s.state(&[2, d, 2]);
        let out = st.apply(&s.unitary(d), &[1]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn measurement_probabilities_sum_to_one(seed in any::<u64>(), target in 0usize..3) {
        let mut s = Sampler::new(seed);
        let st = s.state(&[2, 3, 2]);
        let d = st.dims()[target];
        let u = s.unitary(d);
        let basis = Basis::new((0..d).map(|i| u.matrix().column(i).iter().copied().collect()).collect()).unwrap();
        let total: f64 = measure_exhaustive(&st, target, &basis).unwrap().iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>(), rank in 1usize..6) {
        let rho: DensityState = Sampler::new(seed).density(&[2, 3], rank);
        for keep in [vec![0], vec![1], vec![0, 1]] {
            prop_assert!((rho.partial_trace(&keep).unwrap().trace() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_is_symmetric_across_the_cut(seed in any::<u64>()) {
        let st = Sampler::new(seed).state(&[2, 3, 2]);
        let a = entanglement_entropy(&st, &[0, 2]).unwrap();
        let b = entanglement_entropy(&st, &[1]).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!(a >= -1e-12 && a <= 3f64.log2() + 1e-10);
    }

    #[test]
    fn superposition_matches_controlled_unitary(seed in any::<u64>(), m in 2usize..=4, d in 2usize..=4) {
        let mut s = Sampler::new(seed);
        let dims = [2, d, 2];
        let reg = UnitaryRegistry::indexed((0..m).map(|_| s.unitary(2)).collect());
        let strategy = SignalingStrategy::ladder(m, reg, vec![0], vec![2]).unwrap();
        let input = s.state(&dims);
        let mass = MassRegister::uniform(m).unwrap();
        let joint = run_superposed(&mass, &strategy, &input).unwrap();
        let blocks: Vec<_> = simulate_all(&strategy).unwrap().iter().map(|p| plan_matrix(p, strategy.registry(), &dims).unwrap()).collect();
        let oracle = mat_vec(&controlled_unitary(&blocks), &product_vector(mass.amps(), input.amps()));
        prop_assert!(max_abs_diff_vec(joint.amps(), &oracle) < 1e-12);
    }

    #[test]
    fn branches_keep_cut_entropy(seed in any::<u64>(), m in 2usize..=4) {
        let mut s = Sampler::new(seed);
        let reg = UnitaryRegistry::indexed((0..m).map(|_| s.unitary(3)).collect());
        let strategy = SignalingStrategy::ladder(m, reg, vec![0], vec![2]).unwrap();
        let input = s.state(&[3, 2, 3]);
        let before = entanglement_entropy(&input, &[0]).unwrap();
        for plan in simulate_all(&strategy).unwrap() {
            let after = apply_plan(&plan, strategy.registry(), &input).unwrap();
            prop_assert!((entanglement_entropy(&after, &[0]).unwrap() - before).abs() < 1e-10);
        }
    }

    #[test]
    fn mass_outcomes_are_uniform_for_teleportation(seed in any::<u64>(), m in 2usize..=4) {
        let input = Sampler::new(seed).state(&[m, 2]).tensor(&PureState::ket(m, 0).unwrap());
        let reg = UnitaryRegistry::indexed(ics_unitaries(m).unwrap());
        let strategy = SignalingStrategy::ladder(m, reg, vec![0], vec![2]).unwrap();
        let joint = run_superposed(&MassRegister::uniform(m).unwrap(), &strategy, &input).unwrap();
        for o in measure_mass(&joint, &standard_mass_basis(m).unwrap()).unwrap() {
            prop_assert!((o.probability - 1.0 / m as f64).abs() < 1e-10);
            for a in &o.mass_state {
                prop_assert!((a.norm() - 1.0 / (m as f64).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn teleportation_is_exact(seed in any::<u64>(), m in 2usize..=4, d in 2usize..=5, back in any::<bool>()) {
        let dir = if back { Direction::Backward } else { Direction::Forward };
        let res = teleport(m, &Sampler::new(seed).state(&[m, d]), dir).unwrap();
        prop_assert!(res.min_branch_fidelity >= 1.0 - 1e-10);
        prop_assert!(res.max_probability_deviation(1.0 / (m * m) as f64) < 1e-10);
    }

    #[test]
    fn light_time_matches_quadrature(cfg in config()) {
        let closed = light_coordinate_time(cfg.r(), cfg.r() + cfg.h(), &cfg).unwrap();
        let quad = light_time_quadrature(cfg.r() + cfg.h(), cfg.r(), &cfg);
        prop_assert!((closed - quad).abs() / closed < 1e-9);
        prop_assert_eq!(closed, light_coordinate_time(cfg.r() + cfg.h(), cfg.r(), &cfg).unwrap());
    }

    #[test]
    fn classification_is_antisymmetric(cfg in config(), c1 in clock(), c2 in clock(), near in clock(),
                                       t1 in 0.0f64..200.0, t2 in 0.0f64..200.0) {
        let e1 = EventSpec::new(c1, t1).unwrap();
        let e2 = EventSpec::new(c2, t2).unwrap();
        let a = classify_order(e1, e2, near, &cfg).unwrap();
        let b = classify_order(e2, e1, near, &cfg).unwrap();
        prop_assert_eq!(b.relation, a.relation.swapped());
        match a.relation {
            Relation::Spacelike => {
                prop_assert_eq!(a.margin, b.margin);
                prop_assert!(a.margin < 0.0);
            }
            Relation::XBeforeY => prop_assert!(a.margin >= -1e-9 && (a.margin + b.margin).abs() < 1e-9),
            Relation::YBeforeX => prop_assert!(a.margin <= 1e-9 && (a.margin + b.margin).abs() < 1e-9),
        }
    }

    #[test]
    fn threshold_separates_causal_from_spacelike(cfg in config()) {
        let t = tau_star_threshold(&cfg).unwrap();
        let at = |tau: f64| classify_order(EventSpec::on_a(tau).unwrap(), EventSpec::on_b(tau).unwrap(), Clock::A, &cfg).unwrap();
        prop_assert_eq!(at(t * (1.0 + 1e-6) + 1e-6).relation, Relation::YBeforeX);
        prop_assert_eq!(at(t * (1.0 - 1e-6) - 1e-6).relation, Relation::Spacelike);
    }

    #[test]
    fn definite_future_is_definite(cfg in config(), scale in 1.0f64..4.0) {
        let tau = tau_star_threshold(&cfg).unwrap() * scale;
        let tilde = definite_future_threshold(tau, &cfg).unwrap();
        prop_assert!(tilde > tau);
        let x = EventSpec::on_a(tau).unwrap();
        for near in [Clock::A, Clock::B] {
            let v = classify_order(x, EventSpec::on_b(tilde + 1e-6).unwrap(), near, &cfg).unwrap();
            prop_assert_eq!(v.relation, Relation::XBeforeY);
        }
    }
}

#[test]
fn threshold_decreases_with_mass() {
    let mut prev = f64::INFINITY;
    for k in 1..=40 {
        let cfg = SpacetimeConfig::geometric(0.05 * k as f64, 10.0, 1.0).unwrap();
        let t = tau_star_threshold(&cfg).unwrap();
        assert!(t < prev, "not decreasing at M = {}", 0.05 * k as f64);
        prev = t;
    }
}
