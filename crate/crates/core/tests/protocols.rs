use icausal::branch::standard_mass_basis;
use icausal::protocols::*;
use icausal::qcore::random::Sampler;
use icausal::qcore::{trace_distance, DensityState, KrausChannel, PureState, Unitary, C64};

const TOL: f64 = 1e-10;

fn correction_of(res: &ProtocolResult, charlie: &str, sender: &str) -> String {
    res.branches
        .iter()
        .find(|b| b.outcomes == [charlie, sender])
        .and_then(|b| b.correction.clone())
        .unwrap()
}

#[test]
fn two_ics_table_entries() {
    let input = Sampler::new(1).state(&[2, 3]);
    let res = teleport_2ics(&input).unwrap();
    assert_eq!(correction_of(&res, "+", "0"), "sigma_x");
    assert_eq!(correction_of(&res, "+", "1"), "I");
    assert_eq!(correction_of(&res, "-", "0"), "i*sigma_y");
    assert_eq!(correction_of(&res, "-", "1"), "sigma_z");
    assert!(res.passes(TOL));
    assert!(res.max_probability_deviation(0.25) < TOL);
}

#[test]
fn two_ics_product_input() {
    let xi = Sampler::new(2).state(&[5]);
    let input = PureState::ket(2, 0).unwrap().tensor(&xi);
    let res = teleport_2ics(&input).unwrap();
    assert_eq!(res.branches.len(), 4);
    assert!(res.min_branch_fidelity > 1.0 - TOL);
}

#[test]
fn two_ics_random_inputs() {
    let mut s = Sampler::new(3);
    for (i, d) in [2, 3, 5, 8].iter().cycle().take(200).enumerate() {
        let input = s.state(&[2, *d]);
        let res = teleport_2ics(&input).unwrap();
        assert!(res.min_branch_fidelity >= 1.0 - TOL, "input {i}");
        assert!(res.max_probability_deviation(0.25) < TOL);
    }
}

#[test]
fn backteleport_restores_and_resets() {
    let input = Sampler::new(4).state(&[2, 3]);
    let res = backteleport_2ics(&input).unwrap();
    assert!(res.passes(TOL));
    let first = &res.branches[0].transcript;
    assert_eq!(first[0].action, "reset A to |0>");
    assert_eq!(first[1].action, "reset mass to |+>");
}

#[test]
fn round_trip_has_sixteen_exact_paths() {
    let mut s = Sampler::new(5);
    for _ in 0..20 {
        let res = round_trip(2, &s.state(&[2, 3])).unwrap();
        assert_eq!(res.branches.len(), 16);
        assert!(res.passes(TOL));
        assert!(res.max_probability_deviation(1.0 / 16.0) < TOL);
    }
}

#[test]
fn three_and_four_ics_both_directions() {
    let mut s = Sampler::new(6);
    for m in [3, 4] {
        for dir in [Direction::Forward, Direction::Backward] {
            for d in [m, 5] {
                let res = teleport(m, &s.state(&[m, d]), dir).unwrap();
                assert_eq!(res.branches.len(), m * m);
                assert!(res.passes(TOL), "m={m} {dir:?}: {}", res.min_branch_fidelity);
                assert!(res.max_probability_deviation(1.0 / (m * m) as f64) < TOL);
            }
        }
    }
}

#[test]
fn three_and_four_ics_table_names() {
    let input = Sampler::new(7).state(&[3, 3]);
    let f3 = teleport_3ics(&input, Direction::Forward).unwrap();
    assert_eq!(correction_of(&f3, "a", "0"), "V1");
    assert_eq!(correction_of(&f3, "b", "1"), "V2*Omega1");
    assert_eq!(correction_of(&f3, "c", "2"), "V3*Omega2");
    assert_eq!(correction_of(&teleport_3ics(&input, Direction::Backward).unwrap(), "a", "0"), "V3");
    let input = Sampler::new(8).state(&[4, 4]);
    let f4 = teleport_4ics(&input, Direction::Forward).unwrap();
    assert_eq!(correction_of(&f4, "a", "0"), "V1");
    assert_eq!(correction_of(&f4, "b", "3"), "V4*Omega1");
    assert_eq!(correction_of(&f4, "d", "2"), "V3*Omega3");
    assert_eq!(correction_of(&teleport_4ics(&input, Direction::Backward).unwrap(), "c", "1"), "W2*Omega2");
}

#[test]
fn teleport_rejects_wrong_register() {
    assert!(teleport_2ics(&Sampler::new(9).state(&[3, 2])).is_err());
    assert!(teleport(3, &Sampler::new(9).state(&[2, 2]), Direction::Forward).is_err());
}

#[test]
fn channel_identity_and_swap() {
    let mut s = Sampler::new(10);
    let rho = s.density(&[2, 3], 3);
    let run = implement_nonlocal_channel(&rho, &KrausChannel::identity(6)).unwrap();
    assert!(trace_distance(&run.output, &rho).unwrap() < 1e-12);
    assert!((run.success_probability - 1.0).abs() < 1e-12);

    let swap = Unitary::permutation(&[0, 2, 1, 3]).unwrap();
    let input = PureState::basis(vec![2, 2], &[0, 1]).unwrap().to_density();
    let run = implement_nonlocal_channel(&input, &KrausChannel::from_unitary(&swap)).unwrap();
    let expected = PureState::basis(vec![2, 2], &[1, 0]).unwrap().to_density();
    assert!(trace_distance(&run.output, &expected).unwrap() < 1e-12);
}

#[test]
fn random_channels_match_direct_application() {
    let mut s = Sampler::new(11);
    for _ in 0..10 {
        let rho = s.density(&[2, 3], 2);
        let ch = s.channel(6, 3);
        let run = implement_nonlocal_channel(&rho, &ch).unwrap();
        let direct = DensityState::new(vec![2, 3], ch.apply(rho.matrix()).unwrap()).unwrap();
        assert!(trace_distance(&run.output, &direct).unwrap() < TOL);
        assert!(run.min_path_fidelity > 1.0 - TOL);
    }
}

#[test]
fn trace_decreasing_channel_reports_success_probability() {
    let half = icausal::qcore::CMatrix::identity(4, 4) * C64::new(0.5f64.sqrt(), 0.0);
    let ch = KrausChannel::new(vec![half]).unwrap();
    assert!(!ch.is_trace_preserving());
    let rho = Sampler::new(12).density(&[2, 2], 2);
    let run = implement_nonlocal_channel(&rho, &ch).unwrap();
    assert!((run.success_probability - 0.5).abs() < 1e-12);
    assert!(trace_distance(&run.output, &rho).unwrap() < 1e-12);
}

#[test]
fn bell_discrimination_table() {
    let mut rows = std::collections::BTreeSet::new();
    for secret in 1..=4 {
        let r = discriminate_bell(secret).unwrap();
        assert_eq!(r.identified, Some(secret));
        assert!((r.success_probability() - 1.0).abs() < 1e-12);
        let expected_sign = if secret % 2 == 1 { "+" } else { "-" };
        assert_eq!(r.charlie.as_deref(), Some(expected_sign));
        for b in &r.branches {
            rows.insert((b.charlie.clone(), b.alice, b.bob));
        }
    }
    assert_eq!(rows.len(), 8);
    let b1 = discriminate_bell(1).unwrap();
    let pairs: Vec<_> = b1.branches.iter().map(|b| (b.alice, b.bob)).collect();
    assert_eq!(pairs, [(0, 1), (1, 0)]);
    let b4 = discriminate_bell(4).unwrap();
    let pairs: Vec<_> = b4.branches.iter().map(|b| (b.alice, b.bob)).collect();
    assert_eq!(pairs, [(0, 0), (1, 1)]);
    assert!(discriminate_bell(5).is_err());
}

#[test]
fn entanglement_generation() {
    let zero = PureState::ket(2, 0).unwrap();
    let out = entangle_2ics(&Unitary::identity(2), &Unitary::pauli_x(), &zero, &zero).unwrap();
    for b in &out {
        assert!((b.probability - 0.5).abs() < 1e-12);
        assert!((b.entropy.unwrap() - 1.0).abs() < TOL);
    }
    let psi = Sampler::new(13).state(&[2]);
    let phi = Sampler::new(14).state(&[2]);
    let out = entangle_2ics(&Unitary::identity(2), &Unitary::identity(2), &psi, &phi).unwrap();
    assert!((out[0].probability - 1.0).abs() < 1e-12);
    assert!(out[0].entropy.unwrap().abs() < TOL);
    assert!((icausal::qcore::fidelity(out[0].state.as_ref().unwrap(), &psi.tensor(&phi)).unwrap() - 1.0).abs() < 1e-12);
    assert!(out[1].probability < 1e-12 && out[1].state.is_none());

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(vec![2], vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    let out = entangle_2ics(&Unitary::identity(2), &Unitary::pauli_z(), &plus, &plus).unwrap();
    for b in out.iter().filter(|b| b.state.is_some()) {
        let e = b.entropy.unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&e));
        let oracle = icausal::oracles::schmidt_entropy(b.state.as_ref().unwrap(), &[0]);
        assert!((e - oracle).abs() < 1e-10);
    }
}

#[test]
fn smolin_unlocking() {
    let r = unlock_smolin().unwrap();
    assert!(r.min_pt_eigenvalue >= -TOL);
    for b in &r.branches {
        assert_eq!(b.identified, Some(b.bell_index));
        assert!(b.fidelity > 1.0 - TOL);
        assert!((b.entropy - 1.0).abs() < TOL);
    }
    assert_eq!(r.branches[1].correction, "sigma_z");
    assert_eq!(r.branches[0].correction, "I");
}

#[test]
fn nlwe_default_corpus_reduction() {
    let corpus = nlwe_default_corpus().unwrap();
    assert_eq!(corpus.len(), 4);
    let r = reduce_nlwe(&corpus).unwrap();
    assert!(r.input_gram_deviation < TOL);
    assert!(r.output_gram_deviation < TOL);
    assert!((r.success_probability - 1.0).abs() < TOL);
    assert!(r.min_branch_fidelity > 1.0 - TOL);
    assert_eq!(r.reduced[0].dims(), &[2, 2, 2]);
    for e in &r.bipartite_entropies {
        assert!(e.abs() < TOL);
    }
}

#[test]
fn nlwe_single_state_stays_product() {
    let s = Sampler::new(15);
    let mut s = s;
    let st = s.state(&[2]).tensor(&s.state(&[2])).tensor(&s.state(&[3]));
    let r = reduce_nlwe(&[st]).unwrap();
    let red = &r.reduced[0];
    for part in 0..3 {
        assert!(icausal::qcore::entanglement_entropy(red, &[part]).unwrap() < TOL);
    }
}

#[test]
fn nlwe_rejects_bad_corpora() {
    let corpus = nlwe_default_corpus().unwrap();
    assert!(reduce_nlwe(&[corpus[0].clone(), corpus[0].clone()]).is_err());
    let ghz = PureState::normalized(
        vec![2, 2, 2],
        (0..8).map(|i| C64::new(if i == 0 || i == 7 { 1.0 } else { 0.0 }, 0.0)).collect(),
    )
    .unwrap();
    assert!(reduce_nlwe(&[ghz]).is_err());
}

#[test]
fn search_recovers_tables() {
    for m in [2, 3, 4] {
        let found = search_corrections(m, &ics_unitaries(m).unwrap(), &standard_mass_basis(m).unwrap(), 3).unwrap();
        let table = found.table().expect("table found");
        let reference = CorrectionTable::standard(m, Direction::Forward).unwrap();
        assert!((table.min_phase_overlap(&reference) - 1.0).abs() < TOL, "m={m}");
    }
}

#[test]
fn search_reports_degenerate_strategy() {
    let ids = vec![Unitary::identity(2), Unitary::identity(2)];
    match search_corrections(2, &ids, &standard_mass_basis(2).unwrap(), 2).unwrap() {
        SearchOutcome::NotFound { charlie, vacuous, .. } => {
            assert_eq!(charlie, 1);
            assert!(vacuous);
        }
        other => panic!("unexpected {other:?}"),
    }
}
