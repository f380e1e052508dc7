//! The end-to-end verification suite.
//!
//! Each criterion draws its own seeded inputs, runs a protocol or model
//! against an independent oracle and reports a one-line summary. A criterion
//! passes when its checks hold within the tolerance and it finishes inside
//! its time budget.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::branch::{
    apply_plan, measure_mass, run_superposed, simulate_all, standard_mass_basis, MassRegister, SignalingStrategy,
    UnitaryRegistry,
};
use crate::oracles::{
    controlled_unitary, light_time_quadrature, mat_vec, max_abs_diff_vec, plan_matrix, product_vector, schmidt_entropy,
};
use crate::par::{self, Execution};
use crate::protocols::{
    discriminate_bell, entangle_2ics, ics_unitaries, implement_nonlocal_channel, nlwe_default_corpus, reduce_nlwe,
    round_trip, search_corrections, teleport, unlock_smolin, CorrectionTable, Direction, ProtocolResult,
};
use crate::qcore::random::Sampler;
use crate::qcore::{trace_distance, DensityState, KrausChannel, PureState, Unitary};
use crate::spacetime::{
    classify_order, definite_future_threshold, light_coordinate_time, tau_star_threshold, Clock, EventSpec, Relation,
    SpacetimeConfig,
};
use crate::Error;

type Check = fn(&Settings) -> Result<String, String>;

/// Tolerance and execution mode shared by all criteria.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub mode: Execution,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: crate::ASSERT_TOL, mode: Execution::best() }
    }
}

pub struct Criterion {
    pub name: &'static str,
    pub limit: Duration,
    check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: f64,
    pub limit_ms: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:<20} {:>9.1} ms / {:>6.0} ms  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed_ms,
            self.limit_ms,
            self.detail
        )
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

/// All criteria in suite order.
pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { name: "teleport_2ics", limit: secs(5), check: teleport_2ics },
        Criterion { name: "teleport_roundtrip", limit: secs(5), check: teleport_roundtrip },
        Criterion { name: "channel_universal", limit: secs(10), check: channel_universal },
        Criterion { name: "bell_discrimination", limit: secs(1), check: bell_discrimination },
        Criterion { name: "entangle_2ics", limit: secs(1), check: entangle },
        Criterion { name: "smolin_unlock", limit: secs(1), check: smolin },
        Criterion { name: "teleport_3ics", limit: secs(10), check: teleport_3ics },
        Criterion { name: "teleport_4ics", limit: secs(20), check: teleport_4ics },
        Criterion { name: "correction_search", limit: secs(30), check: correction_search },
        Criterion { name: "spacetime", limit: secs(5), check: spacetime },
        Criterion { name: "branch_engine", limit: secs(5), check: branch_engine },
        Criterion { name: "nlwe_reduction", limit: secs(1), check: nlwe },
    ]
}

/// Runs every criterion whose name starts with `filter`.
pub fn run_suite(filter: Option<&str>, settings: &Settings) -> Vec<CriterionResult> {
    criteria()
        .into_iter()
        .filter(|c| filter.is_none_or(|f| c.name.starts_with(f)))
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.check)(settings);
            let elapsed = start.elapsed();
            let in_time = elapsed <= c.limit;
            let (ok, mut detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            if !in_time {
                detail.push_str(&format!("; exceeded time budget ({:.2} s)", elapsed.as_secs_f64()));
            }
            CriterionResult {
                name: c.name.to_string(),
                passed: ok && in_time,
                detail,
                elapsed_ms: elapsed.as_secs_f64() * 1e3,
                limit_ms: c.limit.as_secs_f64() * 1e3,
            }
        })
        .collect()
}

fn err(e: Error) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Minimum fidelity and largest probability deviation over a batch of runs.
fn summarize(results: Vec<Result<ProtocolResult, Error>>, p: f64) -> Result<(f64, f64, usize), String> {
    let mut min_f = f64::INFINITY;
    let mut dev: f64 = 0.0;
    let mut branches = 0;
    for r in results {
        let r = r.map_err(err)?;
        if r.branches.iter().any(|b| b.fidelity.is_none()) {
            return Err(format!("{} produced a null branch", r.protocol));
        }
        min_f = min_f.min(r.min_branch_fidelity);
        dev = dev.max(r.max_probability_deviation(p));
        branches += r.branches.len();
    }
    Ok((min_f, dev, branches))
}

fn teleport_batch(s: &Settings, m: usize, dims: &[usize], n: usize, seed: u64, dir: Direction) -> Result<(f64, f64, usize), String> {
    let mut rng = Sampler::new(seed);
    let inputs: Vec<PureState> = (0..n).map(|i| rng.state(&[m, dims[i % dims.len()]])).collect();
    let results = par::map(s.mode, inputs, |input| teleport(m, &input, dir));
    summarize(results, 1.0 / (m * m) as f64)
}

fn teleport_2ics(s: &Settings) -> Result<String, String> {
    let (f, dev, n) = teleport_batch(s, 2, &[2, 3, 5, 8], 200, 101, Direction::Forward)?;
    ensure(n == 800, || format!("expected 800 branches, got {n}"))?;
    ensure(f >= 1.0 - s.tol && dev <= s.tol, || format!("min fidelity {f:.3e}, probability deviation {dev:.3e}"))?;
    Ok(format!("200 inputs, {n} branches, min fidelity 1-{:.1e}, |p-1/4| <= {dev:.1e}", 1.0 - f))
}

fn teleport_roundtrip(s: &Settings) -> Result<String, String> {
    let mut rng = Sampler::new(102);
    let inputs: Vec<PureState> = (0..50).map(|i| rng.state(&[2, [2, 3, 4][i % 3]])).collect();
    let results = par::map(s.mode, inputs, |input| round_trip(2, &input));
    let paths: Vec<usize> = results.iter().map(|r| r.as_ref().map_or(0, |r| r.branches.len())).collect();
    ensure(paths.iter().all(|&p| p == 16), || format!("path counts {paths:?}"))?;
    let (f, dev, n) = summarize(results, 1.0 / 16.0)?;
    ensure(f >= 1.0 - s.tol && dev <= s.tol, || format!("min fidelity {f:.3e}, probability deviation {dev:.3e}"))?;
    Ok(format!("50 inputs x 16 paths = {n}, min fidelity 1-{:.1e}", 1.0 - f))
}

fn channel_universal(s: &Settings) -> Result<String, String> {
    let mut rng = Sampler::new(103);
    let cases: Vec<(DensityState, KrausChannel)> =
        (0..50).map(|i| (rng.density(&[2, 3], 1 + i % 6), rng.channel(6, 1 + i % 4))).collect();
    let dists = par::map(s.mode, cases, |(rho, ch)| -> Result<f64, Error> {
        let run = implement_nonlocal_channel(&rho, &ch)?;
        let direct = DensityState::new(vec![2, 3], ch.apply(rho.matrix())?)?;
        trace_distance(&run.output, &direct)
    });
    let worst = dists.into_iter().collect::<Result<Vec<_>, _>>().map_err(err)?.into_iter().fold(0.0, f64::max);
    ensure(worst < s.tol, || format!("trace distance {worst:.3e}"))?;
    let swap = Unitary::permutation(&[0, 2, 1, 3]).map_err(err)?;
    let input = PureState::basis(vec![2, 2], &[0, 1]).map_err(err)?.to_density();
    let out = implement_nonlocal_channel(&input, &KrausChannel::from_unitary(&swap)).map_err(err)?;
    let expected = PureState::basis(vec![2, 2], &[1, 0]).map_err(err)?.to_density();
    let swap_dist = trace_distance(&out.output, &expected).map_err(err)?;
    ensure(swap_dist < s.tol, || format!("SWAP output off by {swap_dist:.3e}"))?;
    Ok(format!("50 channels, max trace distance {worst:.1e}; SWAP |01> -> |10>"))
}

fn bell_discrimination(s: &Settings) -> Result<String, String> {
    let mut rows = std::collections::BTreeSet::new();
    for secret in 1..=4 {
        let r = discriminate_bell(secret).map_err(err)?;
        ensure(r.identified == Some(secret), || format!("secret {secret} identified as {:?}", r.identified))?;
        let p = r.success_probability();
        ensure((p - 1.0).abs() <= s.tol, || format!("secret {secret} success {p}"))?;
        let sign = if secret % 2 == 1 { "+" } else { "-" };
        ensure(r.charlie.as_deref() == Some(sign), || format!("secret {secret}: Charlie {:?}", r.charlie))?;
        rows.extend(r.branches.iter().map(|b| (b.charlie.clone(), b.alice, b.bob)));
    }
    ensure(rows.len() == 8, || format!("{} table rows exercised", rows.len()))?;
    Ok("4/4 secrets identified with probability 1, 8 table rows".into())
}

fn entangle(s: &Settings) -> Result<String, String> {
    let zero = PureState::ket(2, 0).map_err(err)?;
    let out = entangle_2ics(&Unitary::identity(2), &Unitary::pauli_x(), &zero, &zero).map_err(err)?;
    for b in &out {
        let e = b.entropy.unwrap_or(f64::NAN);
        ensure((b.probability - 0.5).abs() <= s.tol && (e - 1.0).abs() <= s.tol, || {
            format!("branch {}: p = {}, entropy {e}", b.label, b.probability)
        })?;
    }
    let out = entangle_2ics(&Unitary::identity(2), &Unitary::identity(2), &zero, &zero).map_err(err)?;
    let plus_e = out[0].entropy.unwrap_or(f64::NAN);
    ensure(out[1].state.is_none() && out[1].probability < crate::NULL_PROBABILITY, || {
        format!("equal unitaries: - branch has probability {}", out[1].probability)
    })?;
    ensure(plus_e.abs() <= s.tol, || format!("equal unitaries: + branch entropy {plus_e}"))?;
    Ok("I/sigma_x: p = 1/2, 1 ebit per branch; equal unitaries: null - branch".into())
}

fn smolin(s: &Settings) -> Result<String, String> {
    let r = unlock_smolin().map_err(err)?;
    ensure(r.min_fidelity >= 1.0 - s.tol, || format!("min fidelity {}", r.min_fidelity))?;
    ensure(r.min_pt_eigenvalue >= -s.tol, || format!("min PT eigenvalue {}", r.min_pt_eigenvalue))?;
    ensure(r.branches.iter().all(|b| (b.entropy - 1.0).abs() <= s.tol), || "entropy below 1 ebit".into())?;
    Ok(format!("4 branches at fidelity 1-{:.1e}; min PT eigenvalue {:.1e}", 1.0 - r.min_fidelity, r.min_pt_eigenvalue))
}

fn higher_ics(s: &Settings, m: usize, dims: &[usize], seed: u64) -> Result<String, String> {
    let mut parts = Vec::new();
    for (dir, offset) in [(Direction::Forward, 0), (Direction::Backward, 1)] {
        let (f, dev, n) = teleport_batch(s, m, dims, 100, seed + offset, dir)?;
        ensure(n == 100 * m * m, || format!("{dir:?}: {n} branches"))?;
        ensure(f >= 1.0 - s.tol && dev <= s.tol, || {
            format!("{dir:?}: min fidelity {f:.3e}, probability deviation {dev:.3e}")
        })?;
        parts.push(format!("{dir:?} min fidelity 1-{:.1e}", 1.0 - f).to_lowercase());
    }
    Ok(format!("100 inputs x {} branches each way; {}", m * m, parts.join(", ")))
}

fn teleport_3ics(s: &Settings) -> Result<String, String> {
    higher_ics(s, 3, &[3, 5], 107)
}

fn teleport_4ics(s: &Settings) -> Result<String, String> {
    higher_ics(s, 4, &[4, 5], 109)
}

fn correction_search(s: &Settings) -> Result<String, String> {
    let mut parts = Vec::new();
    for m in [2, 3] {
        let unitaries = ics_unitaries(m).map_err(err)?;
        let basis = standard_mass_basis(m).map_err(err)?;
        let found = search_corrections(m, &unitaries, &basis, m + 1).map_err(err)?;
        let table = found.table().ok_or_else(|| format!("m = {m}: {found:?}"))?;
        let reference = CorrectionTable::standard(m, Direction::Forward).map_err(err)?;
        let overlap = table.min_phase_overlap(&reference);
        ensure((overlap - 1.0).abs() <= s.tol, || format!("m = {m}: min phase overlap {overlap}"))?;
        parts.push(format!("m={m} matches"));
    }
    Ok(format!("{} up to per-entry phase", parts.join(", ")))
}

fn random_config(rng: &mut rand_chacha::ChaCha8Rng) -> SpacetimeConfig {
    use rand::Rng;
    let m: f64 = rng.random_range(0.1..2.0);
    let r = 2.0 * m * rng.random_range(1.01..6.0);
    let h = rng.random_range(0.05..10.0);
    SpacetimeConfig::geometric(m, r, h).expect("outside the horizon")
}

fn spacetime(_s: &Settings) -> Result<String, String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(110);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let cfg = random_config(&mut rng);
        let closed = light_coordinate_time(cfg.r(), cfg.r() + cfg.h(), &cfg).map_err(err)?;
        let quad = light_time_quadrature(cfg.r(), cfg.r() + cfg.h(), &cfg);
        worst = worst.max((closed - quad).abs() / closed);
    }
    ensure(worst < 1e-9, || format!("closed form vs quadrature relative error {worst:.3e}"))?;

    let flat = SpacetimeConfig::geometric(0.0, 3.0, 1.0).map_err(err)?;
    ensure(matches!(tau_star_threshold(&flat), Err(Error::DivergentThreshold(_))), || "M = 0 did not diverge".into())?;

    for _ in 0..1000 {
        let cfg = random_config(&mut rng);
        let clock = |b: bool| if b { Clock::A } else { Clock::B };
        let e1 = EventSpec::new(clock(rng.random()), rng.random_range(0.0..100.0)).map_err(err)?;
        let e2 = EventSpec::new(clock(rng.random()), rng.random_range(0.0..100.0)).map_err(err)?;
        let near = clock(rng.random());
        let v12 = classify_order(e1, e2, near, &cfg).map_err(err)?;
        let v21 = classify_order(e2, e1, near, &cfg).map_err(err)?;
        let margin_ok = match v12.relation {
            Relation::Spacelike => v21.margin == v12.margin,
            _ => (v21.margin + v12.margin).abs() <= 1e-12 * v12.margin.abs().max(1.0),
        };
        ensure(v21.relation == v12.relation.swapped() && margin_ok, || format!("not antisymmetric: {v12:?} vs {v21:?}"))?;
    }

    for _ in 0..20 {
        let cfg = random_config(&mut rng);
        let tau = tau_star_threshold(&cfg).map_err(err)? * rng.random_range(1.0..3.0);
        let tilde = definite_future_threshold(tau, &cfg).map_err(err)?;
        let x = EventSpec::on_a(tau).map_err(err)?;
        let y = EventSpec::on_b(tilde).map_err(err)?;
        for near in [Clock::A, Clock::B] {
            let v = classify_order(x, y, near, &cfg).map_err(err)?;
            ensure(v.relation == Relation::XBeforeY, || format!("tau~ not definite with mass near {near}: {v:?}"))?;
        }
    }
    Ok(format!("quadrature rel. error <= {worst:.1e}; 1000 swaps antisymmetric; tau~ definite"))
}

fn branch_engine(s: &Settings) -> Result<String, String> {
    let mut rng = Sampler::new(111);
    let mut worst: f64 = 0.0;
    for m in 2..=4 {
        let dims = [2, 4, 2];
        let reg = UnitaryRegistry::indexed((0..m).map(|_| rng.unitary(2)).collect());
        let strategy = SignalingStrategy::ladder(m, reg, vec![0], vec![2]).map_err(err)?;
        let blocks = simulate_all(&strategy)
            .map_err(err)?
            .iter()
            .map(|p| plan_matrix(p, strategy.registry(), &dims))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let cu = controlled_unitary(&blocks);
        let mass = MassRegister::uniform(m).map_err(err)?;
        for _ in 0..5 {
            let input = rng.state(&dims);
            let joint = run_superposed(&mass, &strategy, &input).map_err(err)?;
            let oracle = mat_vec(&cu, &product_vector(mass.amps(), input.amps()));
            worst = worst.max(max_abs_diff_vec(joint.amps(), &oracle));
        }
    }
    ensure(worst < 1e-12, || format!("superposition differs from oracle by {worst:.3e}"))?;

    let strategies = (2..=4)
        .map(|m| {
            let reg = UnitaryRegistry::indexed(ics_unitaries(m)?);
            SignalingStrategy::ladder(m, reg, vec![0], vec![2])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let inputs: Vec<(usize, PureState)> = (0..100)
        .map(|i| {
            let m = 2 + i % 3;
            (m, rng.state(&[m, 3, m]))
        })
        .collect();
    let gaps = par::map(s.mode, inputs, |(m, input)| -> Result<(f64, f64), Error> {
        let strategy = &strategies[m - 2];
        let before = schmidt_entropy(&input, &[0]);
        let mut gap: f64 = 0.0;
        for plan in simulate_all(strategy)? {
            let after = apply_plan(&plan, strategy.registry(), &input)?;
            gap = gap.max((schmidt_entropy(&after, &[0]) - before).abs());
        }
        let joint = run_superposed(&MassRegister::uniform(m)?, strategy, &input)?;
        let mut regen: f64 = 0.0;
        for o in measure_mass(&joint, &standard_mass_basis(m)?)? {
            for a in &o.mass_state {
                regen = regen.max((a.norm() - 1.0 / (m as f64).sqrt()).abs());
            }
        }
        Ok((gap, regen))
    });
    let (gap, regen) = gaps
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?
        .into_iter()
        .fold((0.0f64, 0.0f64), |(g, r), (a, b)| (g.max(a), r.max(b)));
    ensure(gap <= s.tol, || format!("branch changes the Alice|Bob entropy by {gap:.3e}"))?;
    ensure(regen <= s.tol, || format!("post-measurement mass moduli off by {regen:.3e}"))?;
    Ok(format!("oracle agreement {worst:.1e}; 100 inputs keep cut entropy within {gap:.1e}"))
}

fn nlwe(s: &Settings) -> Result<String, String> {
    let corpus = nlwe_default_corpus().map_err(err)?;
    let r = reduce_nlwe(&corpus).map_err(err)?;
    ensure(r.input_gram_deviation <= s.tol && r.output_gram_deviation <= s.tol, || {
        format!("Gram deviation {:.3e} -> {:.3e}", r.input_gram_deviation, r.output_gram_deviation)
    })?;
    ensure((r.success_probability - 1.0).abs() <= s.tol, || format!("success {}", r.success_probability))?;
    Ok(format!("{} states, Gram = I within {:.1e}, discrimination success 1", corpus.len(), r.output_gram_deviation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_filterable() {
        let names: Vec<_> = criteria().iter().map(|c| c.name).collect();
        let unique: std::collections::BTreeSet<_> = names.iter().collect();
        assert_eq!(unique.len(), 12);
        let s = Settings::default();
        let only = run_suite(Some("bell"), &s);
        assert_eq!(only.len(), 1);
        assert!(only[0].passed, "{}", only[0].line());
    }

    #[test]
    fn impossible_tolerance_fails() {
        let s = Settings { tol: -1.0, ..Settings::default() };
        let r = run_suite(Some("smolin"), &s);
        assert!(!r[0].passed);
    }
}
