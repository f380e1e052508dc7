use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use icausal::protocols::{
    bell_state, discriminate_bell, entangle_2ics, ics_unitaries, implement_nonlocal_channel, nlwe_default_corpus,
    reduce_nlwe, sample_index, search_corrections, teleport, teleport_with, unlock_smolin, CorrectionTable,
    Direction, IcsSetup, ProtocolResult, SearchOutcome,
};
use icausal::branch::standard_mass_basis;
use icausal::qcore::io::{corpus_from_json, ChannelFile, CorpusFile, StateFile};
use icausal::qcore::random::Sampler;
use icausal::qcore::{trace_distance, Basis, DensityState, KrausChannel, PureState, Unitary, C64};
use icausal::spacetime::{
    classify_order, definite_future_threshold, tau_star_threshold, validate_mics, Clock, EventSpec, MicsScenario,
    SpacetimeConfig,
};

use crate::config::{InputSpec, Mode, ScenarioConfig, SpacetimeBlock};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Failure modes that map to distinct exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Malformed config or input; exit 2.
    Config(String),
}

impl From<icausal::Error> for RunError {
    fn from(e: icausal::Error) -> Self {
        RunError::Config(e.to_string())
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(s) => write!(f, "{s}"),
        }
    }
}

type Res<T> = std::result::Result<T, RunError>;

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub value: Value,
    pub pass: bool,
}

#[derive(Debug, Default)]
struct Checks(BTreeMap<String, Check>);

impl Checks {
    fn add(&mut self, name: &str, value: impl Serialize, pass: bool) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.0.insert(name.to_string(), Check { value, pass });
    }

    fn fidelity(&mut self, value: f64, tol: f64) {
        self.add("min_branch_fidelity", value, value >= 1.0 - tol);
    }

    fn probability_sum(&mut self, value: f64, tol: f64) {
        self.add("probability_sum", value, (value - 1.0).abs() <= tol);
    }
}

/// A finished run: the report body and whether every check passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

pub fn run_scenario(cfg: &ScenarioConfig, tol: f64, elapsed: impl FnOnce() -> f64) -> Res<Outcome> {
    let protocol = cfg.protocol.as_deref().ok_or_else(|| config_err("no protocol given"))?;
    let mut checks = Checks::default();
    let results = match protocol {
        "teleport" => run_teleport(cfg, Direction::Forward, tol, &mut checks)?,
        "backteleport" => run_teleport(cfg, Direction::Backward, tol, &mut checks)?,
        "channel" => run_channel(cfg, tol, &mut checks)?,
        "entangle" => run_entangle(cfg, tol, &mut checks)?,
        "bell" => run_bell(cfg, tol, &mut checks)?,
        "smolin" => run_smolin(cfg, tol, &mut checks)?,
        "nlwe" => run_nlwe(cfg, tol, &mut checks)?,
        "search" => run_search(cfg, tol, &mut checks)?,
        "spacetime" => run_spacetime(cfg, &mut checks)?,
        other => return Err(config_err(format!("unknown protocol '{other}'"))),
    };
    let passed = checks.0.values().all(|c| c.pass);
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg,
        "tolerance": tol,
        "results": results,
        "checks": checks.0,
        "passed": passed,
        "timing": { "elapsed_ms": elapsed() },
    });
    Ok(Outcome { report, passed })
}

fn preset_name(cfg: &ScenarioConfig, default: &str) -> Res<String> {
    match &cfg.input {
        None => Ok(default.to_string()),
        Some(InputSpec::Preset(p)) => Ok(p.clone()),
        Some(_) => Err(config_err(format!(
            "protocol '{}' takes a named preset as input",
            cfg.protocol.as_deref().unwrap_or_default()
        ))),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Res<T> {
    let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Loads an explicit state, or returns `None` for a named preset.
fn explicit_state(cfg: &ScenarioConfig) -> Res<Option<PureState>> {
    match &cfg.input {
        Some(InputSpec::Inline(f)) => Ok(Some(f.to_state()?)),
        Some(InputSpec::File { file }) => Ok(Some(read_json::<StateFile>(file)?.to_state()?)),
        _ => Ok(None),
    }
}

fn seed(cfg: &ScenarioConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

fn digest(states: &[&PureState]) -> String {
    let files: Vec<StateFile> = states.iter().map(|s| StateFile::from_state(s)).collect();
    let bytes = serde_json::to_vec(&files).unwrap_or_default();
    hex::encode(Sha256::digest(bytes))
}

fn sampled(cfg: &ScenarioConfig, weights: &[f64]) -> Option<usize> {
    match cfg.mode {
        Mode::Exhaustive => None,
        Mode::Sample => sample_index(weights, seed(cfg)),
    }
}

fn protocol_checks(r: &ProtocolResult, tol: f64, checks: &mut Checks) {
    checks.fidelity(r.min_branch_fidelity, tol);
    checks.probability_sum(r.probability_sum, tol);
}

fn with_sample(mut results: Value, index: Option<usize>, branch: impl FnOnce(usize) -> Value) -> Value {
    if let (Some(i), Value::Object(map)) = (index, &mut results) {
        map.insert("sampled".into(), json!({ "index": i, "branch": branch(i) }));
    }
    results
}

fn run_teleport(cfg: &ScenarioConfig, direction: Direction, tol: f64, checks: &mut Checks) -> Res<Value> {
    let m = cfg.m.unwrap_or(2);
    let input = match explicit_state(cfg)? {
        Some(s) => s,
        None => match preset_name(cfg, "random")?.as_str() {
            "random" => Sampler::new(seed(cfg)).state(&[m, cfg.dim.unwrap_or(2)]),
            other => return Err(config_err(format!("unknown teleport preset '{other}' (expected 'random')"))),
        },
    };
    if input.num_subsystems() < 2 || input.dims()[0] != m {
        return Err(config_err(format!("input dims {:?} must be ({m}, ...) with at least two subsystems", input.dims())));
    }
    let r = teleport(m, &input, direction)?;
    protocol_checks(&r, tol, checks);
    let idx = sampled(cfg, &r.branches.iter().map(|b| b.probability).collect::<Vec<_>>());
    let mut v = serde_json::to_value(&r).map_err(|e| config_err(e.to_string()))?;
    v["input_digest"] = json!(digest(&[&input]));
    v["input_dims"] = json!(input.dims());
    Ok(with_sample(v, idx, |i| serde_json::to_value(&r.branches[i]).unwrap_or(Value::Null)))
}

fn swap_unitary(d: usize) -> Unitary {
    let image: Vec<usize> = (0..d * d).map(|k| (k % d) * d + k / d).collect();
    Unitary::permutation(&image).expect("swap is a permutation")
}

fn run_channel(cfg: &ScenarioConfig, tol: f64, checks: &mut Checks) -> Res<Value> {
    let d = cfg.dim.unwrap_or(2);
    let mut sampler = Sampler::new(seed(cfg));
    let explicit = explicit_state(cfg)?;
    let (rho, channel, label) = match (&cfg.channel, explicit) {
        (Some(path), state) => {
            let ch = read_json::<ChannelFile>(path)?.to_channel()?;
            if ch.in_dim() < 4 || ch.in_dim() % 2 != 0 {
                return Err(config_err(format!("channel must act on a (2, d) system, got dimension {}", ch.in_dim())));
            }
            let rho = match state {
                Some(s) => s.to_density(),
                None => match preset_name(cfg, "random")?.as_str() {
                    "random" => sampler.density(&[2, ch.in_dim() / 2], 2),
                    other => return Err(config_err(format!("unknown channel input preset '{other}'"))),
                },
            };
            (rho, ch, path.display().to_string())
        }
        (None, Some(s)) => {
            let n = s.dims().iter().product::<usize>();
            (s.to_density(), KrausChannel::from_unitary(&sampler.unitary(n)), "random".to_string())
        }
        (None, None) => match preset_name(cfg, "swap")?.as_str() {
            "swap" => (sampler.state(&[2, 2]).to_density(), KrausChannel::from_unitary(&swap_unitary(2)), "swap".into()),
            "random" => {
                let rho = sampler.density(&[2, d], 2);
                (rho, sampler.channel(2 * d, 2), "random".into())
            }
            other => return Err(config_err(format!("unknown channel preset '{other}' (expected 'swap' or 'random')"))),
        },
    };
    if rho.dims().len() != 2 || rho.dims()[0] != 2 {
        return Err(config_err(format!("channel input must be on (2, d), got {:?}", rho.dims())));
    }
    let run = implement_nonlocal_channel(&rho, &channel)?;
    let direct = channel.apply(rho.matrix())?;
    let trace = direct.trace().re;
    let expected = DensityState::new(rho.dims().to_vec(), direct.unscale(trace))?;
    let distance = trace_distance(&run.output, &expected)?;
    checks.fidelity(run.min_path_fidelity, tol);
    let prob_pass = if channel.is_trace_preserving() {
        (run.success_probability - 1.0).abs() <= tol
    } else {
        (run.success_probability - trace).abs() <= tol
    };
    checks.add("probability_sum", run.success_probability, prob_pass);
    checks.add("matches_direct_application", distance, distance <= tol);
    Ok(json!({
        "protocol": "nonlocal_channel",
        "channel": label,
        "trace_preserving": channel.is_trace_preserving(),
        "run": run,
        "trace_distance_to_direct": distance,
        "input_dims": rho.dims(),
    }))
}

fn run_entangle(cfg: &ScenarioConfig, tol: f64, checks: &mut Checks) -> Res<Value> {
    let d = cfg.dim.unwrap_or(2);
    let zero = |d| PureState::ket(d, 0);
    let (u1, u2, psi, phi) = match preset_name(cfg, "default")?.as_str() {
        "default" => (Unitary::identity(2), Unitary::pauli_x(), zero(2)?, zero(2)?),
        "identical" => (Unitary::identity(2), Unitary::identity(2), zero(2)?, zero(2)?),
        "random" => {
            let mut s = Sampler::new(seed(cfg));
            (s.unitary(d), s.unitary(d), s.state(&[d]), s.state(&[d]))
        }
        other => {
            return Err(config_err(format!("unknown entangle preset '{other}' (expected default, identical or random)")))
        }
    };
    let branches = entangle_2ics(&u1, &u2, &psi, &phi)?;
    let apply = |u: &Unitary, s: &PureState| s.apply(u, &[0]);
    let a = apply(&u1, &psi)?.tensor(&apply(&u2, &phi)?);
    let b = apply(&u2, &psi)?.tensor(&apply(&u1, &phi)?);
    let dims = vec![psi.dims()[0], phi.dims()[0]];
    let mut min_fid: f64 = 1.0;
    for (br, sign) in branches.iter().zip([1.0, -1.0]) {
        let Some(state) = &br.state else { continue };
        let v: Vec<C64> = a.amps().iter().zip(b.amps()).map(|(x, y)| x + y * sign).collect();
        let expected = PureState::normalized(dims.clone(), v)?;
        min_fid = min_fid.min(icausal::qcore::fidelity(state, &expected)?);
    }
    checks.fidelity(min_fid, tol);
    checks.probability_sum(branches.iter().map(|b| b.probability).sum(), tol);
    let idx = sampled(cfg, &branches.iter().map(|b| b.probability).collect::<Vec<_>>());
    let v = json!({
        "protocol": "entangle_2ics",
        "input_digest": digest(&[&psi, &phi]),
        "branches": branches,
        "min_branch_fidelity": min_fid,
    });
    Ok(with_sample(v, idx, |i| serde_json::to_value(&branches[i]).unwrap_or(Value::Null)))
}

fn bell_index(name: &str) -> Res<usize> {
    match name {
        "B1" => Ok(1),
        "B2" => Ok(2),
        "B3" => Ok(3),
        "B4" => Ok(4),
        other => Err(config_err(format!("unknown Bell preset '{other}' (expected B1..B4)"))),
    }
}

fn run_bell(cfg: &ScenarioConfig, tol: f64, checks: &mut Checks) -> Res<Value> {
    let secret = bell_index(&preset_name(cfg, "B1")?)?;
    let report = discriminate_bell(secret)?;
    let live: Vec<_> = report.branches.iter().filter(|b| b.probability >= icausal::NULL_PROBABILITY).collect();
    let correct = live.iter().all(|b| b.conclusion == secret);
    checks.fidelity(if correct { 1.0 } else { 0.0 }, tol);
    checks.probability_sum(report.branches.iter().map(|b| b.probability).sum(), tol);
    checks.add("identified", report.identified, report.identified == Some(secret));
    let idx = sampled(cfg, &report.branches.iter().map(|b| b.probability).collect::<Vec<_>>());
    let mut v = serde_json::to_value(&report).map_err(|e| config_err(e.to_string()))?;
    v["protocol"] = json!("bell_discrimination");
    v["input_digest"] = json!(digest(&[&bell_state(secret)?]));
    Ok(with_sample(v, idx, |i| serde_json::to_value(&report.branches[i]).unwrap_or(Value::Null)))
}

fn run_smolin(cfg: &ScenarioConfig, tol: f64, checks: &mut Checks) -> Res<Value> {
    preset_name(cfg, "smolin").and_then(|p| match p.as_str() {
        "smolin" => Ok(()),
        other => Err(config_err(format!("unknown smolin preset '{other}'"))),
    })?;
    let report = unlock_smolin()?;
    checks.fidelity(report.min_fidelity, tol);
    checks.probability_sum(report.branches.iter().map(|b| b.probability).sum(), tol);
    checks.add("all_identified", report.branches.iter().all(|b| b.identified.is_some()), report.branches.iter().all(|b| b.identified.is_some()));
    let idx = sampled(cfg, &report.branches.iter().map(|b| b.probability).collect::<Vec<_>>());
    let mut v = serde_json::to_value(&report).map_err(|e| config_err(e.to_string()))?;
    v["protocol"] = json!("unlock_smolin");
    Ok(with_sample(v, idx, |i| serde_json::to_value(&report.branches[i]).unwrap_or(Value::Null)))
}

fn run_nlwe(cfg: &ScenarioConfig, tol: f64, checks: &mut Checks) -> Res<Value> {
    let states = match &cfg.input {
        Some(InputSpec::File { file }) => corpus_from_json(&read_json::<CorpusFile>(file)?)?,
        Some(InputSpec::Inline(_)) => return Err(config_err("nlwe takes a corpus file or the 'nlwe-default' preset")),
        _ => match preset_name(cfg, "nlwe-default")?.as_str() {
            "nlwe-default" => nlwe_default_corpus()?,
            other => return Err(config_err(format!("unknown nlwe preset '{other}' (expected 'nlwe-default')"))),
        },
    };
    let report = reduce_nlwe(&states)?;
    checks.fidelity(report.min_branch_fidelity, tol);
    let row_sums: Vec<f64> = report.confusion.iter().map(|r| r.iter().sum()).collect();
    let worst = row_sums.iter().fold(1.0_f64, |acc, &s| if (s - 1.0).abs() > (acc - 1.0).abs() { s } else { acc });
    checks.probability_sum(worst, tol);
    checks.add("orthogonality_preserved", report.output_gram_deviation, report.output_gram_deviation <= tol);
    checks.add("discrimination", report.success_probability, report.success_probability >= 1.0 - tol);
    let refs: Vec<&PureState> = states.iter().collect();
    let mut v = serde_json::to_value(&report).map_err(|e| config_err(e.to_string()))?;
    v["protocol"] = json!("nlwe_reduction");
    v["input_digest"] = json!(digest(&refs));
    v["corpus_size"] = json!(states.len());
    Ok(v)
}

fn run_search(cfg: &ScenarioConfig, tol: f64, checks: &mut Checks) -> Res<Value> {
    let m = cfg.m.unwrap_or(2);
    let d = cfg.dim.unwrap_or(2);
    let preset = preset_name(cfg, "standard")?;
    let unitaries = match preset.as_str() {
        "standard" => ics_unitaries(m)?,
        "identity" => vec![Unitary::identity(m); m],
        other => return Err(config_err(format!("unknown search preset '{other}' (expected standard or identity)"))),
    };
    let basis: Basis = standard_mass_basis(m)?;
    let outcome = search_corrections(m, &unitaries, &basis, d)?;
    let mut v = json!({ "protocol": "search_corrections", "preset": preset, "m": m, "outcome": outcome.to_json() });
    match (&outcome, preset.as_str()) {
        (SearchOutcome::Found(table), _) => {
            let standard = CorrectionTable::standard(m, Direction::Forward)?;
            let overlap = table.min_phase_overlap(&standard);
            let setup = IcsSetup { unitaries, mass: icausal::branch::MassRegister::uniform(m)? };
            let probe = Sampler::new(seed(cfg)).state(&[m, d]);
            let r = teleport_with(&setup, table, &probe, Direction::Forward)?;
            protocol_checks(&r, tol, checks);
            checks.add("table_found", true, preset == "standard");
            v["agreement_with_standard"] = json!(overlap);
            v["probe_digest"] = json!(digest(&[&probe]));
        }
        (SearchOutcome::NotFound { vacuous, .. }, "identity") => {
            checks.add("vacuous_pair_detected", *vacuous, *vacuous);
        }
        (SearchOutcome::NotFound { .. }, _) => {
            checks.add("table_found", false, false);
        }
    }
    Ok(v)
}

fn spacetime_config(block: &SpacetimeBlock) -> Res<Option<SpacetimeConfig>> {
    match (block.m, block.r, block.h) {
        (Some(m), Some(r), Some(h)) => Ok(Some(SpacetimeConfig::new(block.g, block.c, m, r, h)?)),
        (None, None, None) => Ok(None),
        _ => Err(config_err("spacetime block needs all of M, R and h, or none of them")),
    }
}

fn run_spacetime(cfg: &ScenarioConfig, checks: &mut Checks) -> Res<Value> {
    let block = cfg.spacetime.as_ref();
    let config = block.map(spacetime_config).transpose()?.flatten();
    let scenario = block.and_then(|b| b.scenario.clone());
    let m = cfg.m.unwrap_or(match &scenario {
        Some(s) => s.alice_times.len() + 1,
        None => 2,
    });
    let mut v = json!({ "protocol": "spacetime", "m": m });
    let scn = match (m, config, scenario) {
        (_, _, Some(s)) => s,
        (2, Some(c), None) => {
            let threshold = match tau_star_threshold(&c) {
                Ok(t) => t,
                Err(e) => {
                    v["diagnostic"] = json!(e.to_string());
                    checks.add("threshold_finite", Value::Null, false);
                    return Ok(v);
                }
            };
            checks.add("threshold_finite", threshold, true);
            let tau = block.and_then(|b| b.tau_star).unwrap_or(threshold);
            v["config"] = json!(c);
            v["tau_star"] = json!(tau);
            v["thresholds"] = json!({
                "tau_star": threshold,
                "definite_future": definite_future_threshold(threshold, &c)?,
            });
            let (x, y) = (EventSpec::on_a(tau)?, EventSpec::on_b(tau)?);
            let verdicts: BTreeMap<&str, _> = [("mass_near_A", Clock::A), ("mass_near_B", Clock::B)]
                .into_iter()
                .map(|(k, clock)| Ok((k, classify_order(x, y, clock, &c)?)))
                .collect::<Res<_>>()?;
            v["verdicts"] = json!(verdicts);
            MicsScenario::two_ics(c, tau)
        }
        (_, _, None) => MicsScenario::toy(m)?,
    };
    let report = validate_mics(&scn, m)?;
    checks.add("valid", report.valid, report.valid);
    v["report"] = json!(report);
    Ok(v)
}
