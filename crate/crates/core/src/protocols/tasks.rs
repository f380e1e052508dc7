use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::result::TranscriptEntry;
use super::teleport::teleport_2ics;
use crate::branch::{measure_mass, run_superposed, standard_mass_basis, MassRegister, SignalingStrategy};
use crate::qcore::io::{corpus_from_json, CorpusFile};
use crate::qcore::{
    c, entanglement_entropy, fidelity, hermitian_eigen, measure_exhaustive, Basis, DensityState, PureState, Unitary,
};
use crate::{Error, Result, ASSERT_TOL, NULL_PROBABILITY};

/// `𝓑1 = (|00⟩+|11⟩)/√2`, `𝓑2 = (|00⟩−|11⟩)/√2`, `𝓑3 = (|01⟩+|10⟩)/√2`,
/// `𝓑4 = (|01⟩−|10⟩)/√2`.
pub fn bell_state(index: usize) -> Result<PureState> {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let amps = match index {
        1 => vec![c(h, 0.0), z, z, c(h, 0.0)],
        2 => vec![c(h, 0.0), z, z, c(-h, 0.0)],
        3 => vec![z, c(h, 0.0), c(h, 0.0), z],
        4 => vec![z, c(h, 0.0), c(-h, 0.0), z],
        _ => return Err(Error::InvalidInput(format!("Bell index {index} is not in 1..=4"))),
    };
    PureState::new(vec![2, 2], amps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntangleBranch {
    pub label: String,
    pub probability: f64,
    #[serde(skip)]
    pub state: Option<PureState>,
    /// Entanglement entropy (bits) across Alice|Bob; `None` for null outcomes.
    pub entropy: Option<f64>,
}

/// Runs the two-order strategy on `ψ ⊗ φ` and measures the mass in the ±
/// basis, giving `(U1ψ)(U2φ) ± (U2ψ)(U1φ)` up to normalization.
pub fn entangle_2ics(u1: &Unitary, u2: &Unitary, psi: &PureState, phi: &PureState) -> Result<Vec<EntangleBranch>> {
    let da: usize = psi.dims().iter().product();
    let db: usize = phi.dims().iter().product();
    if u1.dim() != u2.dim() || u1.dim() != da || da != db {
        return Err(Error::DimensionMismatch(format!(
            "unitaries of dimension {} and {} for states of dimension {da} and {db}",
            u1.dim(),
            u2.dim()
        )));
    }
    let input = psi.reshape(vec![da])?.tensor(&phi.reshape(vec![db])?);
    let strategy = SignalingStrategy::two_ics(u1.clone(), u2.clone(), vec![0], vec![1])?;
    let joint = run_superposed(&MassRegister::uniform(2)?, &strategy, &input)?;
    measure_mass(&joint, &standard_mass_basis(2)?)?
        .into_iter()
        .map(|o| {
            let entropy = o.system.as_ref().map(|s| entanglement_entropy(s, &[0])).transpose()?;
            Ok(EntangleBranch { label: o.label, probability: o.probability, state: o.system, entropy })
        })
        .collect()
}

/// The Bell state implied by Charlie's sign and whether the local
/// computational outcomes agree.
fn bell_conclusion(charlie_plus: bool, alice: usize, bob: usize) -> usize {
    match (charlie_plus, alice != bob) {
        (true, true) => 1,
        (true, false) => 3,
        (false, true) => 2,
        (false, false) => 4,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellBranch {
    pub charlie: String,
    pub alice: usize,
    pub bob: usize,
    pub probability: f64,
    pub conclusion: usize,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellReport {
    pub secret: usize,
    pub branches: Vec<BellBranch>,
    /// The common conclusion of every branch, if they agree.
    pub identified: Option<usize>,
    /// Charlie's outcome when it is the same in every branch.
    pub charlie: Option<String>,
}

impl BellReport {
    pub fn success_probability(&self) -> f64 {
        self.branches.iter().filter(|b| b.conclusion == self.secret).map(|b| b.probability).sum()
    }
}

/// Identifies which Bell state Alice and Bob share using only local
/// computational measurements and Charlie's ± outcome.
pub fn discriminate_bell(secret: usize) -> Result<BellReport> {
    let input = bell_state(secret)?;
    let strategy = SignalingStrategy::two_ics(Unitary::identity(2), Unitary::pauli_x(), vec![0], vec![1])?;
    let joint = run_superposed(&MassRegister::uniform(2)?, &strategy, &input)?;
    let z = Basis::computational(2);
    let mut branches = Vec::new();
    for o in measure_mass(&joint, &standard_mass_basis(2)?)? {
        let Some(sys) = o.system else { continue };
        for a in measure_exhaustive(&sys, 0, &z)? {
            let Some(after_a) = a.state else { continue };
            for b in measure_exhaustive(&after_a, 1, &z)? {
                let probability = o.probability * a.probability * b.probability;
                if probability < NULL_PROBABILITY {
                    continue;
                }
                let conclusion = bell_conclusion(o.index == 0, a.index, b.index);
                let transcript = vec![
                    TranscriptEntry::new("Charlie", "measure mass").outcome(&o.label, o.probability),
                    TranscriptEntry::new("Charlie", format!("broadcast {}", o.label)),
                    TranscriptEntry::new("Alice", "measure A").outcome(a.index.to_string(), a.probability),
                    TranscriptEntry::new("Bob", "measure B").outcome(b.index.to_string(), b.probability),
                    TranscriptEntry::new("Alice, Bob", format!("conclude B{conclusion}")),
                ];
                branches.push(BellBranch { charlie: o.label.clone(), alice: a.index, bob: b.index, probability, conclusion, transcript });
            }
        }
    }
    let agree = |f: &dyn Fn(&BellBranch) -> String| {
        let first = branches.first().map(f);
        first.filter(|v| branches.iter().all(|b| &f(b) == v))
    };
    let identified = agree(&|b| b.conclusion.to_string()).map(|s| s.parse().expect("index"));
    let charlie = agree(&|b| b.charlie.clone());
    Ok(BellReport { secret, branches, identified, charlie })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmolinBranch {
    pub bell_index: usize,
    pub probability: f64,
    pub identified: Option<usize>,
    pub correction: String,
    pub fidelity: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmolinReport {
    pub branches: Vec<SmolinBranch>,
    /// Smallest eigenvalue of the partial transpose across (A,B)|(D,E).
    pub min_pt_eigenvalue: f64,
    pub min_fidelity: f64,
}

/// Dan's local Pauli taking `𝓑i` on (D, E) to `𝓑1`.
fn dan_correction(index: usize) -> (&'static str, Unitary) {
    match index {
        2 => ("sigma_z", Unitary::pauli_z()),
        3 => ("sigma_x", Unitary::pauli_x()),
        4 => ("i*sigma_y", Unitary::i_sigma_y()),
        _ => ("I", Unitary::identity(2)),
    }
}

/// Distills one ebit for Dan and Emma from the four-party state
/// `¼ Σ |𝓑i⟩⟨𝓑i|_AB ⊗ |𝓑i⟩⟨𝓑i|_DE`.
pub fn unlock_smolin() -> Result<SmolinReport> {
    let ensemble: Vec<(f64, PureState)> =
        (1..=4).map(|i| Ok((0.25, bell_state(i)?.tensor(&bell_state(i)?)))).collect::<Result<_>>()?;
    let rho = DensityState::mixture(&ensemble)?;
    let pt = rho.partial_transpose(&[2, 3])?;
    let (vals, _) = hermitian_eigen(&pt);
    let target = bell_state(1)?;
    let mut branches = Vec::with_capacity(4);
    for i in 1..=4 {
        let report = discriminate_bell(i)?;
        let (name, u) = dan_correction(report.identified.unwrap_or(0));
        let de = bell_state(i)?.apply(&u, &[0])?;
        branches.push(SmolinBranch {
            bell_index: i,
            probability: 0.25,
            identified: report.identified,
            correction: name.into(),
            fidelity: fidelity(&de, &target)?,
            entropy: entanglement_entropy(&de, &[0])?,
        });
    }
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min);
    Ok(SmolinReport { branches, min_pt_eigenvalue: vals[0], min_fidelity })
}

/// The four-state unextendible product set on three qubits.
pub fn nlwe_default_corpus() -> Result<Vec<PureState>> {
    let corpus: CorpusFile = serde_json::from_str(include_str!("../../data/nlwe_default.json"))?;
    corpus_from_json(&corpus)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NlweReport {
    /// Largest `| |⟨i|j⟩| − δij |` before the reduction.
    pub input_gram_deviation: f64,
    /// The same for the reduced states.
    pub output_gram_deviation: f64,
    pub min_branch_fidelity: f64,
    /// Entropy across B|(C, C') of each reduced state.
    pub bipartite_entropies: Vec<f64>,
    /// `confusion[i][j]`: probability of answering `j` on input `i`.
    pub confusion: Vec<Vec<f64>>,
    pub success_probability: f64,
    pub discriminator: String,
    #[serde(skip)]
    pub reduced: Vec<PureState>,
}

fn gram_deviation(states: &[PureState]) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let ip = a.inner(b)?.norm();
            dev = dev.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(dev)
}

/// Teleports Alice's qubit of each (A, B, C) product state to an ancilla C'
/// held with C, leaving states on B | (C, C'), ordered (B, C, C').
pub fn reduce_nlwe(states: &[PureState]) -> Result<NlweReport> {
    let dims = states.first().ok_or_else(|| Error::InvalidInput("empty corpus".into()))?.dims().to_vec();
    if dims.len() != 3 || dims[0] != 2 || dims[1] != 2 || states.iter().any(|s| s.dims() != dims) {
        return Err(Error::DimensionMismatch(format!("expected states on (2, 2, d), got {dims:?}")));
    }
    for s in states {
        for part in 0..3 {
            let e = entanglement_entropy(s, &[part])?;
            if e > ASSERT_TOL {
                return Err(Error::InvalidInput(format!("input is entangled across party {part} (entropy {e:.3e})")));
            }
        }
    }
    let input_gram_deviation = gram_deviation(states)?;
    if input_gram_deviation > ASSERT_TOL {
        return Err(Error::InvalidInput(format!("inputs are not orthonormal (deviation {input_gram_deviation:.3e})")));
    }
    let d = dims[2];
    let mut reduced = Vec::with_capacity(states.len());
    let mut min_fid = f64::INFINITY;
    for s in states {
        let res = teleport_2ics(&s.reshape(vec![2, 2 * d])?)?;
        min_fid = min_fid.min(res.min_branch_fidelity);
        let rep = res
            .branches
            .iter()
            .find_map(|b| b.state.clone())
            .ok_or_else(|| Error::InvalidInput("teleportation produced no branch".into()))?;
        reduced.push(rep.reshape(vec![2, 2, d])?.permute(&[1, 2, 0])?);
    }
    let output_gram_deviation = gram_deviation(&reduced)?;
    let bipartite_entropies = reduced.iter().map(|r| entanglement_entropy(r, &[0])).collect::<Result<Vec<_>>>()?;
    let confusion = reduced
        .iter()
        .map(|r| reduced.iter().map(|p| Ok(p.inner(r)?.norm_sqr())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let success_probability = confusion.iter().enumerate().map(|(i, row)| row[i]).sum::<f64>() / reduced.len() as f64;
    Ok(NlweReport {
        input_gram_deviation,
        output_gram_deviation,
        min_branch_fidelity: min_fid,
        bipartite_entropies,
        confusion,
        success_probability,
        discriminator: "global projective measurement onto the reduced states".into(),
        reduced,
    })
}
