use serde::Serialize;

use super::tables::{Correction, CorrectionTable, Direction};
use super::teleport::{raw_branches, IcsSetup};
use crate::branch::MassRegister;
use crate::qcore::{Basis, CMatrix, PureState, Unitary, C64};
use crate::{Error, Result, ASSERT_TOL, NULL_PROBABILITY};

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(CorrectionTable),
    /// The first outcome pair with no exact correction. `vacuous` marks a pair
    /// that never occurs, so no information reaches the receiver.
    NotFound { charlie: usize, sender: usize, vacuous: bool, detail: String },
}

#[derive(Serialize)]
struct NotFoundView<'a> {
    charlie: usize,
    sender: usize,
    vacuous: bool,
    detail: &'a str,
}

impl SearchOutcome {
    pub fn table(&self) -> Option<&CorrectionTable> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::NotFound { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SearchOutcome::Found(t) => serde_json::json!({
                "found": true,
                "entries": t.entries().iter().map(|row| row.iter().map(|c| crate::qcore::io::matrix_to_json(c.unitary.matrix())).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            SearchOutcome::NotFound { charlie, sender, vacuous, detail } => serde_json::json!({
                "found": false,
                "failure": NotFoundView { charlie: *charlie, sender: *sender, vacuous: *vacuous, detail },
            }),
        }
    }
}

/// Looks for a forward correction table for the ladder strategy built from
/// `sender_unitaries`, with the mass in uniform superposition and measured in
/// `mass_basis`.
///
/// For every outcome pair the receiver's conditional state is a linear
/// function `M` of the sender's register. Exact teleportation needs
/// `C M ∝ I` for a unitary `C`, so the candidate is the least-squares inverse
/// `C = s M⁺` with `s² = tr(M†M)/d`, kept only if it is unitary. Pairs that
/// never occur are reported before any other failure. Any table
/// found is then checked on one random input whose second factor has
/// dimension `d`.
pub fn search_corrections(m: usize, sender_unitaries: &[Unitary], mass_basis: &Basis, d: usize) -> Result<SearchOutcome> {
    if !(2..=6).contains(&m) {
        return Err(Error::Unsupported(format!("search supports 2 <= m <= 6, got {m}")));
    }
    if sender_unitaries.len() != m || mass_basis.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries and a basis of dimension {} for m = {m}",
            sender_unitaries.len(),
            mass_basis.dim()
        )));
    }
    let dp = sender_unitaries[0].dim();
    if sender_unitaries.iter().any(|u| u.dim() != dp) {
        return Err(Error::DimensionMismatch("sender unitaries differ in dimension".into()));
    }
    let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
    let setup = IcsSetup { unitaries: sender_unitaries.to_vec(), mass: MassRegister::new(vec![amp; m], mass_basis.clone())? };

    // column i of maps[c][k] is the unnormalized receiver state for input |i⟩
    let mut maps = vec![vec![CMatrix::zeros(dp, dp); dp]; m];
    let filler = PureState::ket(2, 0)?;
    for i in 0..dp {
        let input = PureState::ket(dp, i)?.tensor(&filler);
        for raw in raw_branches(&setup, &input, Direction::Forward)? {
            let Some(state) = raw.state else { continue };
            let scale = raw.probability.sqrt();
            for r in 0..dp {
                // receiver register r with the filler at |0⟩
                maps[raw.charlie][raw.sender][(r, i)] = state.amps()[r * 2] * scale;
            }
        }
    }

    let weight = |map: &CMatrix| (map.adjoint() * map).trace().re / dp as f64;
    for (c, row) in maps.iter().enumerate() {
        if let Some(k) = row.iter().position(|map| weight(map) < NULL_PROBABILITY) {
            return Ok(SearchOutcome::NotFound {
                charlie: c,
                sender: k,
                vacuous: true,
                detail: format!("outcome pair has probability {:.3e}", weight(&row[k])),
            });
        }
    }
    let mut entries = Vec::with_capacity(m);
    for (c, row) in maps.iter().enumerate() {
        let mut out_row = Vec::with_capacity(dp);
        for (k, map) in row.iter().enumerate() {
            let s2 = weight(map);
            let pinv = map.clone().pseudo_inverse(1e-12).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let candidate = pinv * C64::new(s2.sqrt(), 0.0);
            match Unitary::new(candidate) {
                Ok(u) => out_row.push(Correction { name: format!("C[{c}][{k}]"), unitary: u }),
                Err(Error::NotUnitary(dev)) => {
                    return Ok(SearchOutcome::NotFound {
                        charlie: c,
                        sender: k,
                        vacuous: false,
                        detail: format!("least-squares inverse deviates from unitarity by {dev:.3e}"),
                    })
                }
                Err(e) => return Err(e),
            }
        }
        entries.push(out_row);
    }
    let table = CorrectionTable::new(entries)?;

    let mut sampler = crate::qcore::random::Sampler::new(0x5eed);
    let probe = sampler.state(&[dp, d.max(2)]);
    let res = super::teleport::teleport_with(&setup, &table, &probe, Direction::Forward)?;
    if let Some(pos) = res.branches.iter().position(|b| b.fidelity.is_some_and(|f| f < 1.0 - ASSERT_TOL)) {
        return Ok(SearchOutcome::NotFound {
            charlie: pos / dp,
            sender: pos % dp,
            vacuous: false,
            detail: format!("verification failed with fidelity {:?}", res.branches[pos].fidelity),
        });
    }
    Ok(SearchOutcome::Found(table))
}
