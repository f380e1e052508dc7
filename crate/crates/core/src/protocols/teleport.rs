use serde::Serialize;

use super::result::{Branch, ProtocolResult, TranscriptEntry};
use super::tables::{ics_unitaries, CorrectionTable, Direction};
use crate::branch::{mass_outcome_labels, measure_mass, run_superposed, MassRegister, SignalingStrategy, UnitaryRegistry};
use crate::qcore::{fidelity, measure_and_discard, Basis, CMatrix, DensityState, KrausChannel, PureState, C64};
use crate::{Error, Result, NULL_PROBABILITY};

/// The shared ingredients of an m-order teleportation: the strategy
/// unitaries, the mass state and Charlie's measurement basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IcsSetup {
    pub unitaries: Vec<crate::qcore::Unitary>,
    pub mass: MassRegister,
}

impl IcsSetup {
    pub fn standard(m: usize) -> Result<Self> {
        Ok(IcsSetup { unitaries: ics_unitaries(m)?, mass: MassRegister::uniform(m)? })
    }

    pub fn m(&self) -> usize {
        self.mass.m()
    }

    /// Register dimension of sender and receiver.
    pub fn dim(&self) -> usize {
        self.unitaries[0].dim()
    }

    fn strategy(&self, alice: Vec<usize>, bob: Vec<usize>) -> Result<SignalingStrategy> {
        SignalingStrategy::ladder(self.m(), UnitaryRegistry::indexed(self.unitaries.clone()), alice, bob)
    }

    fn charlie_labels(&self) -> Vec<String> {
        if (2..=4).contains(&self.m()) {
            mass_outcome_labels(self.m())
        } else {
            (0..self.m()).map(|i| i.to_string()).collect()
        }
    }
}

/// A post-measurement system state per (Charlie, sender) outcome, with the
/// receiver's register moved to subsystem 0 and the sender's removed.
pub(crate) struct RawBranch {
    pub charlie: usize,
    pub sender: usize,
    pub probability: f64,
    pub state: Option<PureState>,
}

pub(crate) fn raw_branches(setup: &IcsSetup, input: &PureState, direction: Direction) -> Result<Vec<RawBranch>> {
    let dp = setup.dim();
    if input.num_subsystems() < 2 || input.dims()[0] != dp {
        return Err(Error::DimensionMismatch(format!(
            "input dims {:?} must start with a {dp}-level register followed by the receiver's system",
            input.dims()
        )));
    }
    let rest = input.dims()[1..].iter().product::<usize>();
    let input = input.reshape(vec![dp, rest])?;
    let ancilla = PureState::ket(dp, 0)?;
    // forward: (A, B, B'), backward: (A, B', B)
    let (system, strategy, sender_pos, reorder) = match direction {
        Direction::Forward => (input.tensor(&ancilla), setup.strategy(vec![0], vec![2])?, 0, Some([1, 0])),
        Direction::Backward => (ancilla.tensor(&input), setup.strategy(vec![0], vec![1])?, 1, None),
    };
    let joint = run_superposed(&setup.mass, &strategy, &system)?;
    let sender_basis = Basis::computational(dp);
    let mut out = Vec::with_capacity(setup.m() * dp);
    for c in measure_mass(&joint, setup.mass.basis())? {
        let Some(sys) = c.system else {
            out.extend((0..dp).map(|k| RawBranch { charlie: c.index, sender: k, probability: 0.0, state: None }));
            continue;
        };
        for k in measure_and_discard(&sys, sender_pos, &sender_basis)? {
            let state = match (k.state, reorder) {
                (Some(s), Some(order)) => Some(s.permute(&order)?),
                (s, _) => s,
            };
            out.push(RawBranch { charlie: c.index, sender: k.index, probability: c.probability * k.probability, state });
        }
    }
    Ok(out)
}

/// Teleports the first register of `input` with the given table.
///
/// Forward: `input` is (A, B) and the register lands on Bob's ancilla B'.
/// Backward: `input` is (B', B) and the register lands on Alice's A, which
/// starts in `|0⟩`.
pub fn teleport_with(setup: &IcsSetup, table: &CorrectionTable, input: &PureState, direction: Direction) -> Result<ProtocolResult> {
    let m = setup.m();
    if table.charlie_outcomes() != m || table.sender_outcomes() != setup.dim() || table.dim() != setup.dim() {
        return Err(Error::DimensionMismatch("correction table does not fit the setup".into()));
    }
    let labels = setup.charlie_labels();
    let (sender, receiver, reg) = match direction {
        Direction::Forward => ("Alice", "Bob", "A"),
        Direction::Backward => ("Bob", "Alice", "B'"),
    };
    let target = input.reshape(vec![input.dims()[0], input.dims()[1..].iter().product()])?;
    let mut branches = Vec::new();
    for raw in raw_branches(setup, input, direction)? {
        let mut transcript = Vec::new();
        if direction == Direction::Backward {
            transcript.push(TranscriptEntry::new("Alice", "reset A to |0>"));
            transcript.push(TranscriptEntry::new("Charlie", format!("reset mass to |{}>", labels[0])));
        }
        let outcomes = vec![labels[raw.charlie].clone(), raw.sender.to_string()];
        transcript.push(TranscriptEntry::new("Charlie", "measure mass").outcome(&outcomes[0], raw.probability));
        transcript.push(TranscriptEntry::new(sender, format!("measure {reg}")).outcome(&outcomes[1], raw.probability));
        let Some(state) = raw.state.filter(|_| raw.probability >= NULL_PROBABILITY) else {
            branches.push(Branch { outcomes, probability: raw.probability, fidelity: None, correction: None, transcript, state: None });
            continue;
        };
        let corr = table.get(raw.charlie, raw.sender)?;
        transcript.push(TranscriptEntry::new(receiver, format!("apply {}", corr.name)));
        let corrected = state.apply(&corr.unitary, &[0])?;
        let f = fidelity(&corrected, &target)?;
        branches.push(Branch {
            outcomes,
            probability: raw.probability,
            fidelity: Some(f),
            correction: Some(corr.name.clone()),
            transcript,
            state: Some(corrected),
        });
    }
    let name = match direction {
        Direction::Forward => format!("teleport_{m}ics"),
        Direction::Backward => format!("backteleport_{m}ics"),
    };
    Ok(ProtocolResult::new(name, branches))
}

/// Standard m-order teleportation in either direction.
pub fn teleport(m: usize, input: &PureState, direction: Direction) -> Result<ProtocolResult> {
    teleport_with(&IcsSetup::standard(m)?, &CorrectionTable::standard(m, direction)?, input, direction)
}

pub fn teleport_2ics(input: &PureState) -> Result<ProtocolResult> {
    teleport(2, input, Direction::Forward)
}

pub fn backteleport_2ics(input: &PureState) -> Result<ProtocolResult> {
    teleport(2, input, Direction::Backward)
}

pub fn teleport_3ics(input: &PureState, direction: Direction) -> Result<ProtocolResult> {
    teleport(3, input, direction)
}

pub fn teleport_4ics(input: &PureState, direction: Direction) -> Result<ProtocolResult> {
    teleport(4, input, direction)
}

/// Forward then backward teleportation; one branch per pair of outcomes.
pub fn round_trip(m: usize, input: &PureState) -> Result<ProtocolResult> {
    let fwd = teleport(m, input, Direction::Forward)?;
    let target = input.reshape(vec![input.dims()[0], input.dims()[1..].iter().product()])?;
    let mut branches = Vec::new();
    for f in &fwd.branches {
        let Some(mid) = &f.state else { continue };
        let back = teleport(m, mid, Direction::Backward)?;
        for b in back.branches {
            let fid = b.state.as_ref().map(|s| fidelity(s, &target)).transpose()?;
            let mut outcomes = f.outcomes.clone();
            outcomes.extend(b.outcomes);
            let mut transcript = f.transcript.clone();
            transcript.extend(b.transcript);
            branches.push(Branch {
                outcomes,
                probability: f.probability * b.probability,
                fidelity: fid,
                correction: b.correction,
                transcript,
                state: b.state,
            });
        }
    }
    Ok(ProtocolResult::new(format!("round_trip_{m}ics"), branches))
}

/// Outcome of running a channel through teleport, local action, back-teleport.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRun {
    #[serde(skip)]
    pub output: DensityState,
    /// Trace of the unnormalized output; 1 for trace-preserving channels.
    pub success_probability: f64,
    pub paths: usize,
    pub min_path_fidelity: f64,
}

/// Applies `channel` to the shared state `rho` on (A, B) by teleporting A to
/// Bob, letting Bob act locally, and teleporting the register back.
///
/// The output is normalized; for a trace-decreasing channel its trace before
/// normalization is reported as `success_probability`.
pub fn implement_nonlocal_channel(rho: &DensityState, channel: &KrausChannel) -> Result<ChannelRun> {
    let dims = rho.dims().to_vec();
    if dims.len() != 2 || dims[0] != 2 {
        return Err(Error::DimensionMismatch(format!("expected a (2, d) state, got {dims:?}")));
    }
    let total = dims[0] * dims[1];
    if channel.in_dim() != total || channel.out_dim() != total {
        return Err(Error::DimensionMismatch(format!(
            "channel maps {} -> {} but the state has dimension {total}",
            channel.in_dim(),
            channel.out_dim()
        )));
    }
    let fwd_table = CorrectionTable::standard(2, Direction::Forward)?;
    let back_table = CorrectionTable::standard(2, Direction::Backward)?;
    let setup = IcsSetup::standard(2)?;
    let mut acc = CMatrix::zeros(total, total);
    let mut paths = 0;
    let mut min_fid = f64::INFINITY;
    for (weight, psi) in rho.eigen_ensemble() {
        let fwd = teleport_with(&setup, &fwd_table, &psi, Direction::Forward)?;
        for f in &fwd.branches {
            let Some(at_bob) = &f.state else { continue };
            min_fid = min_fid.min(f.fidelity.unwrap_or(0.0));
            let v = nalgebra::DVector::from_column_slice(at_bob.amps());
            for k in channel.kraus() {
                let out = k * &v;
                let norm2 = out.norm_squared();
                if norm2 < NULL_PROBABILITY {
                    continue;
                }
                let phi = PureState::normalized(dims.clone(), out.iter().copied().collect())?;
                let back = teleport_with(&setup, &back_table, &phi, Direction::Backward)?;
                for b in back.branches {
                    let Some(fin) = b.state else { continue };
                    min_fid = min_fid.min(b.fidelity.unwrap_or(0.0));
                    paths += 1;
                    let w = C64::new(weight * f.probability * norm2 * b.probability, 0.0);
                    let u = nalgebra::DVector::from_column_slice(fin.amps());
                    acc += (&u * u.adjoint()) * w;
                }
            }
        }
    }
    let trace = acc.trace().re;
    if trace < NULL_PROBABILITY {
        return Err(Error::InvalidInput("channel annihilates the input".into()));
    }
    acc.unscale_mut(trace);
    Ok(ChannelRun {
        output: DensityState::new(dims, acc)?,
        success_probability: trace,
        paths,
        min_path_fidelity: if min_fid.is_finite() { min_fid } else { 0.0 },
    })
}
