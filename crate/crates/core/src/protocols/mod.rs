//! End-to-end protocols built on the branch engine.

mod result;
mod search;
mod tables;
mod tasks;
mod teleport;

pub use result::{sample_index, Branch, ProtocolResult, TranscriptEntry};
pub use search::{search_corrections, SearchOutcome};
pub use tables::{ics_unitaries, Correction, CorrectionTable, Direction};
pub use tasks::{
    bell_state, discriminate_bell, entangle_2ics, nlwe_default_corpus, reduce_nlwe, unlock_smolin, BellBranch,
    BellReport, EntangleBranch, NlweReport, SmolinBranch, SmolinReport,
};
pub use teleport::{
    backteleport_2ics, implement_nonlocal_channel, round_trip, teleport, teleport_2ics, teleport_3ics, teleport_4ics,
    teleport_with, ChannelRun, IcsSetup,
};
