//! Signaling strategies replayed under each causal order, and the
//! mass-controlled superposition of the resulting branches.

mod strategy;
mod superpose;

pub use strategy::{
    simulate_all, simulate_messages, CausalOrder, LocalEvent, Party, PartySpec, Plan, PlanStep, Rule,
    SignalingStrategy, UnitaryRegistry,
};
pub use superpose::{
    apply_plan, branch_entropies, compose_branch, mass_outcome_labels, measure_mass, run_superposed,
    standard_mass_basis, MassOutcome, MassRegister,
};
