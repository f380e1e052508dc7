use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::qcore::PureState;

/// One step of classical bookkeeping in a protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptEntry {
    pub actor: String,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
}

impl TranscriptEntry {
    pub fn new(actor: &str, action: impl Into<String>) -> Self {
        TranscriptEntry { actor: actor.into(), action: action.into(), outcome: None, probability: None }
    }

    pub fn outcome(mut self, outcome: impl Into<String>, probability: f64) -> Self {
        self.outcome = Some(outcome.into());
        self.probability = Some(probability);
        self
    }
}

/// One joint measurement outcome of a protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    /// Outcome labels in measurement order, e.g. Charlie's then the sender's.
    pub outcomes: Vec<String>,
    pub probability: f64,
    /// `None` for outcomes below the null-probability floor.
    pub fidelity: Option<f64>,
    pub correction: Option<String>,
    pub transcript: Vec<TranscriptEntry>,
    #[serde(skip)]
    pub state: Option<PureState>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub protocol: String,
    pub branches: Vec<Branch>,
    pub min_branch_fidelity: f64,
    pub probability_sum: f64,
}

impl ProtocolResult {
    pub fn new(protocol: impl Into<String>, branches: Vec<Branch>) -> Self {
        let min_branch_fidelity = branches.iter().filter_map(|b| b.fidelity).fold(f64::INFINITY, f64::min);
        let probability_sum = branches.iter().map(|b| b.probability).sum();
        ProtocolResult {
            protocol: protocol.into(),
            branches,
            min_branch_fidelity: if min_branch_fidelity.is_finite() { min_branch_fidelity } else { 0.0 },
            probability_sum,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.min_branch_fidelity >= 1.0 - tol && (self.probability_sum - 1.0).abs() <= tol
    }

    /// Index of one branch drawn according to the branch probabilities.
    pub fn sample_branch(&self, seed: u64) -> Option<usize> {
        let probs: Vec<f64> = self.branches.iter().map(|b| b.probability).collect();
        sample_index(&probs, seed)
    }

    /// Largest deviation of any branch probability from `p`.
    pub fn max_probability_deviation(&self, p: f64) -> f64 {
        self.branches.iter().map(|b| (b.probability - p).abs()).fold(0.0, f64::max)
    }
}

/// Draws an index with probability proportional to `weights`; `None` if all
/// weights vanish.
pub fn sample_index(weights: &[f64], seed: u64) -> Option<usize> {
    let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    let u = ChaCha8Rng::seed_from_u64(seed).random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate().filter(|(_, w)| **w > 0.0) {
        acc += w;
        last = Some(i);
        if u < acc {
            break;
        }
    }
    last
}
