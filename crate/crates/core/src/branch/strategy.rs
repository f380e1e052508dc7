use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qcore::io::{matrix_to_json, unitary_from_json, JsonMatrix};
use crate::qcore::Unitary;
use crate::spacetime::order_labels;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
        })
    }
}

/// Named unitaries available to a strategy. Read-only once built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnitaryRegistry {
    map: BTreeMap<String, Unitary>,
}

impl UnitaryRegistry {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Unitary)>,
        S: Into<String>,
    {
        UnitaryRegistry { map: entries.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    /// `U1..Um` from a list.
    pub fn indexed(unitaries: Vec<Unitary>) -> Self {
        Self::new(unitaries.into_iter().enumerate().map(|(i, u)| (format!("U{}", i + 1), u)))
    }

    pub fn get(&self, label: &str) -> Result<&Unitary> {
        self.map.get(label).ok_or_else(|| Error::UnknownUnitary(label.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// What a party does when it has received exactly `received` before an event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub received: BTreeSet<String>,
    pub unitary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Rule {
    pub fn new(received: &[&str], unitary: &str, message: Option<&str>) -> Self {
        Rule {
            received: received.iter().map(|s| s.to_string()).collect(),
            unitary: unitary.to_string(),
            targets: None,
            message: message.map(str::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalEvent {
    pub name: String,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartySpec {
    pub party: Party,
    /// Subsystems this party acts on unless a rule overrides them.
    pub targets: Vec<usize>,
    /// Local events in proper-time order.
    pub events: Vec<LocalEvent>,
}

/// A total order of all events of all parties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalOrder {
    pub label: String,
    pub sequence: Vec<String>,
}

/// One resolved event of a branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub event: String,
    pub party: Party,
    pub received: Vec<String>,
    pub unitary: String,
    pub targets: Vec<usize>,
    pub message: Option<String>,
}

pub type Plan = Vec<PlanStep>;

/// Local rules for each party, the set of causal orders they are run under,
/// and the unitaries the rules refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingStrategy {
    parties: Vec<PartySpec>,
    orders: Vec<CausalOrder>,
    registry: UnitaryRegistry,
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    parties: Vec<PartySpec>,
    orders: Vec<CausalOrder>,
    #[serde(default)]
    unitaries: BTreeMap<String, JsonMatrix>,
}

impl SignalingStrategy {
    /// Validates event names, local order inside every causal order, and that
    /// every rule label resolves.
    pub fn new(parties: Vec<PartySpec>, orders: Vec<CausalOrder>, registry: UnitaryRegistry) -> Result<Self> {
        let mut owner = BTreeMap::new();
        for p in &parties {
            if parties.iter().filter(|q| q.party == p.party).count() > 1 {
                return Err(Error::InvalidInput(format!("party {} listed twice", p.party)));
            }
            for ev in &p.events {
                if owner.insert(ev.name.clone(), p.party).is_some() {
                    return Err(Error::InvalidInput(format!("event {} declared twice", ev.name)));
                }
                for r in &ev.rules {
                    registry.get(&r.unitary)?;
                }
            }
        }
        if orders.is_empty() {
            return Err(Error::InvalidInput("no causal orders".into()));
        }
        for o in &orders {
            let mut seen = BTreeSet::new();
            for e in &o.sequence {
                if !owner.contains_key(e) || !seen.insert(e) {
                    return Err(Error::InvalidInput(format!("order {}: unknown or repeated event {e}", o.label)));
                }
            }
            if seen.len() != owner.len() {
                return Err(Error::InvalidInput(format!("order {} omits events", o.label)));
            }
            for p in &parties {
                let local: Vec<&String> = o.sequence.iter().filter(|e| owner[*e] == p.party).collect();
                if local.iter().zip(&p.events).any(|(a, b)| **a != b.name) {
                    return Err(Error::InvalidInput(format!(
                        "order {} reorders the local events of {}",
                        o.label, p.party
                    )));
                }
            }
        }
        Ok(SignalingStrategy { parties, orders, registry })
    }

    pub fn parties(&self) -> &[PartySpec] {
        &self.parties
    }

    pub fn orders(&self) -> &[CausalOrder] {
        &self.orders
    }

    pub fn registry(&self) -> &UnitaryRegistry {
        &self.registry
    }

    pub fn targets(&self, party: Party) -> Option<&[usize]> {
        self.parties.iter().find(|p| p.party == party).map(|p| p.targets.as_slice())
    }

    /// Same rules and orders with a different set of unitaries.
    pub fn with_registry(&self, registry: UnitaryRegistry) -> Result<Self> {
        Self::new(self.parties.clone(), self.orders.clone(), registry)
    }

    /// Same rules and unitaries with different subsystem assignments.
    pub fn with_targets(&self, party: Party, targets: Vec<usize>) -> Self {
        let mut out = self.clone();
        for p in out.parties.iter_mut().filter(|p| p.party == party) {
            p.targets = targets.clone();
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StrategyFile = serde_json::from_str(text)?;
        let registry = file
            .unitaries
            .iter()
            .map(|(k, v)| Ok((k.clone(), unitary_from_json(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.parties, file.orders, UnitaryRegistry::new(registry))
    }

    pub fn to_json(&self) -> String {
        let file = StrategyFile {
            parties: self.parties.clone(),
            orders: self.orders.clone(),
            unitaries: self.registry.map.iter().map(|(k, u)| (k.clone(), matrix_to_json(u.matrix()))).collect(),
        };
        serde_json::to_string_pretty(&file).expect("strategy serializes")
    }

    /// Alice's events `X1..X_{m−1}` and Bob's `Y`; the order with `k` Alice
    /// events before `Y` is branch `m − 1 − k`.
    ///
    /// Alice announces each event as `x{i}` unless she has heard from Bob.
    /// Bob, having seen `k` announcements, applies `U{k+1}` and replies
    /// `y{k}`. Alice's event `X{i}` applies `U{i+1}` when the reply is
    /// `y{i−1}` and `U1` otherwise. Branch `0` thus acts as `U1` on Alice and
    /// `Um` on Bob, branch `i ≥ 1` as `U{m+1−i}` on Alice and `U{m−i}` on Bob.
    pub fn ladder(m: usize, registry: UnitaryRegistry, alice: Vec<usize>, bob: Vec<usize>) -> Result<Self> {
        if !(2..=6).contains(&m) {
            return Err(Error::Unsupported(format!("ladder strategy for m = {m}")));
        }
        let name = |i: usize| if m == 2 { "X".to_string() } else { format!("X{i}") };
        let u = |i: usize| format!("U{i}");
        let alice_events = (1..m)
            .map(|i| {
                let mut rules = vec![Rule {
                    received: BTreeSet::new(),
                    unitary: u(1),
                    targets: None,
                    message: Some(format!("x{i}")),
                }];
                for k in 0..i {
                    let unitary = if k + 1 == i { u(i + 1) } else { u(1) };
                    rules.push(Rule {
                        received: BTreeSet::from([format!("y{k}")]),
                        unitary,
                        targets: None,
                        message: None,
                    });
                }
                LocalEvent { name: name(i), rules }
            })
            .collect();
        let bob_rules = (0..m)
            .map(|k| Rule {
                received: (1..=k).map(|i| format!("x{i}")).collect(),
                unitary: u(k + 1),
                targets: None,
                message: Some(format!("y{k}")),
            })
            .collect();
        let orders = order_labels(m)
            .into_iter()
            .enumerate()
            .map(|(b, label)| {
                let before = m - 1 - b;
                let mut sequence: Vec<String> = (1..=before).map(name).collect();
                sequence.push("Y".into());
                sequence.extend((before + 1..m).map(name));
                CausalOrder { label, sequence }
            })
            .collect();
        Self::new(
            vec![
                PartySpec { party: Party::Alice, targets: alice, events: alice_events },
                PartySpec { party: Party::Bob, targets: bob, events: vec![LocalEvent { name: "Y".into(), rules: bob_rules }] },
            ],
            orders,
            registry,
        )
    }

    /// Both parties apply `u2` if they heard from the other, `u1` otherwise.
    pub fn two_ics(u1: Unitary, u2: Unitary, alice: Vec<usize>, bob: Vec<usize>) -> Result<Self> {
        Self::ladder(2, UnitaryRegistry::indexed(vec![u1, u2]), alice, bob)
    }
}

/// Replays `order`, resolving each event against the messages other parties
/// emitted at strictly earlier events.
pub fn simulate_messages(strategy: &SignalingStrategy, order: &CausalOrder) -> Result<Plan> {
    let mut sent: Vec<(Party, String)> = Vec::new();
    let mut plan = Vec::with_capacity(order.sequence.len());
    for name in &order.sequence {
        let (spec, event) = strategy
            .parties
            .iter()
            .find_map(|p| p.events.iter().find(|e| &e.name == name).map(|e| (p, e)))
            .ok_or_else(|| Error::InvalidInput(format!("unknown event {name}")))?;
        let received: BTreeSet<String> =
            sent.iter().filter(|(from, _)| *from != spec.party).map(|(_, m)| m.clone()).collect();
        let rule = event.rules.iter().find(|r| r.received == received).ok_or_else(|| Error::StrategyIncomplete {
            event: name.clone(),
            received: received.iter().cloned().collect(),
        })?;
        if let Some(msg) = &rule.message {
            sent.push((spec.party, msg.clone()));
        }
        plan.push(PlanStep {
            event: name.clone(),
            party: spec.party,
            received: received.into_iter().collect(),
            unitary: rule.unitary.clone(),
            targets: rule.targets.clone().unwrap_or_else(|| spec.targets.clone()),
            message: rule.message.clone(),
        });
    }
    Ok(plan)
}

/// Plans for every declared order, in declaration order.
pub fn simulate_all(strategy: &SignalingStrategy) -> Result<Vec<Plan>> {
    strategy.orders.iter().map(|o| simulate_messages(strategy, o)).collect()
}
