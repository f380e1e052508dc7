use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::strategy::{simulate_all, Plan, SignalingStrategy, UnitaryRegistry};
use crate::qcore::state::check_dims;
use crate::qcore::{entanglement_entropy, measure_and_discard, tensor, Basis, CMatrix, PureState, Unitary, C64};
use crate::{Error, Result, ASSERT_TOL};

/// Dense matrix of a branch: event unitaries embedded on their targets,
/// earliest event rightmost.
pub fn compose_branch(plan: &Plan, registry: &UnitaryRegistry, dims: &[usize]) -> Result<Unitary> {
    let total = check_dims(dims)?;
    let mut columns: Vec<Vec<C64>> = (0..total)
        .map(|j| {
            let mut v = vec![C64::new(0.0, 0.0); total];
            v[j] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    for step in plan {
        let u = registry.get(&step.unitary)?;
        for col in columns.iter_mut() {
            *col = tensor::apply_on(dims, col, u.matrix(), &step.targets)?;
        }
    }
    let mat = CMatrix::from_fn(total, total, |r, c| columns[c][r]);
    Unitary::new(mat)
}

/// `W|state⟩` without forming `W`.
pub fn apply_plan(plan: &Plan, registry: &UnitaryRegistry, state: &PureState) -> Result<PureState> {
    plan.iter().try_fold(state.clone(), |s, step| s.apply(registry.get(&step.unitary)?, &step.targets))
}

/// `(|0⟩ ± |1⟩)/√2` for m = 2, the cube-root-of-unity Fourier basis for
/// m = 3, and the ±1 sign-pattern basis for m = 4.
pub fn standard_mass_basis(m: usize) -> Result<Basis> {
    let r = |v: f64| C64::new(v, 0.0);
    let vectors = match m {
        2 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![vec![r(h), r(h)], vec![r(h), r(-h)]]
        }
        3 => {
            let s = 1.0 / 3f64.sqrt();
            let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
            let w2 = C64::from_polar(1.0, 4.0 * PI / 3.0);
            vec![vec![r(s), r(s), r(s)], vec![r(s), w * s, w2 * s], vec![r(s), w2 * s, w * s]]
        }
        4 => [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, -1.0, 1.0], [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0]]
            .iter()
            .map(|row| row.iter().map(|&x| r(x / 2.0)).collect())
            .collect(),
        _ => return Err(Error::Unsupported(format!("no standard mass basis for m = {m}"))),
    };
    Basis::new(vectors)
}

/// Names of Charlie's outcomes in the standard basis.
pub fn mass_outcome_labels(m: usize) -> Vec<String> {
    match m {
        2 => vec!["+".into(), "-".into()],
        _ => (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect(),
    }
}

/// The mass degree of freedom: amplitudes over the causal-order basis and the
/// basis Charlie measures in.
#[derive(Debug, Clone, PartialEq)]
pub struct MassRegister {
    amps: Vec<C64>,
    basis: Basis,
}

impl MassRegister {
    pub fn new(amps: Vec<C64>, basis: Basis) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} mass amplitudes but a basis of dimension {}",
                amps.len(),
                basis.dim()
            )));
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > ASSERT_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(MassRegister { amps, basis })
    }

    /// Equal weight on every order, measured in the standard basis. This is
    /// the first vector of that basis.
    pub fn uniform(m: usize) -> Result<Self> {
        let basis = standard_mass_basis(m)?;
        let amps = basis.vector(0).to_vec();
        Self::new(amps, basis)
    }

    /// All weight on one order.
    pub fn definite(m: usize, order: usize) -> Result<Self> {
        let basis = standard_mass_basis(m)?;
        let mut amps = vec![C64::new(0.0, 0.0); m];
        *amps.get_mut(order).ok_or(Error::IndexOutOfRange { index: order, count: m })? = C64::new(1.0, 0.0);
        Self::new(amps, basis)
    }

    pub fn m(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Same basis, different amplitudes.
    pub fn with_amps(&self, amps: Vec<C64>) -> Result<Self> {
        Self::new(amps, self.basis.clone())
    }
}

/// `Σ_k amps_k |k⟩ ⊗ W_k|input⟩`, mass as subsystem 0.
pub fn run_superposed(mass: &MassRegister, strategy: &SignalingStrategy, input: &PureState) -> Result<PureState> {
    let plans = simulate_all(strategy)?;
    if plans.len() != mass.m() {
        return Err(Error::DimensionMismatch(format!(
            "mass register has {} branches but the strategy has {} orders",
            mass.m(),
            plans.len()
        )));
    }
    let mut dims = vec![mass.m()];
    dims.extend_from_slice(input.dims());
    check_dims(&dims)?;
    let mut amps = Vec::with_capacity(mass.m() * input.amps().len());
    for (plan, a) in plans.iter().zip(mass.amps()) {
        let branch = apply_plan(plan, strategy.registry(), input)?;
        amps.extend(branch.amps().iter().map(|x| a * x));
    }
    PureState::normalized(dims, amps)
}

/// One outcome of Charlie's measurement on the mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassOutcome {
    pub index: usize,
    pub label: String,
    pub probability: f64,
    /// The system with the mass removed; `None` for null outcomes.
    #[serde(skip)]
    pub system: Option<PureState>,
    /// The mass after the measurement, i.e. the measured basis vector.
    #[serde(skip)]
    pub mass_state: Vec<C64>,
}

/// Measures subsystem 0 of `joint` in `basis`.
pub fn measure_mass(joint: &PureState, basis: &Basis) -> Result<Vec<MassOutcome>> {
    let labels = if (2..=4).contains(&basis.dim()) {
        mass_outcome_labels(basis.dim())
    } else {
        (0..basis.dim()).map(|i| i.to_string()).collect()
    };
    Ok(measure_and_discard(joint, 0, basis)?
        .into_iter()
        .map(|o| MassOutcome {
            index: o.index,
            label: labels[o.index].clone(),
            probability: o.probability,
            system: o.state,
            mass_state: basis.vector(o.index).to_vec(),
        })
        .collect())
}

/// Entanglement entropy across the Alice|rest cut of `input` and of every
/// branch `W_k|input⟩`.
pub fn branch_entropies(strategy: &SignalingStrategy, input: &PureState, part: &[usize]) -> Result<(f64, Vec<f64>)> {
    let before = entanglement_entropy(input, part)?;
    let after = simulate_all(strategy)?
        .iter()
        .map(|plan| entanglement_entropy(&apply_plan(plan, strategy.registry(), input)?, part))
        .collect::<Result<Vec<_>>>()?;
    Ok((before, after))
}
