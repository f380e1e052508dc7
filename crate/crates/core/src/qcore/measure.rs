use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{norm_sqr, PureState};
use super::tensor;
use super::{Basis, C64};
use crate::{Error, Result, NULL_PROBABILITY};

/// One outcome of a projective measurement.
///
/// `state` is `None` when the outcome has probability below 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub index: usize,
    pub probability: f64,
    pub state: Option<PureState>,
}

impl MeasurementOutcome {
    pub fn is_null(&self) -> bool {
        self.state.is_none()
    }
}

fn check_basis(state: &PureState, target: usize, basis: &Basis) -> Result<()> {
    tensor::check_targets(state.dims(), &[target])?;
    if basis.dim() != state.dims()[target] {
        return Err(Error::DimensionMismatch(format!(
            "basis of dimension {} on subsystem {target} of dimension {}",
            basis.dim(),
            state.dims()[target]
        )));
    }
    Ok(())
}

/// All outcomes of measuring `target` in `basis`, each collapsed state keeping
/// the measured subsystem (projected onto the basis vector).
pub fn measure_exhaustive(state: &PureState, target: usize, basis: &Basis) -> Result<Vec<MeasurementOutcome>> {
    check_basis(state, target, basis)?;
    let mut out = Vec::with_capacity(basis.dim());
    for (index, v) in basis.vectors().iter().enumerate() {
        let (_, rest) = tensor::contract(state.dims(), state.amps(), target, v)?;
        let probability = norm_sqr(&rest);
        let collapsed = (probability >= NULL_PROBABILITY).then(|| {
            // re-insert |v⟩ at the target position
            let dims = state.dims();
            let st = tensor::strides(dims);
            let inner = st[target];
            let outer: usize = dims[..target].iter().product();
            let scale = 1.0 / probability.sqrt();
            let mut amps = vec![C64::new(0.0, 0.0); state.amps().len()];
            for hi in 0..outer {
                for lo in 0..inner {
                    let r = rest[hi * inner + lo] * scale;
                    for (digit, vd) in v.iter().enumerate() {
                        amps[hi * dims[target] * inner + digit * inner + lo] = vd * r;
                    }
                }
            }
            PureState::from_parts_unchecked(dims.to_vec(), amps)
        });
        out.push(MeasurementOutcome { index, probability, state: collapsed });
    }
    Ok(out)
}

/// Like [`measure_exhaustive`] but the measured subsystem is removed from
/// each collapsed state.
pub fn measure_and_discard(state: &PureState, target: usize, basis: &Basis) -> Result<Vec<MeasurementOutcome>> {
    check_basis(state, target, basis)?;
    if state.num_subsystems() < 2 {
        return Err(Error::InvalidPartition("cannot discard the only subsystem".into()));
    }
    basis
        .vectors()
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let (dims, rest) = tensor::contract(state.dims(), state.amps(), target, v)?;
            let probability = norm_sqr(&rest);
            let state = (probability >= NULL_PROBABILITY)
                .then(|| PureState::normalized(dims, rest))
                .transpose()?;
            Ok(MeasurementOutcome { index, probability, state })
        })
        .collect()
}

/// Draws one outcome from the exhaustive distribution with a seeded generator.
pub fn sample_measurement(state: &PureState, target: usize, basis: &Basis, seed: u64) -> Result<(usize, PureState)> {
    let outcomes = measure_exhaustive(state, target, basis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for o in outcomes {
        if o.is_null() {
            continue;
        }
        acc += o.probability;
        let hit = u < acc;
        last = Some(o);
        if hit {
            break;
        }
    }
    let o = last.expect("a normalized state has at least one non-null outcome");
    Ok((o.index, o.state.expect("non-null")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::Sampler;
    use crate::qcore::{c, fidelity};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell1() -> PureState {
        PureState::new(vec![2, 2], vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    fn plus_minus() -> Basis {
        let h = FRAC_1_SQRT_2;
        Basis::new(vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]).unwrap()
    }

    #[test]
    fn bell_in_computational_basis() {
        let out = measure_exhaustive(&bell1(), 0, &Basis::computational(2)).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[0].probability - 0.5).abs() < 1e-12);
        assert!((out[1].probability - 0.5).abs() < 1e-12);
        assert_eq!(out[0].state.as_ref().unwrap(), &PureState::basis(vec![2, 2], &[0, 0]).unwrap());
        let s11 = out[1].state.as_ref().unwrap();
        assert!((fidelity(s11, &PureState::basis(vec![2, 2], &[1, 1]).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_outcome_reports_null() {
        let psi = Sampler::new(1).state(&[3]);
        let s = PureState::ket(2, 0).unwrap().tensor(&psi);
        let out = measure_exhaustive(&s, 0, &Basis::computational(2)).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-12);
        assert_eq!(out[0].state.as_ref().unwrap(), &s);
        assert_eq!(out[1].probability, 0.0);
        assert!(out[1].is_null());
    }

    #[test]
    fn mass_superposition_collapses_to_plus_minus_branches() {
        // (|0⟩_M U1ψ U2φ + |1⟩_M U2ψ U1φ)/√2 with U1 = I, U2 = σx, ψ = φ = |0⟩
        let a = PureState::basis(vec![2, 2, 2], &[0, 0, 1]).unwrap();
        let b = PureState::basis(vec![2, 2, 2], &[1, 1, 0]).unwrap();
        let joint: Vec<C64> = a.amps().iter().zip(b.amps()).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
        let joint = PureState::new(vec![2, 2, 2], joint).unwrap();
        let out = measure_and_discard(&joint, 0, &plus_minus()).unwrap();
        let h = FRAC_1_SQRT_2;
        let plus = PureState::new(vec![2, 2], vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        let minus = PureState::new(vec![2, 2], vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((out[0].probability - 0.5).abs() < 1e-12);
        assert!((out[1].probability - 0.5).abs() < 1e-12);
        assert!((out[0].state.as_ref().unwrap().inner(&plus).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((out[1].state.as_ref().unwrap().inner(&minus).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one_on_random_states() {
        let mut s = Sampler::new(77);
        for _ in 0..1000 {
            let st = s.state(&[3, 2, 2]);
            let u = s.unitary(3);
            let basis = Basis::new((0..3).map(|i| u.matrix().column(i).iter().copied().collect()).collect()).unwrap();
            let total: f64 = measure_exhaustive(&st, 0, &basis).unwrap().iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let b = bell1();
        let basis = Basis::computational(2);
        assert_eq!(sample_measurement(&b, 0, &basis, 42).unwrap(), sample_measurement(&b, 0, &basis, 42).unwrap());
        let zero = PureState::ket(2, 0).unwrap().tensor(&PureState::ket(2, 1).unwrap());
        for seed in 0..200 {
            assert_eq!(sample_measurement(&zero, 0, &basis, seed).unwrap().0, 0);
        }
    }

    #[test]
    fn sampled_frequency_matches_distribution() {
        let b = bell1();
        let basis = Basis::computational(2);
        let n = 100_000u64;
        let ones = (0..n).filter(|&s| sample_measurement(&b, 0, &basis, s).unwrap().0 == 1).count();
        let freq = ones as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");
    }

    #[test]
    fn measurement_errors() {
        assert!(matches!(measure_exhaustive(&bell1(), 0, &Basis::computational(3)), Err(Error::DimensionMismatch(_))));
        assert!(matches!(measure_and_discard(&PureState::ket(2, 0).unwrap(), 0, &Basis::computational(2)), Err(Error::InvalidPartition(_))));
    }
}
