use std::fmt;

use super::density::DensityState;
use super::linalg::hermitian_eigen;
use super::tensor;
use super::{CMatrix, Unitary, C64, MAX_AMPLITUDES};
use crate::{Error, Result, ASSERT_TOL, EXACT_TOL};

/// A normalized state vector over an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

pub(crate) fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::DimensionMismatch("a state needs at least one subsystem".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::DimensionMismatch(format!("subsystem dimension {d} is below 2")));
    }
    let mut total: usize = 1;
    for &d in dims {
        total = total.checked_mul(d).filter(|&t| t <= MAX_AMPLITUDES).ok_or_else(|| {
            Error::Unsupported(format!("dims {dims:?} exceed {MAX_AMPLITUDES} amplitudes"))
        })?;
    }
    Ok(total)
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amps.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims:?} (expected {total})",
                amps.len()
            )));
        }
        let n2 = norm_sqr(&amps);
        if (n2 - 1.0).abs() > ASSERT_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(PureState { dims, amps })
    }

    /// Builds a state from an arbitrary nonzero vector, rescaling it to unit norm.
    pub fn normalized(dims: Vec<usize>, mut amps: Vec<C64>) -> Result<Self> {
        let n2 = norm_sqr(&amps);
        if n2 < EXACT_TOL * EXACT_TOL {
            return Err(Error::NotNormalized(n2));
        }
        let scale = 1.0 / n2.sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        PureState::new(dims, amps)
    }

    /// Computational basis state with the given digit per subsystem.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let total = check_dims(&dims)?;
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(&x, &d)| x >= d) {
            return Err(Error::InvalidInput(format!("digits {digits:?} invalid for dims {dims:?}")));
        }
        let st = tensor::strides(&dims);
        let k: usize = digits.iter().zip(&st).map(|(x, s)| x * s).sum();
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[k] = C64::new(1.0, 0.0);
        Ok(PureState { dims, amps })
    }

    /// Single-subsystem computational basis state `|index⟩` of dimension `dim`.
    pub fn ket(dim: usize, index: usize) -> Result<Self> {
        PureState::basis(vec![dim], &[index])
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amps: Vec<C64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        PureState { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState { dims, amps }
    }

    /// Applies `u` to the joint factor on `targets` (first target most significant).
    pub fn apply(&self, u: &Unitary, targets: &[usize]) -> Result<PureState> {
        let amps = tensor::apply_on(&self.dims, &self.amps, u.matrix(), targets)?;
        Ok(PureState { dims: self.dims.clone(), amps })
    }

    /// New subsystem `i` is old subsystem `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<PureState> {
        let (dims, amps) = tensor::permute(&self.dims, &self.amps, order)?;
        Ok(PureState { dims, amps })
    }

    /// Same amplitudes viewed over a different factorisation of the same space.
    pub fn reshape(&self, dims: Vec<usize>) -> Result<PureState> {
        let total = check_dims(&dims)?;
        if total != self.amps.len() {
            return Err(Error::DimensionMismatch(format!("cannot view {:?} as {dims:?}", self.dims)));
        }
        Ok(PureState { dims, amps: self.amps.clone() })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn to_density(&self) -> DensityState {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityState::from_parts_unchecked(self.dims.clone(), &v * v.adjoint())
    }

    /// Probability mass on each computational digit of `target`.
    pub fn marginal(&self, target: usize) -> Result<Vec<f64>> {
        tensor::check_targets(&self.dims, &[target])?;
        let st = tensor::strides(&self.dims);
        let mut p = vec![0.0; self.dims[target]];
        for (k, a) in self.amps.iter().enumerate() {
            p[(k / st[target]) % self.dims[target]] += a.norm_sqr();
        }
        Ok(p)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = tensor::strides(&self.dims);
        let mut first = true;
        for (k, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let digits: Vec<String> = st.iter().zip(&self.dims).map(|(s, d)| ((k / s) % d).to_string()).collect();
            write!(f, "({:.4}{:+.4}i)|{}⟩", a.re, a.im, digits.join(","))?;
        }
        Ok(())
    }
}

pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Von Neumann entropy (bits) of the reduced state on `part`.
pub fn entanglement_entropy(state: &PureState, part: &[usize]) -> Result<f64> {
    if part.is_empty() || part.len() >= state.dims.len() {
        return Err(Error::InvalidPartition(format!(
            "{part:?} is not a strict nonempty subset of {} subsystems",
            state.dims.len()
        )));
    }
    let m = tensor::bipartite_matrix(&state.dims, &state.amps, part)?;
    let rho: CMatrix = &m * m.adjoint();
    let (vals, _) = hermitian_eigen(&rho);
    let s: f64 = vals.iter().filter(|&&l| l > EXACT_TOL).map(|&l| -l * l.log2()).sum();
    let cap = (m.nrows().min(m.ncols()) as f64).log2();
    Ok(s.clamp(0.0, cap))
}
