use std::f64::consts::FRAC_1_SQRT_2;

use super::linalg::{hermitian_eigen, identity, max_abs_diff};
use super::{c, CMatrix, C64};
use crate::{Error, Result, ASSERT_TOL};

/// A square matrix with `U†U = I` within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: CMatrix,
}

impl Unitary {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", mat.nrows(), mat.ncols())));
        }
        let dev = max_abs_diff(&(mat.adjoint() * &mat), &identity(mat.nrows()));
        if dev > ASSERT_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Unitary { mat })
    }

    /// Row-major real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Unitary::new(CMatrix::from_fn(n, n, |r, col| c(rows[r][col], 0.0)))
    }

    pub fn from_diagonal(phases: &[C64]) -> Result<Self> {
        Unitary::new(CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(phases)))
    }

    /// Permutation matrix sending `|i⟩` to `|image[i]⟩`.
    pub fn permutation(image: &[usize]) -> Result<Self> {
        let n = image.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &j) in image.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidInput(format!("image {j} out of range")));
            }
            m[(j, i)] = c(1.0, 0.0);
        }
        Unitary::new(m)
    }

    pub fn identity(d: usize) -> Self {
        Unitary { mat: identity(d) }
    }

    pub fn pauli_x() -> Self {
        Unitary { mat: CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]) }
    }

    pub fn pauli_y() -> Self {
        Unitary { mat: CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]) }
    }

    pub fn pauli_z() -> Self {
        Unitary { mat: CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]) }
    }

    /// `iσ_y = [[0, 1], [-1, 0]]`.
    pub fn i_sigma_y() -> Self {
        Unitary { mat: CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]) }
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Unitary { mat: CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { mat: self.mat.adjoint() }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Unitary) -> Result<Unitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(Unitary { mat: &self.mat * &other.mat })
    }

    pub fn kron(&self, other: &Unitary) -> Unitary {
        Unitary { mat: self.mat.kronecker(&other.mat) }
    }

    /// `|tr(A†B)| / d`, which is 1 exactly when the two agree up to a global phase.
    pub fn phase_overlap(&self, other: &Unitary) -> f64 {
        if self.dim() != other.dim() {
            return 0.0;
        }
        (self.mat.adjoint() * &other.mat).trace().norm() / self.dim() as f64
    }

    pub fn equal_up_to_phase(&self, other: &Unitary, tol: f64) -> bool {
        (1.0 - self.phase_overlap(other)).abs() <= tol
    }
}

/// A completely positive map in Kraus form with `Σ K†K ≼ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
    trace_preserving: bool,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidInput("no Kraus operators".into()))?;
        let (out_dim, in_dim) = first.shape();
        if kraus.iter().any(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let (vals, _) = hermitian_eigen(&sum);
        let max = *vals.last().expect("nonempty");
        if max > 1.0 + ASSERT_TOL {
            return Err(Error::TraceIncreasing(max - 1.0));
        }
        let trace_preserving = max_abs_diff(&sum, &identity(in_dim)) <= ASSERT_TOL;
        Ok(KrausChannel { in_dim, out_dim, kraus, trace_preserving })
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel { in_dim: d, out_dim: d, kraus: vec![identity(d)], trace_preserving: true }
    }

    pub fn from_unitary(u: &Unitary) -> Self {
        KrausChannel { in_dim: u.dim(), out_dim: u.dim(), kraus: vec![u.matrix().clone()], trace_preserving: true }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {} but operator is {}x{}",
                self.in_dim,
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        Ok(out)
    }
}

/// An orthonormal basis of `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<Vec<C64>>,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(format!("need {d} vectors of length {d}")));
        }
        let mut dev: f64 = 0.0;
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((ip - c(target, 0.0)).norm());
            }
        }
        if dev > ASSERT_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Basis { vectors })
    }

    pub fn computational(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| (0..d).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
            .collect();
        Basis { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[C64] {
        &self.vectors[i]
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                dev = dev.max((ip - c(if i == j { 1.0 } else { 0.0 }, 0.0)).norm());
            }
        }
        dev
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paulis_are_unitary_and_related() {
        for u in [Unitary::pauli_x(), Unitary::pauli_y(), Unitary::pauli_z(), Unitary::i_sigma_y(), Unitary::hadamard()] {
            assert!(Unitary::new(u.matrix().clone()).is_ok());
        }
        // iσy differs from σy only by a phase
        assert!(Unitary::pauli_y().equal_up_to_phase(&Unitary::i_sigma_y(), 1e-12));
        assert!(!Unitary::pauli_x().equal_up_to_phase(&Unitary::pauli_z(), 1e-3));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary(_))));
        assert!(matches!(Unitary::new(CMatrix::zeros(2, 3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn permutation_maps_basis() {
        let p = Unitary::permutation(&[2, 0, 1]).unwrap();
        assert_eq!(p.matrix()[(2, 0)], c(1.0, 0.0));
        assert_eq!(p.matrix()[(0, 1)], c(1.0, 0.0));
    }

    #[test]
    fn kraus_validation() {
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let ch = KrausChannel::new(vec![half.clone()]).unwrap();
        assert!(!ch.is_trace_preserving());
        assert!(matches!(KrausChannel::new(vec![half.clone() * c(3.0, 0.0)]), Err(Error::TraceIncreasing(_))));
        assert!(KrausChannel::identity(3).is_trace_preserving());
        assert!(matches!(KrausChannel::new(vec![]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn basis_checks() {
        assert!(Basis::computational(4).orthonormality_defect() == 0.0);
        let bad = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(Basis::new(bad), Err(Error::NotOrthonormal(_))));
    }
}
