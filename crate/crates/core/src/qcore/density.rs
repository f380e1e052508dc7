use super::linalg::{hermitian_eigen, max_abs_diff};
use super::state::{check_dims, PureState};
use super::tensor::{self, strides};
use super::{CMatrix, C64};
use crate::{Error, Result, ASSERT_TOL};

/// A density matrix over an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and positivity, all within 1e-10.
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        let total = check_dims(&dims)?;
        if mat.nrows() != total || mat.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} for dims {dims:?}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = max_abs_diff(&mat, &mat.adjoint());
        if herm > ASSERT_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > ASSERT_TOL || tr.im.abs() > ASSERT_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let (vals, _) = hermitian_eigen(&mat);
        if vals[0] < -ASSERT_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {:.3e}", vals[0])));
        }
        Ok(DensityState { dims, mat })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, mat: CMatrix) -> Self {
        DensityState { dims, mat }
    }

    /// `Σ_i w_i |ψ_i⟩⟨ψ_i|`; the weights must sum to one.
    pub fn mixture(items: &[(f64, PureState)]) -> Result<Self> {
        let first = items.first().ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        let dims = first.1.dims().to_vec();
        let n = first.1.amps().len();
        let mut mat = CMatrix::zeros(n, n);
        for (w, s) in items {
            if s.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch(format!("{:?} vs {dims:?}", s.dims())));
            }
            let v = nalgebra::DVector::from_column_slice(s.amps());
            mat += (&v * v.adjoint()) * C64::new(*w, 0.0);
        }
        DensityState::new(dims, mat)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.mat).0
    }

    /// Spectral decomposition as an ensemble of orthonormal pure states,
    /// largest weight first, dropping weights below 1e-14.
    pub fn eigen_ensemble(&self) -> Vec<(f64, PureState)> {
        let (vals, vecs) = hermitian_eigen(&self.mat);
        let mut out: Vec<(f64, PureState)> = vals
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 1e-14)
            .map(|(i, &w)| {
                let amps: Vec<C64> = vecs.column(i).iter().copied().collect();
                (w, PureState::normalized(self.dims.clone(), amps).expect("eigenvector has unit norm"))
            })
            .collect();
        out.reverse();
        out
    }

    /// Reduced state on `keep`; kept subsystems appear in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        if keep.is_empty() {
            return Err(Error::InvalidPartition("nothing kept".into()));
        }
        tensor::check_targets(&self.dims, keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let kd: usize = kept_dims.iter().product();
        let td: usize = traced_dims.iter().product();
        let st = strides(&self.dims);
        let kst = strides(&kept_dims);
        let tst = strides(&traced_dims);
        let full = |ki: usize, ti: usize| -> usize {
            let mut k = 0;
            for (j, &s) in keep.iter().enumerate() {
                k += ((ki / kst[j]) % kept_dims[j]) * st[s];
            }
            for (j, &s) in traced.iter().enumerate() {
                k += ((ti / tst[j]) % traced_dims[j]) * st[s];
            }
            k
        };
        let mut out = CMatrix::zeros(kd, kd);
        for r in 0..kd {
            for col in 0..kd {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..td {
                    acc += self.mat[(full(r, t), full(col, t))];
                }
                out[(r, col)] = acc;
            }
        }
        Ok(DensityState { dims: kept_dims, mat: out })
    }

    /// Transposes the indices of the subsystems in `part`.
    pub fn partial_transpose(&self, part: &[usize]) -> Result<CMatrix> {
        tensor::check_targets(&self.dims, part)?;
        let st = strides(&self.dims);
        let n = self.mat.nrows();
        let swap = |r: usize, col: usize| -> (usize, usize) {
            let (mut r2, mut c2) = (r, col);
            for &p in part {
                let dr = (r / st[p]) % self.dims[p];
                let dc = (col / st[p]) % self.dims[p];
                r2 = r2 - dr * st[p] + dc * st[p];
                c2 = c2 - dc * st[p] + dr * st[p];
            }
            (r2, c2)
        };
        Ok(CMatrix::from_fn(n, n, |r, col| {
            let (r2, c2) = swap(r, col);
            self.mat[(r2, c2)]
        }))
    }

    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if psi.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", psi.dims(), self.dims)));
        }
        let v = nalgebra::DVector::from_column_slice(psi.amps());
        Ok((v.adjoint() * &self.mat * &v)[(0, 0)].re)
    }
}

/// `½‖r − s‖₁`, from the eigenvalues of the Hermitian difference.
pub fn trace_distance(r: &DensityState, s: &DensityState) -> Result<f64> {
    if r.dims != s.dims {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", r.dims, s.dims)));
    }
    let diff = &r.mat - &s.mat;
    let (vals, _) = hermitian_eigen(&diff);
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::c;
    use crate::qcore::random::Sampler;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell1() -> PureState {
        PureState::new(vec![2, 2], vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    #[test]
    fn tracing_bell_gives_maximally_mixed() {
        let red = bell1().to_density().partial_trace(&[0]).unwrap();
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!(max_abs_diff(red.matrix(), &half) < 1e-12);
    }

    #[test]
    fn product_trace_recovers_factor() {
        let mut s = Sampler::new(5);
        let ra = s.density(&[2], 2);
        let rb = s.density(&[3], 3);
        let joint = DensityState::new(vec![2, 3], ra.matrix().kronecker(rb.matrix())).unwrap();
        assert!(max_abs_diff(joint.partial_trace(&[0]).unwrap().matrix(), ra.matrix()) < 1e-12);
        assert!(max_abs_diff(joint.partial_trace(&[1]).unwrap().matrix(), rb.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_composes() {
        let rho = Sampler::new(9).density(&[2, 3, 2], 4);
        let direct = rho.partial_trace(&[0]).unwrap();
        let staged = rho.partial_trace(&[0, 2]).unwrap().partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(direct.matrix(), staged.matrix()) < 1e-12);
        assert!((rho.partial_trace(&[1]).unwrap().trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell1().to_density();
        assert!(matches!(rho.partial_trace(&[]), Err(Error::InvalidPartition(_))));
        assert!(matches!(rho.partial_trace(&[3]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn full_partial_transpose_is_transpose() {
        let rho = Sampler::new(2).density(&[2, 3], 3);
        let pt = rho.partial_transpose(&[0, 1]).unwrap();
        assert!(max_abs_diff(&pt, &rho.matrix().transpose()) < 1e-15);
        let pt_b = rho.partial_transpose(&[1]).unwrap();
        assert!((pt_b.trace() - rho.matrix().trace()).norm() < 1e-12);
        assert!(max_abs_diff(&pt_b, &pt_b.adjoint()) < 1e-12);
    }

    #[test]
    fn separable_states_are_ppt_and_bell_is_not() {
        let mut s = Sampler::new(21);
        let sep = DensityState::new(vec![2, 2], s.density(&[2], 2).matrix().kronecker(s.density(&[2], 2).matrix())).unwrap();
        let pt = DensityState::from_parts_unchecked(vec![2, 2], sep.partial_transpose(&[1]).unwrap());
        assert!(pt.eigenvalues()[0] >= -1e-10);
        let bell_pt = DensityState::from_parts_unchecked(vec![2, 2], bell1().to_density().partial_transpose(&[1]).unwrap());
        assert!((bell_pt.eigenvalues()[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_half() {
        let mixed = DensityState::new(vec![2], CMatrix::identity(2, 2) * c(0.5, 0.0)).unwrap();
        let zero = PureState::ket(2, 0).unwrap().to_density();
        assert!((trace_distance(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_invalid_density() {
        let m = CMatrix::identity(2, 2);
        assert!(matches!(DensityState::new(vec![2], m), Err(Error::InvalidDensity(_))));
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(matches!(DensityState::new(vec![2], neg), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn eigen_ensemble_reassembles() {
        let rho = Sampler::new(4).density(&[2, 3], 3);
        let ens = rho.eigen_ensemble();
        assert_eq!(ens.len(), 3);
        let back = DensityState::mixture(&ens).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);
    }
}
