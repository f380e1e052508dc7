use nalgebra::DMatrix;

use super::C64;

pub type CMatrix = DMatrix<C64>;

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
///
/// The input is symmetrised first so round-off asymmetry does not leak into
/// the decomposition.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_is_sorted() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.5, 0.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&m);
        assert_eq!(vals, vec![-1.0, 0.5, 3.0]);
        let recon = &vecs * CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, vals.iter().map(|&v| C64::new(v, 0.0)))) * vecs.adjoint();
        assert!(max_abs_diff(&recon, &m) < 1e-12);
    }
}
