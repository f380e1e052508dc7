//! Seeded samplers for Haar-like states, unitaries, densities and channels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::linalg::hermitian_eigen;
use super::{CMatrix, DensityState, KrausChannel, PureState, Unitary, C64};

/// Deterministic source of random quantum objects.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn gaussian(&mut self) -> C64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        C64::new(re, im)
    }

    fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.gaussian())
    }

    /// Uniformly distributed pure state on the given subsystems.
    ///
    /// Panics if `dims` is not a valid state shape.
    pub fn state(&mut self, dims: &[usize]) -> PureState {
        let total: usize = dims.iter().product();
        let amps = (0..total).map(|_| self.gaussian()).collect();
        PureState::normalized(dims.to_vec(), amps).expect("valid dims")
    }

    /// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
    pub fn unitary(&mut self, d: usize) -> Unitary {
        let mut m = self.ginibre(d, d);
        for j in 0..d {
            for k in 0..j {
                let proj = m.column(k).dotc(&m.column(j));
                let ck = m.column(k).clone_owned();
                let mut cj = m.column_mut(j);
                cj -= ck * proj;
            }
            let n = m.column(j).norm();
            m.column_mut(j).unscale_mut(n);
        }
        Unitary::new(m).expect("Gram-Schmidt output is unitary")
    }

    /// Random mixed state of the given rank, ρ = GG†/tr(GG†).
    pub fn density(&mut self, dims: &[usize], rank: usize) -> DensityState {
        let total: usize = dims.iter().product();
        let g = self.ginibre(total, rank.clamp(1, total));
        let mut rho = &g * g.adjoint();
        let tr = rho.trace().re;
        rho.unscale_mut(tr);
        DensityState::new(dims.to_vec(), rho).expect("GG† is a density matrix")
    }

    /// Random trace-preserving channel with `n_kraus` operators on a `dim`-level system.
    pub fn channel(&mut self, dim: usize, n_kraus: usize) -> KrausChannel {
        let gs: Vec<CMatrix> = (0..n_kraus.max(1)).map(|_| self.ginibre(dim, dim)).collect();
        let s = gs.iter().fold(CMatrix::zeros(dim, dim), |acc, g| acc + g.adjoint() * g);
        let (vals, vecs) = hermitian_eigen(&s);
        let inv_sqrt = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            vals.iter().map(|v| C64::new(1.0 / v.sqrt(), 0.0)),
        ));
        let s_inv_sqrt = &vecs * inv_sqrt * vecs.adjoint();
        KrausChannel::new(gs.into_iter().map(|g| g * &s_inv_sqrt).collect()).expect("normalized Kraus set")
    }
}
