//! Dense complex linear algebra for multi-subsystem pure and mixed states.
//!
//! Flat indices follow one convention everywhere: subsystem 0 is the most
//! significant digit, so `k = Σ_i idx_i · Π_{j>i} dims_j`.

mod density;
pub mod io;
mod linalg;
mod measure;
mod ops;
pub mod random;
pub(crate) mod state;
pub(crate) mod tensor;

pub use density::{trace_distance, DensityState};
pub use linalg::{hermitian_eigen, kron, max_abs_diff, CMatrix};
pub use measure::{measure_and_discard, measure_exhaustive, sample_measurement, MeasurementOutcome};
pub use ops::{Basis, KrausChannel, Unitary};
pub use state::{entanglement_entropy, fidelity, PureState};

pub use num_complex::Complex64 as C64;

/// Largest supported state-vector length.
pub const MAX_AMPLITUDES: usize = 1 << 14;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
