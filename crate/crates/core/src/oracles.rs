//! Reference implementations used to cross-check the production paths.
//!
//! Everything here is written directly from definitions (digit arithmetic,
//! block matrices, numerical integration) and shares no code with the
//! tensor routines it checks.

use crate::branch::{Plan, UnitaryRegistry};
use crate::qcore::{CMatrix, PureState, C64};
use crate::spacetime::SpacetimeConfig;
use crate::{Error, Result};

/// Adaptive Simpson integration to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Radial light travel coordinate time by quadrature of `dr / (c (1 − R_s/r))`.
pub fn light_time_quadrature(r_from: f64, r_to: f64, cfg: &SpacetimeConfig) -> f64 {
    let rs = cfg.schwarzschild_radius();
    let (lo, hi) = if r_from <= r_to { (r_from, r_to) } else { (r_to, r_from) };
    let f = |r: f64| 1.0 / (1.0 - rs / r);
    let scale = (hi - lo).max(f64::MIN_POSITIVE);
    adaptive_simpson(&f, lo, hi, 1e-12 * scale, 60) / cfg.c()
}

fn digits(mut k: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = k % dims[i];
        k /= dims[i];
    }
    out
}

fn sub_index(d: &[usize], dims: &[usize], targets: &[usize]) -> usize {
    targets.iter().fold(0, |acc, &t| acc * dims[t] + d[t])
}

/// The full matrix of `u` acting on `targets`, built entry by entry.
pub fn embed_dense(u: &CMatrix, targets: &[usize], dims: &[usize]) -> Result<CMatrix> {
    let sub: usize = targets.iter().map(|&t| dims.get(t).copied().unwrap_or(0)).product();
    if u.nrows() != sub || u.ncols() != sub {
        return Err(Error::DimensionMismatch(format!("{}x{} on targets of size {sub}", u.nrows(), u.ncols())));
    }
    let total: usize = dims.iter().product();
    let mut out = CMatrix::zeros(total, total);
    for row in 0..total {
        let dr = digits(row, dims);
        for col in 0..total {
            let dc = digits(col, dims);
            let spectators_match = (0..dims.len()).filter(|i| !targets.contains(i)).all(|i| dr[i] == dc[i]);
            if spectators_match {
                out[(row, col)] = u[(sub_index(&dr, dims, targets), sub_index(&dc, dims, targets))];
            }
        }
    }
    Ok(out)
}

/// Product of the embedded event matrices of a plan, earliest rightmost.
pub fn plan_matrix(plan: &Plan, registry: &UnitaryRegistry, dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    let mut w = CMatrix::identity(total, total);
    for step in plan {
        w = embed_dense(registry.get(&step.unitary)?.matrix(), &step.targets, dims)? * w;
    }
    Ok(w)
}

/// `Σ_k |k⟩⟨k| ⊗ W_k`.
pub fn controlled_unitary(blocks: &[CMatrix]) -> CMatrix {
    let d = blocks.first().map_or(0, |b| b.nrows());
    let m = blocks.len();
    let mut out = CMatrix::zeros(m * d, m * d);
    for (k, b) in blocks.iter().enumerate() {
        out.view_mut((k * d, k * d), (d, d)).copy_from(b);
    }
    out
}

/// `(Σ_k c_k |k⟩) ⊗ ψ` as a flat vector.
pub fn product_vector(mass: &[C64], psi: &[C64]) -> Vec<C64> {
    mass.iter().flat_map(|a| psi.iter().map(move |x| a * x)).collect()
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum()).collect()
}

/// Von Neumann entropy (bits) of the reduced state on `part`, from the
/// singular values of the state reshaped by digit arithmetic.
pub fn schmidt_entropy(state: &PureState, part: &[usize]) -> f64 {
    let dims = state.dims();
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !part.contains(i)).collect();
    let rows: usize = part.iter().map(|&i| dims[i]).product();
    let cols: usize = rest.iter().map(|&i| dims[i]).product();
    let mut m = CMatrix::zeros(rows, cols);
    for (k, a) in state.amps().iter().enumerate() {
        let d = digits(k, dims);
        m[(sub_index(&d, dims, part), sub_index(&d, dims, &rest))] = *a;
    }
    m.singular_values()
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 1e-14)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn max_abs_diff_vec(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
