//! Index arithmetic on flat amplitude vectors.

use super::{CMatrix, C64};
use crate::{Error, Result};

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

pub(crate) fn check_targets(dims: &[usize], targets: &[usize]) -> Result<()> {
    let mut seen = vec![false; dims.len()];
    for &t in targets {
        if t >= dims.len() {
            return Err(Error::IndexOutOfRange { index: t, count: dims.len() });
        }
        if seen[t] {
            return Err(Error::DuplicateTarget(t));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Offsets of every joint index of `targets` (first target most significant)
/// relative to a base index whose target digits are zero.
fn target_offsets(dims: &[usize], targets: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offsets = vec![0usize];
    for &t in targets {
        let mut next = Vec::with_capacity(offsets.len() * dims[t]);
        for &o in &offsets {
            for digit in 0..dims[t] {
                next.push(o + digit * st[t]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Flat indices whose digits on `targets` are all zero.
fn base_indices(dims: &[usize], targets: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let st = strides(dims);
    (0..total)
        .filter(|&k| targets.iter().all(|&t| (k / st[t]).is_multiple_of(dims[t])))
        .collect()
}

/// Applies `mat` to the joint factor on `targets`, identity elsewhere.
pub(crate) fn apply_on(dims: &[usize], amps: &[C64], mat: &CMatrix, targets: &[usize]) -> Result<Vec<C64>> {
    check_targets(dims, targets)?;
    let sub: usize = targets.iter().map(|&t| dims[t]).product();
    if mat.nrows() != sub || mat.ncols() != sub {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but targets span dimension {sub}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    let offsets = target_offsets(dims, targets);
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut local = vec![C64::new(0.0, 0.0); sub];
    for base in base_indices(dims, targets) {
        for (slot, &o) in local.iter_mut().zip(&offsets) {
            *slot = amps[base + o];
        }
        for (r, &orow) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (col, &v) in local.iter().enumerate() {
                acc += mat[(r, col)] * v;
            }
            out[base + orow] = acc;
        }
    }
    Ok(out)
}

/// Contracts subsystem `target` with the bra `⟨bra|`, removing it.
pub(crate) fn contract(dims: &[usize], amps: &[C64], target: usize, bra: &[C64]) -> Result<(Vec<usize>, Vec<C64>)> {
    check_targets(dims, &[target])?;
    if bra.len() != dims[target] {
        return Err(Error::DimensionMismatch(format!(
            "bra has length {} but subsystem {target} has dimension {}",
            bra.len(),
            dims[target]
        )));
    }
    let st = strides(dims);
    let mut rest_dims = dims.to_vec();
    rest_dims.remove(target);
    let rest_total: usize = rest_dims.iter().product();
    let outer: usize = dims[..target].iter().product();
    let inner = st[target];
    let mut out = Vec::with_capacity(rest_total);
    for hi in 0..outer {
        for lo in 0..inner {
            let mut acc = C64::new(0.0, 0.0);
            for (digit, b) in bra.iter().enumerate() {
                acc += b.conj() * amps[hi * dims[target] * inner + digit * inner + lo];
            }
            out.push(acc);
        }
    }
    Ok((rest_dims, out))
}

/// Reorders subsystems so that new subsystem `i` is old subsystem `order[i]`.
pub(crate) fn permute(dims: &[usize], amps: &[C64], order: &[usize]) -> Result<(Vec<usize>, Vec<C64>)> {
    if order.len() != dims.len() {
        return Err(Error::InvalidPartition(format!(
            "permutation has {} entries for {} subsystems",
            order.len(),
            dims.len()
        )));
    }
    check_targets(dims, order)?;
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let old_st = strides(dims);
    let new_st = strides(&new_dims);
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut old = 0;
        for (i, &o) in order.iter().enumerate() {
            let digit = (k / new_st[i]) % new_dims[i];
            old += digit * old_st[o];
        }
        *slot = amps[old];
    }
    Ok((new_dims, out))
}

/// Reshapes amplitudes into a (part × rest) matrix after moving `part` to the front.
pub(crate) fn bipartite_matrix(dims: &[usize], amps: &[C64], part: &[usize]) -> Result<CMatrix> {
    check_targets(dims, part)?;
    let mut order = part.to_vec();
    order.extend((0..dims.len()).filter(|i| !part.contains(i)));
    let (_, permuted) = permute(dims, amps, &order)?;
    let rows: usize = part.iter().map(|&p| dims[p]).product();
    let cols = amps.len() / rows;
    Ok(CMatrix::from_fn(rows, cols, |r, col| permuted[r * cols + col]))
}
