use std::f64::consts::PI;

use serde::Serialize;

use crate::qcore::{Unitary, C64};
use crate::{Error, Result};

fn rows(r: &[&[f64]]) -> Unitary {
    Unitary::from_real_rows(r).expect("permutation matrix")
}

fn diag(phases: &[C64]) -> Unitary {
    Unitary::from_diagonal(phases).expect("unit-modulus diagonal")
}

fn real_diag(signs: &[f64]) -> Unitary {
    diag(&signs.iter().map(|&s| C64::new(s, 0.0)).collect::<Vec<_>>())
}

/// `U1..Um` used by both parties in the m-order teleportation strategy.
pub fn ics_unitaries(m: usize) -> Result<Vec<Unitary>> {
    Ok(match m {
        2 => vec![Unitary::identity(2), Unitary::pauli_x()],
        3 => vec![
            Unitary::identity(3),
            rows(&[&[0., 0., 1.], &[1., 0., 0.], &[0., 1., 0.]]),
            rows(&[&[0., 1., 0.], &[0., 0., 1.], &[1., 0., 0.]]),
        ],
        4 => vec![
            Unitary::identity(4),
            rows(&[&[0., 0., 1., 0.], &[0., 0., 0., 1.], &[1., 0., 0., 0.], &[0., 1., 0., 0.]]),
            rows(&[&[0., 0., 0., 1.], &[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 1., 0.]]),
            rows(&[&[0., 1., 0., 0.], &[0., 0., 1., 0.], &[0., 0., 0., 1.], &[1., 0., 0., 0.]]),
        ],
        _ => return Err(Error::Unsupported(format!("no teleportation unitaries for m = {m}"))),
    })
}

fn v3() -> [Unitary; 3] {
    [
        rows(&[&[0., 0., 1.], &[0., 1., 0.], &[1., 0., 0.]]),
        rows(&[&[1., 0., 0.], &[0., 0., 1.], &[0., 1., 0.]]),
        rows(&[&[0., 1., 0.], &[1., 0., 0.], &[0., 0., 1.]]),
    ]
}

fn omega3() -> [Unitary; 3] {
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let one = C64::new(1.0, 0.0);
    [Unitary::identity(3), diag(&[w * w, w, one]), diag(&[w, w * w, one])]
}

fn v4() -> [Unitary; 4] {
    [
        rows(&[&[0., 0., 0., 1.], &[0., 1., 0., 0.], &[1., 0., 0., 0.], &[0., 0., 1., 0.]]),
        rows(&[&[0., 0., 1., 0.], &[0., 0., 0., 1.], &[0., 1., 0., 0.], &[1., 0., 0., 0.]]),
        rows(&[&[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 0., 0., 1.], &[0., 1., 0., 0.]]),
        rows(&[&[0., 1., 0., 0.], &[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 0., 0., 1.]]),
    ]
}

fn w4() -> [Unitary; 4] {
    [
        rows(&[&[0., 0., 1., 0.], &[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.]]),
        rows(&[&[0., 0., 0., 1.], &[0., 0., 1., 0.], &[1., 0., 0., 0.], &[0., 1., 0., 0.]]),
        rows(&[&[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.], &[1., 0., 0., 0.]]),
        rows(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]]),
    ]
}

fn omega4() -> [Unitary; 4] {
    [
        Unitary::identity(4),
        real_diag(&[1., -1., -1., 1.]),
        real_diag(&[-1., -1., 1., 1.]),
        real_diag(&[-1., 1., -1., 1.]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// A named correction unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub name: String,
    pub unitary: Unitary,
}

/// Receiver corrections indexed by (Charlie's outcome, sender's outcome).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTable {
    entries: Vec<Vec<Correction>>,
}

impl CorrectionTable {
    pub fn new(entries: Vec<Vec<Correction>>) -> Result<Self> {
        let n = entries.first().map_or(0, Vec::len);
        if entries.is_empty() || n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("correction table must be a full rectangle".into()));
        }
        let d = entries[0][0].unitary.dim();
        if entries.iter().flatten().any(|c| c.unitary.dim() != d) {
            return Err(Error::DimensionMismatch("corrections differ in dimension".into()));
        }
        Ok(CorrectionTable { entries })
    }

    /// Corrections for the standard m-order protocol.
    pub fn standard(m: usize, direction: Direction) -> Result<Self> {
        let entry = |name: String, unitary: Unitary| Correction { name, unitary };
        let compose = |v: &Unitary, o: &Unitary| v.compose(o).expect("same dimension");
        let name = |v: String, c: usize| if c == 0 { v } else { format!("{v}*Omega{c}") };
        let entries = match m {
            2 => {
                let plus = vec![entry("sigma_x".into(), Unitary::pauli_x()), entry("I".into(), Unitary::identity(2))];
                let minus =
                    vec![entry("i*sigma_y".into(), Unitary::i_sigma_y()), entry("sigma_z".into(), Unitary::pauli_z())];
                vec![plus, minus]
            }
            3 => {
                let (v, o) = (v3(), omega3());
                let order: [usize; 3] = match direction {
                    Direction::Forward => [0, 1, 2],
                    Direction::Backward => [2, 0, 1],
                };
                (0..3)
                    .map(|c| (0..3).map(|k| entry(name(format!("V{}", order[k] + 1), c), compose(&v[order[k]], &o[c]))).collect())
                    .collect()
            }
            4 => {
                let o = omega4();
                let (ops, letter, omega_of) = match direction {
                    Direction::Forward => (v4(), "V", [0, 1, 2, 3]),
                    Direction::Backward => (w4(), "W", [0, 3, 2, 1]),
                };
                (0..4)
                    .map(|c| {
                        let oc = omega_of[c];
                        (0..4).map(|k| entry(name(format!("{letter}{}", k + 1), oc), compose(&ops[k], &o[oc]))).collect()
                    })
                    .collect()
            }
            _ => return Err(Error::Unsupported(format!("no correction table for m = {m}"))),
        };
        Self::new(entries)
    }

    pub fn charlie_outcomes(&self) -> usize {
        self.entries.len()
    }

    pub fn sender_outcomes(&self) -> usize {
        self.entries[0].len()
    }

    pub fn dim(&self) -> usize {
        self.entries[0][0].unitary.dim()
    }

    pub fn get(&self, charlie: usize, sender: usize) -> Result<&Correction> {
        self.entries
            .get(charlie)
            .and_then(|row| row.get(sender))
            .ok_or(Error::IndexOutOfRange { index: charlie * self.sender_outcomes() + sender, count: self.entries.len() * self.sender_outcomes() })
    }

    pub fn entries(&self) -> &[Vec<Correction>] {
        &self.entries
    }

    /// Smallest `|tr(A†B)|/d` over all entries; 1 when the tables agree up to
    /// per-entry phases.
    pub fn min_phase_overlap(&self, other: &CorrectionTable) -> f64 {
        if self.entries.len() != other.entries.len() || self.sender_outcomes() != other.sender_outcomes() {
            return 0.0;
        }
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| a.unitary.phase_overlap(&b.unitary))
            .fold(1.0, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_complete() {
        for m in 2..=4 {
            assert_eq!(ics_unitaries(m).unwrap().len(), m);
            for dir in [Direction::Forward, Direction::Backward] {
                let t = CorrectionTable::standard(m, dir).unwrap();
                assert_eq!((t.charlie_outcomes(), t.sender_outcomes(), t.dim()), (m, m, m));
            }
        }
        assert!(CorrectionTable::standard(5, Direction::Forward).is_err());
    }

    #[test]
    fn named_entries() {
        let t = CorrectionTable::standard(3, Direction::Forward).unwrap();
        assert_eq!(t.get(0, 0).unwrap().name, "V1");
        assert_eq!(t.get(1, 1).unwrap().name, "V2*Omega1");
        assert_eq!(t.get(2, 2).unwrap().name, "V3*Omega2");
        assert_eq!(CorrectionTable::standard(3, Direction::Backward).unwrap().get(0, 0).unwrap().name, "V3");
        let t = CorrectionTable::standard(4, Direction::Forward).unwrap();
        assert_eq!(t.get(1, 3).unwrap().name, "V4*Omega1");
        assert_eq!(t.get(3, 2).unwrap().name, "V3*Omega3");
        assert_eq!(CorrectionTable::standard(4, Direction::Backward).unwrap().get(2, 1).unwrap().name, "W2*Omega2");
    }

    #[test]
    fn omega_is_applied_first() {
        let t = CorrectionTable::standard(3, Direction::Forward).unwrap();
        let expected = v3()[1].matrix() * omega3()[1].matrix();
        assert_eq!(t.get(1, 1).unwrap().unitary.matrix(), &expected);
    }
}
