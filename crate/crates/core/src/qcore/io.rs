//! JSON forms for matrices, states, channels and product-state corpora.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested arrays.

use serde::{Deserialize, Serialize};

use super::{CMatrix, KrausChannel, PureState, Unitary, C64};
use crate::{Error, Result};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

fn to_c(z: &JsonComplex) -> C64 {
    C64::new(z[0], z[1])
}

fn from_c(z: &C64) -> JsonComplex {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| from_c(&m[(r, c)])).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, c| to_c(&rows[r][c])))
}

pub fn unitary_from_json(rows: &JsonMatrix) -> Result<Unitary> {
    Unitary::new(matrix_from_json(rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amps: Vec<JsonComplex>,
}

impl StateFile {
    pub fn from_state(s: &PureState) -> Self {
        StateFile { dims: s.dims().to_vec(), amps: s.amps().iter().map(from_c).collect() }
    }

    pub fn to_state(&self) -> Result<PureState> {
        PureState::new(self.dims.clone(), self.amps.iter().map(to_c).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<JsonMatrix>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        ChannelFile { in_dim: ch.in_dim(), out_dim: ch.out_dim(), kraus: ch.kraus().iter().map(matrix_to_json).collect() }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let kraus = self.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        let ch = KrausChannel::new(kraus)?;
        if ch.in_dim() != self.in_dim || ch.out_dim() != self.out_dim {
            return Err(Error::DimensionMismatch(format!(
                "declared {}->{} but operators are {}->{}",
                self.in_dim,
                self.out_dim,
                ch.in_dim(),
                ch.out_dim()
            )));
        }
        Ok(ch)
    }
}

/// A set of product states, each given as one normalized vector per factor.
pub type CorpusFile = Vec<Vec<Vec<JsonComplex>>>;

pub fn corpus_from_json(corpus: &CorpusFile) -> Result<Vec<PureState>> {
    corpus
        .iter()
        .map(|factors| {
            let mut parts = factors.iter().map(|f| {
                PureState::normalized(vec![f.len()], f.iter().map(to_c).collect())
            });
            let first = parts.next().ok_or_else(|| Error::Format("empty product state".into()))??;
            parts.try_fold(first, |acc, p| Ok(acc.tensor(&p?)))
        })
        .collect()
}

pub fn corpus_to_json(factors: &[Vec<PureState>]) -> CorpusFile {
    factors.iter().map(|fs| fs.iter().map(|f| f.amps().iter().map(from_c).collect()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::Sampler;

    #[test]
    fn round_trips() {
        let mut s = Sampler::new(5);
        let st = s.state(&[2, 3]);
        let back = StateFile::from_state(&st).to_state().unwrap();
        assert_eq!(back, st);
        let json = serde_json::to_string(&StateFile::from_state(&st)).unwrap();
        let parsed: StateFile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_state().unwrap(), st);

        let ch = s.channel(2, 3);
        let back = ChannelFile::from_channel(&ch).to_channel().unwrap();
        assert_eq!(back, ch);

        let u = s.unitary(3);
        assert_eq!(unitary_from_json(&matrix_to_json(u.matrix())).unwrap(), u);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matrix_from_json(&vec![vec![[1.0, 0.0]], vec![]]).is_err());
        assert!(unitary_from_json(&vec![vec![[2.0, 0.0]]]).is_err());
        let f = ChannelFile { in_dim: 3, out_dim: 2, kraus: vec![matrix_to_json(&CMatrix::identity(2, 2))] };
        assert!(f.to_channel().is_err());
    }

    #[test]
    fn corpus_parses_products() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let corpus: CorpusFile = vec![vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[h, 0.0], [h, 0.0]]]];
        let states = corpus_from_json(&corpus).unwrap();
        assert_eq!(states[0].dims(), &[2, 2]);
        assert!((states[0].amps()[1].re - h).abs() < 1e-15);
    }
}
