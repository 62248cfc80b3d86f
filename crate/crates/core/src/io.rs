//! JSON documents for triples and truncated pairs.
//!
//! Complex numbers are `[re, im]`. Dense matrices are `{rows, cols, data}`
//! with row-major `data`; the operators of a truncated pair are sparse and
//! stored as `{rows, cols, nonzeros}` with `[i, j, [re, im]]` entries in
//! row-major order. Documents carry a `kind` tag.

use serde::{Deserialize, Serialize};

use crate::bcl::BclTriple;
use crate::error::{Error, Result};
use crate::frame::PairInput;
use crate::linalg::{ComplexMatrix, C64};
use crate::models::{sparse_from_triplets, BasisLabel, Provenance, SparseMatrix, StructuredPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl From<&ComplexMatrix> for DenseMatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<&DenseMatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: &DenseMatrixJson) -> Result<Self> {
        if m.data.len() != m.rows * m.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with {} entries",
                m.rows,
                m.cols,
                m.data.len()
            )));
        }
        Ok(ComplexMatrix::from_row_slice(m.rows, m.cols, &m.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub nonzeros: Vec<(usize, usize, C64)>,
}

impl From<&SparseMatrix> for SparseMatrixJson {
    fn from(m: &SparseMatrix) -> Self {
        Self { rows: m.nrows(), cols: m.ncols(), nonzeros: m.triplet_iter().map(|(i, j, v)| (i, j, *v)).collect() }
    }
}

impl TryFrom<&SparseMatrixJson> for SparseMatrix {
    type Error = Error;

    fn try_from(m: &SparseMatrixJson) -> Result<Self> {
        sparse_from_triplets(m.rows, m.cols, &m.nonzeros)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleJson {
    pub n: usize,
    pub u: DenseMatrixJson,
    pub p: DenseMatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub dim: usize,
    pub provenance: Provenance,
    pub interior: Vec<usize>,
    pub labels: Vec<BasisLabel>,
    pub v1: SparseMatrixJson,
    pub v2: SparseMatrixJson,
}

/// Any input the analysis accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputDocument {
    Triple(TripleJson),
    Pair(PairJson),
}

impl From<&BclTriple> for InputDocument {
    fn from(t: &BclTriple) -> Self {
        InputDocument::Triple(TripleJson { n: t.n(), u: t.u().into(), p: t.p().into() })
    }
}

impl From<&StructuredPair> for InputDocument {
    fn from(p: &StructuredPair) -> Self {
        InputDocument::Pair(PairJson {
            dim: p.dim(),
            provenance: p.provenance().clone(),
            interior: p.interior().to_vec(),
            labels: p.labels().to_vec(),
            v1: p.v1().into(),
            v2: p.v2().into(),
        })
    }
}

impl From<&PairInput> for InputDocument {
    fn from(input: &PairInput) -> Self {
        match input {
            PairInput::Triple(t) => t.into(),
            PairInput::Pair(p) => p.into(),
        }
    }
}

impl InputDocument {
    /// Convert to an input, validating the triple axioms or the pair's shape.
    pub fn into_input(self) -> Result<PairInput> {
        match self {
            InputDocument::Triple(t) => {
                let u = ComplexMatrix::try_from(&t.u)?;
                let p = ComplexMatrix::try_from(&t.p)?;
                if u.nrows() != t.n || p.nrows() != t.n {
                    return Err(Error::DimensionMismatch(format!(
                        "triple declares n = {} but U is {}x{} and P is {}x{}",
                        t.n,
                        u.nrows(),
                        u.ncols(),
                        p.nrows(),
                        p.ncols()
                    )));
                }
                Ok(BclTriple::new(u, p)?.into())
            }
            InputDocument::Pair(p) => {
                let v1 = SparseMatrix::try_from(&p.v1)?;
                let v2 = SparseMatrix::try_from(&p.v2)?;
                if v1.nrows() != p.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "pair declares dim = {} but V1 has {} rows",
                        p.dim,
                        v1.nrows()
                    )));
                }
                Ok(StructuredPair::new(v1, v2, p.labels, p.interior, p.provenance)?.into())
            }
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document types serialize");
    s.push('\n');
    s
}

pub fn parse_input(text: &str) -> Result<PairInput> {
    let doc: InputDocument =
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("malformed input document: {e}")))?;
    doc.into_input()
}
