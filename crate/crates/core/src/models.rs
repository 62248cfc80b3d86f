//! Truncated matrix models of isometric pairs with infinite-dimensional
//! wandering data.
//!
//! A [`StructuredPair`] stores `V1`, `V2` as sparse matrices on a finite
//! orthonormal basis together with an *interior* index set: basis vectors on
//! which `V1`, `V2`, their adjoints and the products appearing in the defect
//! operator act exactly as the untruncated operators do. Every derived
//! quantity is compressed to the interior before it is analysed.

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, haar_unitary, ComplexMatrix, ComplexVector, C64};

pub type SparseMatrix = CsrMatrix<C64>;

/// Entries of modulus at or below this are dropped from sparse products.
pub const SPARSE_DROP_TOL: f64 = 1e-15;

/// Residual allowed for interior isometry and commutation.
pub const INTERIOR_TOL: f64 = 1e-12;

/// Build a CSR matrix from triplets, summing duplicates and dropping zeros.
pub fn sparse_from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, C64)]) -> Result<SparseMatrix> {
    let mut coo = CooMatrix::new(rows, cols);
    for &(i, j, v) in triplets {
        if i >= rows || j >= cols {
            return Err(Error::DimensionMismatch(format!("entry ({i}, {j}) outside a {rows}x{cols} matrix")));
        }
        if v != C64::default() {
            coo.push(i, j, v);
        }
    }
    Ok(prune(&CsrMatrix::from(&coo)))
}

pub fn sparse_adjoint(m: &SparseMatrix) -> SparseMatrix {
    let mut t = m.transpose();
    for v in t.values_mut() {
        *v = v.conj();
    }
    t
}

/// Drop entries of modulus at most [`SPARSE_DROP_TOL`].
pub fn prune(m: &SparseMatrix) -> SparseMatrix {
    m.filter(|_, _, v| v.norm() > SPARSE_DROP_TOL)
}

pub fn sparse_identity(n: usize) -> SparseMatrix {
    CsrMatrix::identity(n)
}

pub fn sparse_to_dense(m: &SparseMatrix) -> ComplexMatrix {
    ComplexMatrix::from(m)
}

pub fn dense_to_sparse(m: &ComplexMatrix) -> SparseMatrix {
    prune(&CsrMatrix::from(m))
}

/// Nonzero entries of each column, as `(row, value)` lists.
pub fn sparse_to_dense_columns(m: &SparseMatrix) -> Vec<Vec<(usize, C64)>> {
    let mut cols = vec![Vec::new(); m.ncols()];
    for (i, j, v) in m.triplet_iter() {
        cols[j].push((i, *v));
    }
    cols
}

/// Dense submatrix on `rows x cols` (global indices, in the given order).
pub fn dense_block(m: &SparseMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    let row_pos = position_map(m.nrows(), rows);
    let col_pos = position_map(m.ncols(), cols);
    let mut out = ComplexMatrix::zeros(rows.len(), cols.len());
    for (i, j, v) in m.triplet_iter() {
        if let (Some(a), Some(b)) = (row_pos[i], col_pos[j]) {
            out[(a, b)] = *v;
        }
    }
    out
}

/// Sparse submatrix on `idx x idx`, re-indexed to local positions.
pub fn sparse_block(m: &SparseMatrix, idx: &[usize]) -> SparseMatrix {
    let pos = position_map(m.nrows().max(m.ncols()), idx);
    let triplets: Vec<(usize, usize, C64)> = m
        .triplet_iter()
        .filter_map(|(i, j, v)| Some((pos[i]?, pos[j]?, *v)))
        .collect();
    sparse_from_triplets(idx.len(), idx.len(), &triplets).expect("positions are in range")
}

fn position_map(n: usize, idx: &[usize]) -> Vec<Option<usize>> {
    let mut pos = vec![None; n];
    for (k, &i) in idx.iter().enumerate() {
        pos[i] = Some(k);
    }
    pos
}

/// Frobenius norm of the columns `cols` of `m`.
fn column_norm(m: &SparseMatrix, cols: &[usize]) -> f64 {
    let keep = position_map(m.ncols(), cols);
    m.triplet_iter()
        .filter(|(_, j, _)| keep[*j].is_some())
        .map(|(_, _, v)| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// What a basis vector stands for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisLabel {
    /// `z^z w^w`
    Monomial { z: usize, w: usize },
    /// `z^k` in the one-variable Hardy space
    Power { k: usize },
    /// The normalized Laurent series `g_j`
    Series { j: usize },
    /// A label of summand `part` of a direct sum
    Part { part: usize, label: Box<BasisLabel> },
    /// A basis vector mixed by a random unitary
    Mixed { index: usize },
    /// A plain coordinate
    Index { index: usize },
}

/// How a structured pair was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Provenance {
    Bishift {
        #[serde(rename = "N")]
        n: usize,
    },
    Twisted {
        alpha: C64,
        #[serde(rename = "N")]
        n: usize,
    },
    Izuchi {
        r: f64,
        gamma: C64,
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "J")]
        j: usize,
        #[serde(rename = "K")]
        k: usize,
    },
    DirectSum { parts: Vec<Provenance> },
    Scrambled { seed: u64, source: Box<Provenance> },
    /// Supplied directly rather than generated.
    External,
}

/// Truncated model of an isometric pair.
#[derive(Debug, Clone)]
pub struct StructuredPair {
    v1: SparseMatrix,
    v2: SparseMatrix,
    v1_adj: SparseMatrix,
    v2_adj: SparseMatrix,
    labels: Vec<BasisLabel>,
    interior: Vec<usize>,
    provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairOp {
    V1,
    V1Adj,
    V2,
    V2Adj,
}

/// Interior compressions of the operators derived from a pair, in local
/// coordinates (position `k` is global index `interior[k]`).
#[derive(Debug, Clone)]
pub struct InteriorOperators {
    /// `I - V1V1* - V2V2* + V1V2V1*V2*`
    pub defect: SparseMatrix,
    /// `V2*V1 - V1V2*`
    pub cross: SparseMatrix,
    /// `I - V1V1*`, the projection onto `ker V1*`
    pub p_w1: SparseMatrix,
    /// `I - V2V2*`
    pub p_w2: SparseMatrix,
    /// `I - (V1V2)(V1V2)*`, the projection onto the wandering space of `V1V2`
    pub p_w: SparseMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorResiduals {
    /// `max_i ||(Vi* Vi - I) on interior columns||_F`
    pub isometry: f64,
    /// `||(V1V2 - V2V1) on interior columns||_F`
    pub commutation: f64,
}

impl InteriorResiduals {
    pub fn within(&self, tol: f64) -> bool {
        self.isometry <= tol && self.commutation <= tol
    }
}

impl StructuredPair {
    pub fn new(
        v1: SparseMatrix,
        v2: SparseMatrix,
        labels: Vec<BasisLabel>,
        mut interior: Vec<usize>,
        provenance: Provenance,
    ) -> Result<Self> {
        let dim = v1.nrows();
        for (name, m) in [("V1", &v1), ("V2", &v2)] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if labels.len() != dim {
            return Err(Error::DimensionMismatch(format!("{} labels for dimension {dim}", labels.len())));
        }
        interior.sort_unstable();
        interior.dedup();
        if interior.last().is_some_and(|&i| i >= dim) {
            return Err(Error::DimensionMismatch("interior index out of range".into()));
        }
        let v1 = prune(&v1);
        let v2 = prune(&v2);
        Ok(Self {
            v1_adj: sparse_adjoint(&v1),
            v2_adj: sparse_adjoint(&v2),
            v1,
            v2,
            labels,
            interior,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.v1.nrows()
    }

    pub fn v1(&self) -> &SparseMatrix {
        &self.v1
    }

    pub fn v2(&self) -> &SparseMatrix {
        &self.v2
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    fn op(&self, op: PairOp) -> &SparseMatrix {
        match op {
            PairOp::V1 => &self.v1,
            PairOp::V1Adj => &self.v1_adj,
            PairOp::V2 => &self.v2,
            PairOp::V2Adj => &self.v2_adj,
        }
    }

    pub fn apply(&self, op: PairOp, x: &ComplexVector) -> ComplexVector {
        self.op(op) * x
    }

    /// Apply several operators right to left: `apply_chain(&[A, B], x) = A B x`.
    pub fn apply_chain(&self, ops: &[PairOp], x: &ComplexVector) -> ComplexVector {
        ops.iter().rev().fold(x.clone(), |acc, &op| self.apply(op, &acc))
    }

    pub fn interior_residuals(&self) -> InteriorResiduals {
        let id = sparse_identity(self.dim());
        let iso1 = column_norm(&(&(&self.v1_adj * &self.v1) - &id), &self.interior);
        let iso2 = column_norm(&(&(&self.v2_adj * &self.v2) - &id), &self.interior);
        let comm = &(&self.v1 * &self.v2) - &(&self.v2 * &self.v1);
        InteriorResiduals { isometry: iso1.max(iso2), commutation: column_norm(&comm, &self.interior) }
    }

    pub fn interior_operators(&self) -> InteriorOperators {
        let id = sparse_identity(self.dim());
        let v1v1 = &self.v1 * &self.v1_adj;
        let v2v2 = &self.v2 * &self.v2_adj;
        let prod = &self.v1 * &self.v2;
        let prod_adj = &self.v2_adj * &self.v1_adj;
        let pp = &prod * &prod_adj;
        let defect = &(&(&id - &v1v1) - &v2v2) + &pp;
        let cross = &(&self.v2_adj * &self.v1) - &(&self.v1 * &self.v2_adj);
        let int = &self.interior;
        InteriorOperators {
            defect: sparse_block(&prune(&defect), int),
            cross: sparse_block(&prune(&cross), int),
            p_w1: sparse_block(&prune(&(&id - &v1v1)), int),
            p_w2: sparse_block(&prune(&(&id - &v2v2)), int),
            p_w: sparse_block(&prune(&(&id - &pp)), int),
        }
    }

    /// Embed local interior coordinates into the full basis.
    pub fn embed_interior(&self, local: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.dim());
        for (k, &i) in self.interior.iter().enumerate() {
            out[i] = local[k];
        }
        out
    }

    /// Conjugate by a unitary `S`: `(S V1 S*, S V2 S*)`. The caller keeps the
    /// interior meaningful by choosing `S` to preserve it.
    fn conjugated(&self, s: &SparseMatrix, labels: Vec<BasisLabel>, provenance: Provenance) -> Result<Self> {
        let s_adj = sparse_adjoint(s);
        let v1 = &(s * &self.v1) * &s_adj;
        let v2 = &(s * &self.v2) * &s_adj;
        Self::new(v1, v2, labels, self.interior.clone(), provenance)
    }
}

/// `(M_z, M_w)` on polynomials `z^m w^n`, `0 <= m, n < N`, at index `m N + n`.
pub fn bishift_truncated(n: usize) -> Result<StructuredPair> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("bishift needs N >= 3, got {n}")));
    }
    let idx = |m: usize, k: usize| m * n + k;
    let one = c64(1.0, 0.0);
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut labels = Vec::with_capacity(n * n);
    let mut interior = Vec::new();
    for m in 0..n {
        for k in 0..n {
            labels.push(BasisLabel::Monomial { z: m, w: k });
            if m + 1 < n {
                t1.push((idx(m + 1, k), idx(m, k), one));
            }
            if k + 1 < n {
                t2.push((idx(m, k + 1), idx(m, k), one));
            }
            if m + 1 < n && k + 1 < n {
                interior.push(idx(m, k));
            }
        }
    }
    StructuredPair::new(
        sparse_from_triplets(n * n, n * n, &t1)?,
        sparse_from_triplets(n * n, n * n, &t2)?,
        labels,
        interior,
        Provenance::Bishift { n },
    )
}

/// `(M_z, alpha M_z)` on polynomials of degree `< N`; the cross-commutator is
/// `conj(alpha)` times the projection onto constants.
pub fn twisted_shift(alpha: C64, n: usize) -> Result<StructuredPair> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("|alpha| = {} is not 1", alpha.norm())));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("twisted shift needs N >= 3, got {n}")));
    }
    let t1: Vec<_> = (0..n - 1).map(|k| (k + 1, k, c64(1.0, 0.0))).collect();
    let t2: Vec<_> = (0..n - 1).map(|k| (k + 1, k, alpha)).collect();
    StructuredPair::new(
        sparse_from_triplets(n, n, &t1)?,
        sparse_from_triplets(n, n, &t2)?,
        (0..n).map(|k| BasisLabel::Power { k }).collect(),
        (0..n - 2).collect(),
        Provenance::Twisted { alpha, n },
    )
}

pub fn direct_sum(parts: &[StructuredPair]) -> Result<StructuredPair> {
    match parts {
        [] => Err(Error::InvalidParameter("direct sum of no pairs".into())),
        [single] => Ok(single.clone()),
        _ => {
            let dim: usize = parts.iter().map(|p| p.dim()).sum();
            let mut t1 = Vec::new();
            let mut t2 = Vec::new();
            let mut labels = Vec::with_capacity(dim);
            let mut interior = Vec::new();
            let mut at = 0;
            for (part, p) in parts.iter().enumerate() {
                t1.extend(p.v1.triplet_iter().map(|(i, j, v)| (at + i, at + j, *v)));
                t2.extend(p.v2.triplet_iter().map(|(i, j, v)| (at + i, at + j, *v)));
                labels.extend(p.labels.iter().map(|l| BasisLabel::Part { part, label: Box::new(l.clone()) }));
                interior.extend(p.interior.iter().map(|&i| at + i));
                at += p.dim();
            }
            StructuredPair::new(
                sparse_from_triplets(dim, dim, &t1)?,
                sparse_from_triplets(dim, dim, &t2)?,
                labels,
                interior,
                Provenance::DirectSum { parts: parts.iter().map(|p| p.provenance.clone()).collect() },
            )
        }
    }
}

/// Conjugate by `Q (+) I`, with `Q` a Haar-random unitary on the interior
/// coordinates and the identity on the boundary.
pub fn scramble(pair: &StructuredPair, seed: u64) -> Result<StructuredPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = haar_unitary(pair.interior.len(), &mut rng);
    conjugate_interior(pair, &q, Provenance::Scrambled { seed, source: Box::new(pair.provenance.clone()) })
}

/// Conjugate by `Q (+) I` for a given unitary `Q` on the interior coordinates.
pub fn conjugate_interior(pair: &StructuredPair, q: &ComplexMatrix, provenance: Provenance) -> Result<StructuredPair> {
    let k = pair.interior.len();
    if q.nrows() != k || q.ncols() != k {
        return Err(Error::DimensionMismatch(format!("Q must be {k}x{k}")));
    }
    let interior_pos = position_map(pair.dim(), &pair.interior);
    let mut triplets = Vec::new();
    for (a, &i) in pair.interior.iter().enumerate() {
        for (b, &j) in pair.interior.iter().enumerate() {
            triplets.push((i, j, q[(a, b)]));
        }
    }
    for (i, pos) in interior_pos.iter().enumerate() {
        if pos.is_none() {
            triplets.push((i, i, c64(1.0, 0.0)));
        }
    }
    let s = sparse_from_triplets(pair.dim(), pair.dim(), &triplets)?;
    let labels = pair
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| if interior_pos[i].is_some() { BasisLabel::Mixed { index: i } } else { l.clone() })
        .collect();
    pair.conjugated(&s, labels, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, hermitian_eig, identity, normal_eig};

    fn dense_defect(p: &StructuredPair) -> ComplexMatrix {
        sparse_to_dense(&p.interior_operators().defect)
    }

    fn dense_cross(p: &StructuredPair) -> ComplexMatrix {
        sparse_to_dense(&p.interior_operators().cross)
    }

    fn local(p: &StructuredPair, global: usize) -> usize {
        p.interior().iter().position(|&i| i == global).unwrap()
    }

    fn nonzero_eigs(m: &ComplexMatrix) -> Vec<f64> {
        hermitian_eig(m, 1e-10).unwrap().into_iter().map(|e| e.value).filter(|v| v.abs() > 1e-9).collect()
    }

    #[test]
    fn bishift_defect_is_projection_onto_constants() {
        for n in [3, 5] {
            let p = bishift_truncated(n).unwrap();
            assert!(p.interior_residuals().within(INTERIOR_TOL));
            let c = dense_defect(&p);
            let mut expected = ComplexMatrix::zeros(c.nrows(), c.ncols());
            let k = local(&p, 0);
            expected[(k, k)] = c64(1.0, 0.0);
            assert!(frobenius_distance(&c, &expected) < 1e-12);
            assert!(dense_cross(&p).norm() < 1e-12);
        }
        let p = bishift_truncated(3).unwrap();
        let ops = p.interior_operators();
        let zw = local(&p, 3 + 1);
        let col: f64 = (0..ops.defect.nrows()).map(|i| sparse_to_dense(&ops.defect)[(i, zw)].norm()).sum();
        assert_eq!(col, 0.0);
        assert!(bishift_truncated(2).is_err());
    }

    #[test]
    fn twisted_cross_and_defect() {
        for (alpha, expected) in [(c64(1.0, 0.0), c64(1.0, 0.0)), (c64(0.0, 1.0), c64(0.0, -1.0))] {
            let p = twisted_shift(alpha, 4).unwrap();
            assert!(p.interior_residuals().within(INTERIOR_TOL));
            let x = dense_cross(&p);
            let eigs: Vec<C64> =
                normal_eig(&x, 1e-10).unwrap().into_iter().map(|(a, _)| a).filter(|a| a.norm() > 1e-9).collect();
            assert_eq!(eigs.len(), 1);
            assert!((eigs[0] - expected).norm() < 1e-12);
            assert_eq!(nonzero_eigs(&dense_defect(&p)), vec![1.0, -1.0]);
        }
        assert!(twisted_shift(c64(0.5, 0.0), 4).is_err());
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let a = twisted_shift(C64::from_polar(1.0, 0.3), 5).unwrap();
        assert_eq!(dense_cross(&direct_sum(std::slice::from_ref(&a)).unwrap()), dense_cross(&a));

        let b = twisted_shift(C64::from_polar(1.0, -1.2), 5).unwrap();
        let s = direct_sum(&[a, b]).unwrap();
        let mut eigs: Vec<C64> = normal_eig(&dense_cross(&s), 1e-10)
            .unwrap()
            .into_iter()
            .map(|(a, _)| a)
            .filter(|a| a.norm() > 1e-9)
            .collect();
        eigs.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        assert!((eigs[0] - C64::from_polar(1.0, -0.3)).norm() < 1e-12);
        assert!((eigs[1] - C64::from_polar(1.0, 1.2)).norm() < 1e-12);

        let mixed = direct_sum(&[bishift_truncated(4).unwrap(), twisted_shift(c64(0.0, 1.0), 4).unwrap()]).unwrap();
        assert_eq!(nonzero_eigs(&dense_defect(&mixed)).len(), 3);
        assert!(direct_sum(&[]).is_err());
    }

    #[test]
    fn scramble_preserves_spectra() {
        let pair = direct_sum(&[bishift_truncated(4).unwrap(), twisted_shift(c64(0.0, 1.0), 5).unwrap()]).unwrap();
        let base = nonzero_eigs(&dense_defect(&pair));
        for seed in 0..5 {
            let s = scramble(&pair, seed).unwrap();
            assert!(s.interior_residuals().within(1e-11));
            let eigs = nonzero_eigs(&dense_defect(&s));
            assert_eq!(eigs.len(), base.len());
            for (x, y) in eigs.iter().zip(&base) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_conjugation_leaves_pair_unchanged() {
        let pair = twisted_shift(c64(0.0, 1.0), 6).unwrap();
        let same = conjugate_interior(&pair, &identity(pair.interior().len()), Provenance::External).unwrap();
        assert_eq!(sparse_to_dense(same.v1()), sparse_to_dense(pair.v1()));
        assert_eq!(sparse_to_dense(same.v2()), sparse_to_dense(pair.v2()));
    }
}
