//! Small dense views of the operators attached to a pair.
//!
//! The defect operator and the cross-commutator have finite rank and live on
//! the wandering space, so for a truncated model only a handful of interior
//! basis vectors carry them. An [`OperatorFrame`] keeps exactly those
//! coordinates; a [`WanderingFrame`] keeps the interior part of the wandering
//! space of `V1 V2` together with the compressed BCL unitary and projection.

use crate::bcl::{wandering_projections, BclTriple};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, identity, max_abs, ComplexMatrix, ComplexVector, C64};
use crate::models::{dense_block, PairOp, SparseMatrix, StructuredPair};

/// Largest frame handled with dense kernels.
pub const MAX_DENSE_DIM: usize = 2000;

/// Entries below this fraction of the largest entry do not enlarge the support.
pub const SUPPORT_TOL: f64 = 1e-13;

/// Eigenvalues of `P_W` within this of 1 span the interior wandering space.
const WANDERING_EIG_TOL: f64 = 1e-8;

/// Either kind of input the analysis accepts.
#[derive(Debug, Clone)]
pub enum PairInput {
    Triple(BclTriple),
    Pair(StructuredPair),
}

impl From<BclTriple> for PairInput {
    fn from(t: BclTriple) -> Self {
        PairInput::Triple(t)
    }
}

impl From<StructuredPair> for PairInput {
    fn from(p: StructuredPair) -> Self {
        PairInput::Pair(p)
    }
}

impl PairInput {
    /// Dimension of the space the frame vectors embed into.
    pub fn ambient_dim(&self) -> usize {
        match self {
            PairInput::Triple(t) => t.n(),
            PairInput::Pair(p) => p.dim(),
        }
    }
}

/// Defect, cross-commutator and the projections onto `W1 = ker V1*`,
/// `W2 = ker V2*`, compressed to a set of coordinates containing the ranges of
/// the first two.
#[derive(Debug, Clone)]
pub struct OperatorFrame {
    pub ambient_dim: usize,
    /// Global basis indices of the frame coordinates.
    pub support: Vec<usize>,
    pub defect: ComplexMatrix,
    pub cross: ComplexMatrix,
    pub p_w1: ComplexMatrix,
    pub p_w2: ComplexMatrix,
}

impl OperatorFrame {
    pub fn from_input(input: &PairInput) -> Result<Self> {
        match input {
            PairInput::Triple(t) => Self::from_triple(t),
            PairInput::Pair(p) => Self::from_pair(p),
        }
    }

    pub fn from_triple(t: &BclTriple) -> Result<Self> {
        let w = wandering_projections(t)?;
        Ok(Self {
            ambient_dim: t.n(),
            support: (0..t.n()).collect(),
            defect: w.defect,
            cross: w.cross,
            p_w1: w.p_w1,
            p_w2: w.p_w2,
        })
    }

    pub fn from_pair(p: &StructuredPair) -> Result<Self> {
        let ops = p.interior_operators();
        let local = support_of(&[&ops.defect, &ops.cross]);
        if local.len() > MAX_DENSE_DIM {
            return Err(Error::InvalidParameter(format!(
                "operator support has {} coordinates, more than {MAX_DENSE_DIM}",
                local.len()
            )));
        }
        Ok(Self {
            ambient_dim: p.dim(),
            support: local.iter().map(|&k| p.interior()[k]).collect(),
            defect: dense_block(&ops.defect, &local, &local),
            cross: dense_block(&ops.cross, &local, &local),
            p_w1: dense_block(&ops.p_w1, &local, &local),
            p_w2: dense_block(&ops.p_w2, &local, &local),
        })
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    /// Frame coordinates to the full basis.
    pub fn embed(&self, v: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.ambient_dim);
        for (k, &i) in self.support.iter().enumerate() {
            out[i] = v[k];
        }
        out
    }
}

/// Indices of rows or columns holding an entry above [`SUPPORT_TOL`] relative
/// to the largest entry of its matrix.
fn support_of(ms: &[&SparseMatrix]) -> Vec<usize> {
    let n = ms.first().map_or(0, |m| m.nrows());
    let mut used = vec![false; n];
    for m in ms {
        let scale = m.values().iter().fold(0.0_f64, |a, v| a.max(v.norm()));
        if scale == 0.0 {
            continue;
        }
        for (i, j, v) in m.triplet_iter() {
            if v.norm() > SUPPORT_TOL * scale {
                used[i] = true;
                used[j] = true;
            }
        }
    }
    (0..n).filter(|&i| used[i]).collect()
}

/// The wandering space `W = ker (V1V2)*` intersected with the interior, with
/// the BCL unitary `U` and projection `P = P_W1` compressed to it.
#[derive(Debug, Clone)]
pub struct WanderingFrame {
    /// Orthonormal columns in the full basis.
    pub basis: ComplexMatrix,
    pub u: ComplexMatrix,
    pub p: ComplexMatrix,
}

impl WanderingFrame {
    pub fn from_input(input: &PairInput) -> Result<Self> {
        match input {
            PairInput::Triple(t) => Ok(Self { basis: identity(t.n()), u: t.u().clone(), p: t.p().clone() }),
            PairInput::Pair(p) => Self::from_pair(p),
        }
    }

    /// `U = V2 P_W1 + V1* (I - P_W1)` on `W`.
    pub fn from_pair(pair: &StructuredPair) -> Result<Self> {
        let ops = pair.interior_operators();
        let local = wandering_basis(&ops.p_w)?;
        let n = pair.dim();
        let mut basis = ComplexMatrix::zeros(n, local.len());
        for (c, (idx, coeffs)) in local.iter().enumerate() {
            for (&k, &v) in idx.iter().zip(coeffs.iter()) {
                basis[(pair.interior()[k], c)] = v;
            }
        }
        if basis.ncols() > MAX_DENSE_DIM {
            return Err(Error::InvalidParameter(format!(
                "interior wandering space has dimension {}, more than {MAX_DENSE_DIM}",
                basis.ncols()
            )));
        }
        let bh = basis.adjoint();
        let w = basis.ncols();
        let mut u = ComplexMatrix::zeros(w, w);
        let mut p = ComplexMatrix::zeros(w, w);
        for c in 0..w {
            let x = basis.column(c).into_owned();
            let px = &x - pair.apply_chain(&[PairOp::V1, PairOp::V1Adj], &x);
            let ux = pair.apply(PairOp::V2, &px) + pair.apply(PairOp::V1Adj, &(&x - &px));
            u.set_column(c, &(&bh * ux));
            p.set_column(c, &(&bh * px));
        }
        Ok(Self { basis, u, p })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Eigenvectors of a sparse Hermitian projection at eigenvalue 1, found one
/// connected component of its sparsity graph at a time. Each vector is
/// returned as `(local indices, coefficients)`.
fn wandering_basis(p_w: &SparseMatrix) -> Result<Vec<(Vec<usize>, Vec<C64>)>> {
    let n = p_w.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, j, v) in p_w.triplet_iter() {
        if i != j && v.norm() > 0.0 {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut components: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        components[root].push(i);
    }
    let mut out = Vec::new();
    for comp in components.into_iter().filter(|c| !c.is_empty()) {
        let block = dense_block(p_w, &comp, &comp);
        if comp.len() == 1 {
            if (block[(0, 0)].re - 1.0).abs() <= WANDERING_EIG_TOL {
                out.push((comp, vec![C64::new(1.0, 0.0)]));
            }
            continue;
        }
        if comp.len() > MAX_DENSE_DIM {
            return Err(Error::InvalidParameter(format!(
                "wandering block of size {} exceeds {MAX_DENSE_DIM}",
                comp.len()
            )));
        }
        let tol = WANDERING_EIG_TOL * max_abs(&block).max(1.0);
        for pair in hermitian_eig(&block, 1e-8)? {
            if (pair.value - 1.0).abs() <= tol {
                out.push((comp.clone(), pair.vector.iter().copied().collect()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, frobenius_distance};
    use crate::models::{bishift_truncated, twisted_shift};

    #[test]
    fn triple_frame_is_whole_space() {
        let t = BclTriple::two_finite(c64(0.0, 1.0)).unwrap();
        let f = OperatorFrame::from_triple(&t).unwrap();
        assert_eq!(f.support, vec![0, 1]);
        let w = WanderingFrame::from_input(&PairInput::Triple(t.clone())).unwrap();
        assert_eq!(&w.u, t.u());
    }

    #[test]
    fn bishift_frame_is_the_constant() {
        let p = bishift_truncated(5).unwrap();
        let f = OperatorFrame::from_pair(&p).unwrap();
        assert_eq!(f.support, vec![0]);
        assert!((f.defect[(0, 0)].re - 1.0).abs() < 1e-15);
        // constants lie in both W1 and W2
        assert!((f.p_w1[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((f.p_w2[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn twisted_frame_and_wandering_space() {
        let alpha = C64::from_polar(1.0, 0.9);
        let p = twisted_shift(alpha, 8).unwrap();
        let f = OperatorFrame::from_pair(&p).unwrap();
        assert_eq!(f.support, vec![0, 1]);
        let w = WanderingFrame::from_pair(&p).unwrap();
        // W = span{1, z}; the compressed unitary matches the 2-finite triple
        assert_eq!(w.dim(), 2);
        let t = BclTriple::two_finite(alpha).unwrap();
        let expected = OperatorFrame::from_triple(&t).unwrap();
        assert!(frobenius_distance(&f.defect, &expected.defect) < 1e-14);
        assert!(frobenius_distance(&f.cross, &expected.cross) < 1e-14);
        assert!(frobenius_distance(&w.u, t.u()) < 1e-14);
    }
}
