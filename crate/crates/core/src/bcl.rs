//! Finite BCL triples `(C^n, U, P)` and the operators they induce on the
//! wandering subspace of `V1 V2`.
//!
//! A triple determines the pair `(M_Phi1, M_Phi2)` of analytic Toeplitz
//! operators with `Phi1(z) = (I - P + zP) U*` and `Phi2(z) = U (P + z(I - P))`.
//! On the wandering space `W = C^n` (the constants) the four distinguished
//! subspaces are
//!
//! * `W1 = ran P`, `V1 W2 = ran(I - P)`,
//! * `V2 W1 = ran(U P U*)`, `W2 = ran(I - U P U*)`,
//!
//! and both the defect operator and the cross-commutator `[V2*, V1]` are
//! supported there.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, frobenius_distance, haar_isometry, haar_unitary, hermitian_residual, identity, ComplexMatrix, C64,
};

/// Residual tolerance used when a triple is checked implicitly.
pub const TRIPLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BclTriple {
    u: ComplexMatrix,
    p: ComplexMatrix,
}

impl BclTriple {
    /// Assemble a triple without checking unitarity or projection properties;
    /// see [`validate_triple`]. Only the shapes are checked.
    pub fn from_parts(u: ComplexMatrix, p: ComplexMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() || p.nrows() != p.ncols() || u.nrows() != p.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "U is {}x{} but P is {}x{}",
                u.nrows(),
                u.ncols(),
                p.nrows(),
                p.ncols()
            )));
        }
        Ok(Self { u, p })
    }

    /// Assemble and validate at [`TRIPLE_TOL`].
    pub fn new(u: ComplexMatrix, p: ComplexMatrix) -> Result<Self> {
        let t = Self::from_parts(u, p)?;
        validate_triple(&t, TRIPLE_TOL)?.into_result()?;
        Ok(t)
    }

    /// `U = [[0, 1], [alpha, 0]]`, `P = diag(1, 0)`: the wandering data of the
    /// irreducible 2-finite pair whose cross-commutator eigenvalue is `conj(alpha)`.
    pub fn two_finite(alpha: C64) -> Result<Self> {
        if (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|alpha| = {} is not 1", alpha.norm())));
        }
        let zero = C64::default();
        let one = c64(1.0, 0.0);
        let u = ComplexMatrix::from_row_slice(2, 2, &[zero, one, alpha, zero]);
        let p = ComplexMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]);
        Self::new(u, p)
    }

    /// Block-diagonal sum of triples.
    pub fn direct_sum(parts: &[BclTriple]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("direct sum of no triples".into()));
        }
        let n: usize = parts.iter().map(|t| t.n()).sum();
        let mut u = ComplexMatrix::zeros(n, n);
        let mut p = ComplexMatrix::zeros(n, n);
        let mut at = 0;
        for t in parts {
            let k = t.n();
            u.view_mut((at, at), (k, k)).copy_from(&t.u);
            p.view_mut((at, at), (k, k)).copy_from(&t.p);
            at += k;
        }
        Self::from_parts(u, p)
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TripleCheck {
    Unitarity,
    Idempotence,
    Hermiticity,
}

/// Largest residual of each triple invariant at a given tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tol: f64,
    /// `||U* U - I||_F`
    pub unitarity: f64,
    /// `||P^2 - P||_F`
    pub idempotence: f64,
    /// `||P - P*||_F`
    pub hermiticity: f64,
}

impl ValidationReport {
    pub fn violations(&self) -> Vec<TripleCheck> {
        let mut out = Vec::new();
        if !(self.unitarity <= self.tol) {
            out.push(TripleCheck::Unitarity);
        }
        if !(self.idempotence <= self.tol) {
            out.push(TripleCheck::Idempotence);
        }
        if !(self.hermiticity <= self.tol) {
            out.push(TripleCheck::Hermiticity);
        }
        out
    }

    pub fn is_ok(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_ok() {
            Ok(self)
        } else {
            Err(Error::InvalidTriple(format!(
                "{:?} (unitarity {:.3e}, idempotence {:.3e}, hermiticity {:.3e}, tol {:.1e})",
                self.violations(),
                self.unitarity,
                self.idempotence,
                self.hermiticity,
                self.tol
            )))
        }
    }
}

pub fn validate_triple(t: &BclTriple, tol: f64) -> Result<ValidationReport> {
    let n = t.n();
    if t.p.nrows() != n || t.p.ncols() != n || t.u.ncols() != n {
        return Err(Error::DimensionMismatch("U and P must be square of equal size".into()));
    }
    Ok(ValidationReport {
        tol,
        unitarity: frobenius_distance(&(t.u.adjoint() * &t.u), &identity(n)),
        idempotence: frobenius_distance(&(&t.p * &t.p), &t.p),
        hermiticity: hermitian_residual(&t.p),
    })
}

/// Projections onto the four wandering subspaces, the defect operator and the
/// cross-commutator, all as operators on `W = C^n`.
#[derive(Debug, Clone)]
pub struct WanderingOperators {
    pub p_w1: ComplexMatrix,
    pub p_v2w1: ComplexMatrix,
    pub p_w2: ComplexMatrix,
    pub p_v1w2: ComplexMatrix,
    pub defect: ComplexMatrix,
    pub cross: ComplexMatrix,
}

pub fn wandering_projections(t: &BclTriple) -> Result<WanderingOperators> {
    validate_triple(t, TRIPLE_TOL)?.into_result()?;
    let n = t.n();
    let id = identity(n);
    let p_w1 = t.p.clone();
    let p_v1w2 = &id - &t.p;
    let p_v2w1 = &t.u * &t.p * t.u.adjoint();
    let p_w2 = &id - &p_v2w1;
    let defect = &p_w1 - &p_v2w1;
    let cross = cross_commutator_on_wandering(t);
    Ok(WanderingOperators { p_w1, p_v2w1, p_w2, p_v1w2, defect, cross })
}

/// `[V2*, V1]` restricted to `W`: `X = P U* (I - P) U*`.
///
/// `V2*` acts on `W1`-components through `U*` and `V1` acts on `V1 W2` through
/// `U`, which leaves exactly this corner; the Toeplitz oracle in
/// [`crate::toeplitz`] confirms it entrywise.
pub fn cross_commutator_on_wandering(t: &BclTriple) -> ComplexMatrix {
    let n = t.n();
    let ud = t.u.adjoint();
    &t.p * &ud * (identity(n) - &t.p) * &ud
}

/// Coefficients of the degree-one symbols `Phi_i(z) = const + z * lin`.
#[derive(Debug, Clone)]
pub struct ToeplitzSymbols {
    pub phi1_const: ComplexMatrix,
    pub phi1_lin: ComplexMatrix,
    pub phi2_const: ComplexMatrix,
    pub phi2_lin: ComplexMatrix,
}

impl ToeplitzSymbols {
    /// Coefficients `[z^0, z^1, z^2]` of `Phi1(z) Phi2(z)`; equal to `[0, I, 0]`.
    pub fn product_coefficients(&self) -> [ComplexMatrix; 3] {
        [
            &self.phi1_const * &self.phi2_const,
            &self.phi1_const * &self.phi2_lin + &self.phi1_lin * &self.phi2_const,
            &self.phi1_lin * &self.phi2_lin,
        ]
    }
}

pub fn toeplitz_symbols(t: &BclTriple) -> ToeplitzSymbols {
    let n = t.n();
    let ud = t.u.adjoint();
    let q = identity(n) - &t.p;
    ToeplitzSymbols {
        phi1_const: &q * &ud,
        phi1_lin: &t.p * &ud,
        phi2_const: &t.u * &t.p,
        phi2_lin: &t.u * q,
    }
}

/// Haar-random `U` and the projection onto `rank_p` Haar-random orthonormal
/// columns, reproducible from `seed`.
pub fn random_triple(n: usize, rank_p: usize, seed: u64) -> Result<BclTriple> {
    if rank_p > n {
        return Err(Error::InvalidParameter(format!("rank of P ({rank_p}) exceeds n ({n})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(n, &mut rng);
    let v = haar_isometry(n, rank_p, &mut rng);
    let p = &v * v.adjoint();
    BclTriple::from_parts(u, p)
}

/// A random triple with `n` in `2..=16` and `rank P` in `0..=n`, all drawn
/// from `seed`. Used for batch property runs.
pub fn corpus_triple(seed: u64) -> Result<BclTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.random_range(2..=16);
    let rank_p = rng.random_range(0..=n);
    random_triple(n, rank_p, seed)
}
