//! Brute-force oracle: the analytic Toeplitz pair `(M_Phi1, M_Phi2)` of a
//! triple, truncated to polynomials of degree `< N` in `H^2_W(D)`.
//!
//! Coefficient blocks are indexed by degree: the coefficient of `z^k` occupies
//! rows `k*n .. (k+1)*n`. Multiplication by a degree-one symbol is block lower
//! bidiagonal, and the part landing in degree `N` is dropped.

use crate::bcl::{toeplitz_symbols, validate_triple, BclTriple, TRIPLE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{identity, ComplexMatrix};

/// Degrees used for oracle runs unless overridden.
pub const DEFAULT_DEGREES: usize = 4;

#[derive(Debug, Clone)]
pub struct TruncatedToeplitzPair {
    n: usize,
    degrees: usize,
    v1: ComplexMatrix,
    v2: ComplexMatrix,
    /// Images of the same operators on `deg < N` with the degree-`N` block kept,
    /// `(N+1)n x Nn`.
    v1_image: ComplexMatrix,
    v2_image: ComplexMatrix,
}

fn block_bidiagonal(constant: &ComplexMatrix, linear: &ComplexMatrix, degrees: usize, rows: usize) -> ComplexMatrix {
    let n = constant.nrows();
    let mut m = ComplexMatrix::zeros(rows * n, degrees * n);
    for k in 0..degrees {
        if k < rows {
            m.view_mut((k * n, k * n), (n, n)).copy_from(constant);
        }
        if k + 1 < rows {
            m.view_mut(((k + 1) * n, k * n), (n, n)).copy_from(linear);
        }
    }
    m
}

pub fn build_truncated_pair(t: &BclTriple, degrees: usize) -> Result<TruncatedToeplitzPair> {
    if degrees < 2 {
        return Err(Error::InvalidParameter(format!("degree cap must be at least 2, got {degrees}")));
    }
    validate_triple(t, TRIPLE_TOL)?.into_result()?;
    let s = toeplitz_symbols(t);
    Ok(TruncatedToeplitzPair {
        n: t.n(),
        degrees,
        v1: block_bidiagonal(&s.phi1_const, &s.phi1_lin, degrees, degrees),
        v2: block_bidiagonal(&s.phi2_const, &s.phi2_lin, degrees, degrees),
        v1_image: block_bidiagonal(&s.phi1_const, &s.phi1_lin, degrees, degrees + 1),
        v2_image: block_bidiagonal(&s.phi2_const, &s.phi2_lin, degrees, degrees + 1),
    })
}

impl TruncatedToeplitzPair {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> usize {
        self.degrees
    }

    pub fn v1(&self) -> &ComplexMatrix {
        &self.v1
    }

    pub fn v2(&self) -> &ComplexMatrix {
        &self.v2
    }

    /// `(row_degree, col_degree)` block of `m`.
    pub fn block(&self, m: &ComplexMatrix, row: usize, col: usize) -> ComplexMatrix {
        m.view((row * self.n, col * self.n), (self.n, self.n)).into_owned()
    }

    fn leading(&self, m: &ComplexMatrix, degrees: usize) -> ComplexMatrix {
        let k = degrees * self.n;
        m.view((0, 0), (k, k)).into_owned()
    }

    /// `||V1 V2 - V2 V1||_F` on degrees `< N - 1`.
    pub fn commutator_residual(&self) -> f64 {
        let c = &self.v1 * &self.v2 - &self.v2 * &self.v1;
        self.leading(&c, self.degrees - 1).norm()
    }

    /// `max_i ||(Vi* Vi - I)|_{deg < N-1}||_F`.
    pub fn isometry_residual(&self) -> f64 {
        let k = self.degrees - 1;
        let id = identity(k * self.n);
        [&self.v1, &self.v2]
            .iter()
            .map(|v| (self.leading(&(v.adjoint() * *v), k) - &id).norm())
            .fold(0.0, f64::max)
    }

    /// `||V1 V2 - S||_F` on degrees `< N - 1`, with `S` the one-block degree shift.
    pub fn product_shift_residual(&self) -> f64 {
        let k = self.degrees - 1;
        let n = self.n;
        let prod = self.leading(&(&self.v1 * &self.v2), k);
        let mut shift = ComplexMatrix::zeros(k * n, k * n);
        for d in 0..k.saturating_sub(1) {
            shift.view_mut(((d + 1) * n, d * n), (n, n)).fill_with_identity();
        }
        (prod - shift).norm()
    }
}

/// Defect operator and cross-commutator of the truncated pair.
#[derive(Debug, Clone)]
pub struct OracleOperators {
    pub degrees: usize,
    pub n: usize,
    /// `I - V1 V1* - V2 V2* + V1 V2 V1* V2*`
    pub defect_full: ComplexMatrix,
    /// `V2* V1 - V1 V2*`
    pub cross_full: ComplexMatrix,
}

impl OracleOperators {
    pub fn defect_block(&self) -> ComplexMatrix {
        self.defect_full.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn cross_block(&self) -> ComplexMatrix {
        self.cross_full.view((0, 0), (self.n, self.n)).into_owned()
    }

    /// Largest modulus of any entry outside the degree-0 block, over both operators.
    pub fn off_support_max(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for m in [&self.defect_full, &self.cross_full] {
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    if i >= n || j >= n {
                        worst = worst.max(m[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }
}

/// Evaluate both operators by brute-force matrix products.
///
/// Every product in the defect only sums over degrees `<= max(row, col)`, so
/// the truncated matrices give it exactly. `V2* V1` would lose its top
/// block to the dropped overflow, so it is formed from the overflow-keeping
/// images instead; with that, both operators are exact on all `N` degrees.
pub fn oracle_cross_and_defect(pair: &TruncatedToeplitzPair) -> Result<OracleOperators> {
    if pair.degrees < 3 {
        return Err(Error::InvalidParameter(format!(
            "oracle needs at least 3 degrees, got {}",
            pair.degrees
        )));
    }
    let dim = pair.degrees * pair.n;
    let v1 = &pair.v1;
    let v2 = &pair.v2;
    let v1d = v1.adjoint();
    let v2d = v2.adjoint();
    let defect_full = identity(dim) - v1 * &v1d - v2 * &v2d + v1 * v2 * &v1d * &v2d;
    let cross_full = pair.v2_image.adjoint() * &pair.v1_image - v1 * &v2d;
    Ok(OracleOperators { degrees: pair.degrees, n: pair.n, defect_full, cross_full })
}
