//! The irreducible 3-finite building block.
//!
//! The model space is spanned by the monomials `z^m w^n` and the Laurent
//! series
//!
//! ```text
//! g_j = sqrt(1 - r^2) * sum_{k >= 0} r^k z^(j+k) w^-(k+1),   j >= 0,
//! ```
//!
//! which are orthonormal in `L^2` of the torus. On this space `V1` is
//! multiplication by `gamma z` and `V2` multiplication by `w`:
//!
//! * `V1 z^m w^n = gamma z^(m+1) w^n`, `V1 g_j = gamma g_(j+1)`,
//! * `V2 z^m w^n = z^m w^(n+1)`, `V2 g_j = sqrt(1 - r^2) z^j + r g_(j+1)`.
//!
//! The cross-commutator is `gamma r g_0 g_0*` and the defect operator has
//! nonzero spectrum `{1, |r|, -|r|}`. The matrices are built from the closed
//! forms above and then checked entry by entry against inner products of
//! truncated Laurent expansions.

use crate::error::{Error, Result};
use crate::frame::OperatorFrame;
use crate::linalg::{
    c64, hermitian_eig, normal_eig, normality_residual, numerical_rank, ComplexMatrix, ComplexVector, Subspace,
    C64,
};
use crate::models::{sparse_from_triplets, sparse_to_dense_columns, BasisLabel, PairOp, Provenance, StructuredPair};
use crate::spectral::{check_rank_formula_for, RankFormulaReport};
use crate::tolerance::Tolerances;

/// Series tails below this are treated as negligible when choosing `K`.
pub const SERIES_TAIL: f64 = 1e-14;

/// Largest allowed discrepancy between the closed-form matrices and the
/// Laurent-expansion inner products.
pub const ORACLE_TOL: f64 = 1e-10;

/// Smallest truncation length `K` with `|r|^K <= 1e-14`.
pub fn min_series_terms(r: f64) -> usize {
    (SERIES_TAIL.ln() / r.abs().ln()).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct IzuchiModel {
    pub r: f64,
    pub gamma: C64,
    /// Monomial degree cap in each variable.
    pub n: usize,
    /// Number of series vectors.
    pub j: usize,
    /// Terms kept in each series.
    pub k: usize,
    pub pair: StructuredPair,
    /// Largest entrywise gap between closed-form matrices and Laurent inner products.
    pub oracle_residual: f64,
    /// `max |<b_a, b_b> - delta_ab|` over the basis.
    pub orthonormality_residual: f64,
}

impl IzuchiModel {
    pub fn monomial_index(&self, m: usize, n: usize) -> usize {
        m * self.n + n
    }

    pub fn series_index(&self, j: usize) -> usize {
        self.n * self.n + j
    }
}

/// A finite Laurent polynomial in `z, w`, as (z exponent, w exponent, coefficient) terms.
#[derive(Debug, Clone, Default)]
struct Laurent {
    terms: Vec<(i64, i64, C64)>,
}

impl Laurent {
    fn monomial(m: usize, n: usize) -> Self {
        Self { terms: vec![(m as i64, n as i64, c64(1.0, 0.0))] }
    }

    fn series(j: usize, r: f64, k: usize) -> Self {
        let s = (1.0 - r * r).sqrt();
        let terms = (0..k).map(|t| ((j + t) as i64, -(t as i64) - 1, c64(s * r.powi(t as i32), 0.0))).collect();
        Self { terms }
    }

    fn times(&self, dz: i64, dw: i64, scalar: C64) -> Self {
        Self { terms: self.terms.iter().map(|&(a, b, c)| (a + dz, b + dw, c * scalar)).collect() }
    }
}

/// Inner products `<f, b_a>` against every basis vector, by exponent matching.
/// A term with nonnegative `w` exponent can only meet a monomial; the term
/// `z^a w^-(t+1)` can only meet `g_(a-t)`.
fn project(f: &Laurent, r: f64, n: usize, j: usize, k: usize) -> ComplexVector {
    let s = (1.0 - r * r).sqrt();
    let mut out = ComplexVector::zeros(n * n + j);
    for &(a, b, c) in &f.terms {
        if a < 0 {
            continue;
        }
        if b >= 0 {
            if (a as usize) < n && (b as usize) < n {
                out[a as usize * n + b as usize] += c;
            }
        } else {
            let t = -b - 1;
            let i = a - t;
            if i >= 0 && (i as usize) < j && (t as usize) < k {
                out[n * n + i as usize] += c * s * r.powi(t as i32);
            }
        }
    }
    out
}

pub fn build_izuchi_model(r: f64, gamma: C64, n: usize, j: usize, k: usize) -> Result<IzuchiModel> {
    if !(r.abs() > 0.0 && r.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("r must satisfy 0 < |r| < 1, got {r}")));
    }
    if (gamma.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("|gamma| = {} is not 1", gamma.norm())));
    }
    if n < 4 || j < 4 {
        return Err(Error::InvalidParameter(format!("N and J must be at least 4, got N={n}, J={j}")));
    }
    let k_min = min_series_terms(r);
    if k < k_min {
        return Err(Error::InvalidParameter(format!("K = {k} is below {k_min} for r = {r}")));
    }

    let dim = n * n + j;
    let mono = |m: usize, p: usize| m * n + p;
    let ser = |i: usize| n * n + i;
    let s = (1.0 - r * r).sqrt();
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut labels = Vec::with_capacity(dim);
    for m in 0..n {
        for p in 0..n {
            labels.push(BasisLabel::Monomial { z: m, w: p });
            if m + 1 < n {
                t1.push((mono(m + 1, p), mono(m, p), gamma));
            }
            if p + 1 < n {
                t2.push((mono(m, p + 1), mono(m, p), c64(1.0, 0.0)));
            }
        }
    }
    for i in 0..j {
        labels.push(BasisLabel::Series { j: i });
        if i + 1 < j {
            t1.push((ser(i + 1), ser(i), gamma));
            t2.push((ser(i + 1), ser(i), c64(r, 0.0)));
        }
        if i < n {
            t2.push((mono(i, 0), ser(i), c64(s, 0.0)));
        }
    }
    // margin of two in every direction; series and z-powers are linked through
    // V2 g_i = s z^i + r g_(i+1), so both run to min(N, J)
    let a = n.min(j);
    let mut interior = Vec::new();
    for m in 0..a - 2 {
        for p in 0..n - 2 {
            interior.push(mono(m, p));
        }
    }
    interior.extend((0..a - 2).map(ser));

    let v1 = sparse_from_triplets(dim, dim, &t1)?;
    let v2 = sparse_from_triplets(dim, dim, &t2)?;

    // Laurent oracle: columns of V1, V2 and of the Gram matrix
    let d1 = sparse_to_dense_columns(&v1);
    let d2 = sparse_to_dense_columns(&v2);
    let mut oracle_residual = 0.0_f64;
    let mut orthonormality_residual = 0.0_f64;
    for b in 0..dim {
        let f = if b < n * n { Laurent::monomial(b / n, b % n) } else { Laurent::series(b - n * n, r, k) };
        let gram = project(&f, r, n, j, k);
        for a in 0..dim {
            let expected = if a == b { 1.0 } else { 0.0 };
            orthonormality_residual = orthonormality_residual.max((gram[a] - c64(expected, 0.0)).norm());
        }
        let col1 = project(&f.times(1, 0, gamma), r, n, j, k);
        let col2 = project(&f.times(0, 1, c64(1.0, 0.0)), r, n, j, k);
        oracle_residual = oracle_residual.max(column_gap(&col1, &d1[b])).max(column_gap(&col2, &d2[b]));
    }
    if orthonormality_residual > ORACLE_TOL {
        return Err(Error::CheckFailed(format!(
            "basis orthonormality residual {orthonormality_residual:.3e} exceeds {ORACLE_TOL:.0e}; K is too small"
        )));
    }
    if oracle_residual > ORACLE_TOL {
        return Err(Error::CheckFailed(format!(
            "closed-form matrices differ from Laurent inner products by {oracle_residual:.3e}"
        )));
    }

    let pair = StructuredPair::new(v1, v2, labels, interior, Provenance::Izuchi { r, gamma, n, j, k })?;
    Ok(IzuchiModel { r, gamma, n, j, k, pair, oracle_residual, orthonormality_residual })
}

fn column_gap(oracle: &ComplexVector, sparse_col: &[(usize, C64)]) -> f64 {
    let mut dense = oracle.clone();
    for &(i, v) in sparse_col {
        dense[i] -= v;
    }
    dense.iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[derive(Debug, Clone)]
pub struct IzuchiReport {
    pub cross_rank: usize,
    pub cross_eigenvalue: C64,
    pub normality_residual: f64,
    /// Nonzero defect eigenvalues, descending.
    pub defect_eigenvalues: Vec<f64>,
    pub dim_e1: usize,
    pub dim_em1: usize,
    pub rank_formula: RankFormulaReport,
    pub failures: Vec<String>,
}

impl IzuchiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the spectral data of the model against `gamma r` and `{1, |r|, -|r|}`.
pub fn verify_izuchi_invariants(model: &IzuchiModel, tol: f64) -> Result<IzuchiReport> {
    let frame = OperatorFrame::from_pair(&model.pair)?;
    let tols = Tolerances::default();
    let x = &frame.cross;
    let cross_rank = numerical_rank(x, tols.rank_tol_for(x.nrows(), x.ncols()));
    let normality_residual = normality_residual(x);
    let eigs = normal_eig(x, 1e-6)?;
    let cross_eigenvalue =
        eigs.iter().map(|(a, _)| *a).max_by(|p, q| p.norm().total_cmp(&q.norm())).unwrap_or_default();
    let defect_eigenvalues: Vec<f64> = hermitian_eig(&frame.defect, 1e-8)?
        .into_iter()
        .map(|p| p.value)
        .filter(|v| v.abs() > tols.cluster_tol)
        .collect();
    let rank_formula = check_rank_formula_for(&frame.defect, x, &tols)?;

    let expected_cross = model.gamma * model.r;
    let lam = model.r.abs();
    let mut failures = Vec::new();
    if cross_rank != 1 {
        failures.push(format!("cross-commutator rank {cross_rank}, expected 1"));
    }
    if (cross_eigenvalue - expected_cross).norm() > tol {
        failures.push(format!("cross eigenvalue {cross_eigenvalue} differs from {expected_cross}"));
    }
    if normality_residual > tol {
        failures.push(format!("normality residual {normality_residual:.3e}"));
    }
    let expected = [1.0, lam, -lam];
    if defect_eigenvalues.len() != 3 || defect_eigenvalues.iter().zip(expected).any(|(a, b)| (a - b).abs() > tol) {
        failures.push(format!("defect spectrum {defect_eigenvalues:?}, expected {expected:?}"));
    } else if (defect_eigenvalues[0] - defect_eigenvalues[1]).abs() <= tol
        || (defect_eigenvalues[1] - defect_eigenvalues[2]).abs() <= tol
    {
        failures.push("defect eigenvalues are not simple".into());
    }
    if rank_formula.dim_e1 != 1 || rank_formula.dim_em1 != 0 {
        failures.push(format!("dim E1 = {}, dim E-1 = {}", rank_formula.dim_e1, rank_formula.dim_em1));
    }
    if !(rank_formula.both_identities_hold && rank_formula.rank_c == 3) {
        failures.push(format!("rank formula failed: {rank_formula:?}"));
    }
    Ok(IzuchiReport {
        cross_rank,
        cross_eigenvalue,
        normality_residual,
        defect_eigenvalues,
        dim_e1: rank_formula.dim_e1,
        dim_em1: rank_formula.dim_em1,
        rank_formula,
        failures,
    })
}

/// Residuals of the defining properties of the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalBasisReport {
    /// `||f1 - P_W1 f1||`
    pub f1_in_w1: f64,
    /// `||P_W1 f3||`
    pub f3_perp_w1: f64,
    /// `|<f2, f3> + lambda|`
    pub f2_f3_inner: f64,
    /// `||G - I||` for the Gram matrix of `{f1, f3}`
    pub f1_f3_orthonormal: f64,
    /// `| |alpha| - 1 |` for the phase read off the compressed projection
    pub alpha_modulus: f64,
    /// Distances of `U f3`, `U f`, `U f1`, `U* f4` from `C f`, `C f2`, `ran Q`, `ran Q^perp`.
    pub u_action: [f64; 4],
    pub tol: f64,
}

impl CanonicalBasisReport {
    pub fn max_residual(&self) -> f64 {
        [self.f1_in_w1, self.f3_perp_w1, self.f2_f3_inner, self.f1_f3_orthonormal, self.alpha_modulus]
            .into_iter()
            .chain(self.u_action)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

/// `f` spans `E1`, `e_plus`, `e_minus` the `±lambda` eigenvectors, and
/// `f1..f4` the two orthonormal bases of `E_lambda + E_-lambda` adapted to
/// `W1` and `V2 W1`. All vectors are in the full basis of the pair.
#[derive(Debug, Clone)]
pub struct CanonicalBasis {
    pub lambda: f64,
    pub alpha: C64,
    pub f: ComplexVector,
    pub e_plus: ComplexVector,
    pub e_minus: ComplexVector,
    pub f1: ComplexVector,
    pub f2: ComplexVector,
    pub f3: ComplexVector,
    pub f4: ComplexVector,
    pub report: CanonicalBasisReport,
}

pub fn canonical_basis_3finite(model: &IzuchiModel, tol: f64) -> Result<CanonicalBasis> {
    canonical_basis_for_pair(&model.pair, tol)
}

fn inner(a: &ComplexVector, b: &ComplexVector) -> C64 {
    b.dotc(a)
}

/// Canonical basis for any structured pair whose defect has nonzero spectrum
/// `{1, lambda, -lambda}` with simple eigenvalues.
pub fn canonical_basis_for_pair(pair: &StructuredPair, tol: f64) -> Result<CanonicalBasis> {
    let frame = OperatorFrame::from_pair(pair)?;
    let cluster = Tolerances::default().cluster_tol;
    let eig = hermitian_eig(&frame.defect, 1e-8)?;
    let nonzero: Vec<_> = eig.iter().filter(|p| p.value.abs() > cluster).collect();
    let simple = nonzero.len() == 3
        && (nonzero[0].value - 1.0).abs() <= cluster
        && nonzero[1].value < 1.0 - cluster
        && (nonzero[1].value + nonzero[2].value).abs() <= cluster;
    if !simple {
        let values: Vec<f64> = nonzero.iter().map(|p| p.value).collect();
        return Err(Error::Inconsistent(format!(
            "defect spectrum {values:?} is not of the form {{1, lambda, -lambda}} with simple eigenvalues"
        )));
    }
    let lambda = 0.5 * (nonzero[1].value - nonzero[2].value);
    let f = frame.embed(&nonzero[0].vector);
    let e_plus = frame.embed(&nonzero[1].vector);
    let e_minus = frame.embed(&nonzero[2].vector);

    let p_w1 = |x: &ComplexVector| x - pair.apply_chain(&[PairOp::V1, PairOp::V1Adj], x);
    let p_w = |x: &ComplexVector| x - pair.apply_chain(&[PairOp::V1, PairOp::V2, PairOp::V2Adj, PairOp::V1Adj], x);

    // the (e_lambda, e_-lambda) entry of P_W1 is alpha sqrt(1 - lambda^2) / 2
    let root = (1.0 - lambda * lambda).sqrt();
    let raw_alpha = inner(&p_w1(&e_minus), &e_plus) * 2.0 / root;
    let alpha_modulus = (raw_alpha.norm() - 1.0).abs();
    let alpha = raw_alpha / raw_alpha.norm();

    let (cp, cm) = (((1.0 + lambda) / 2.0).sqrt(), ((1.0 - lambda) / 2.0).sqrt());
    let ab = alpha.conj();
    let f1 = &e_plus * c64(cp, 0.0) + &e_minus * (ab * cm);
    let f4 = &e_plus * c64(cp, 0.0) - &e_minus * (ab * cm);
    let f2 = &e_plus * c64(cm, 0.0) + &e_minus * (ab * cp);
    let f3 = &e_plus * c64(cm, 0.0) - &e_minus * (ab * cp);

    let dist_to_line = |y: &ComplexVector, v: &ComplexVector| (y - v * inner(y, v)).norm();
    let uf3 = pair.apply(PairOp::V1Adj, &f3);
    let uf = pair.apply(PairOp::V2, &f);
    let uf1 = pair.apply(PairOp::V2, &f1);
    let ustar_f4 = pair.apply(PairOp::V1, &f4);
    let ran_q = |y: &ComplexVector| p_w1(y) - &f * inner(y, &f) - &f1 * inner(y, &f1);
    let ran_q_perp = |y: &ComplexVector| p_w(y) - p_w1(y) - &f3 * inner(y, &f3);

    let gram = [inner(&f1, &f1), inner(&f1, &f3), inner(&f3, &f1), inner(&f3, &f3)];
    let f1_f3_orthonormal = ((gram[0] - 1.0).norm_sqr()
        + gram[1].norm_sqr()
        + gram[2].norm_sqr()
        + (gram[3] - 1.0).norm_sqr())
    .sqrt();

    let report = CanonicalBasisReport {
        f1_in_w1: (&f1 - p_w1(&f1)).norm(),
        f3_perp_w1: p_w1(&f3).norm(),
        f2_f3_inner: (inner(&f2, &f3) + lambda).norm(),
        f1_f3_orthonormal,
        alpha_modulus,
        u_action: [
            dist_to_line(&uf3, &f),
            dist_to_line(&uf, &f2),
            (&uf1 - ran_q(&uf1)).norm(),
            (&ustar_f4 - ran_q_perp(&ustar_f4)).norm(),
        ],
        tol,
    };
    Ok(CanonicalBasis { lambda, alpha, f, e_plus, e_minus, f1, f2, f3, f4, report })
}

/// Orthonormal basis of `span{V1^m V2^n f : m + n <= degree}`.
pub fn block_subspace(pair: &StructuredPair, f: &ComplexVector, degree: usize) -> Subspace {
    let mut cols = Vec::new();
    for m in 0..=degree {
        for n in 0..=degree - m {
            let mut ops = vec![PairOp::V1; m];
            ops.extend(std::iter::repeat_n(PairOp::V2, n));
            cols.push(pair.apply_chain(&ops, f));
        }
    }
    Subspace::span(&crate::linalg::columns_to_matrix(pair.dim(), &cols), 1e-10)
}

/// Largest `|<u, v>|` between orthonormal basis vectors of different block subspaces.
pub fn block_orthogonality(pair: &StructuredPair, generators: &[ComplexVector], degree: usize) -> f64 {
    let blocks: Vec<ComplexMatrix> =
        generators.iter().map(|f| block_subspace(pair, f, degree).into_basis()).collect();
    let mut worst = 0.0_f64;
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            let cross = blocks[a].adjoint() * &blocks[b];
            worst = worst.max(cross.iter().fold(0.0, |m, z| m.max(z.norm())));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_distance;
    use crate::models::{direct_sum, scramble, sparse_to_dense, INTERIOR_TOL};

    fn model(r: f64, gamma: C64) -> IzuchiModel {
        build_izuchi_model(r, gamma, 10, 10, min_series_terms(r).max(50)).unwrap()
    }

    #[test]
    fn series_vectors_are_orthogonal_with_known_norm() {
        let (r, k) = (0.5, 60);
        let s2 = 1.0 - r * r;
        // unnormalized g_j has norm^2 1 / (1 - r^2)
        let g3 = Laurent::series(3, r, k).times(0, 0, c64(1.0 / s2.sqrt(), 0.0));
        let g4 = Laurent::series(4, r, k);
        let norm2: f64 = g3.terms.iter().map(|t| t.2.norm_sqr()).sum();
        assert!((norm2 - 1.0 / s2).abs() < 1e-14);
        let p = project(&g4, r, 6, 8, k);
        assert!((p[36 + 4].re - 1.0).abs() < 1e-14);
        assert!(p.iter().enumerate().all(|(i, z)| i == 40 || z.norm() < 1e-15));
    }

    #[test]
    fn w_times_series_reindexes() {
        let (r, k, n, j) = (0.4, 60, 6, 8);
        let wg = Laurent::series(2, r, k).times(0, 1, c64(1.0, 0.0));
        let p = project(&wg, r, n, j, k);
        let s = (1.0 - r * r).sqrt();
        assert!((p[2 * n].re - s).abs() < 1e-14);
        assert!((p[n * n + 3].re - r).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_oracle_and_are_isometric() {
        let m = model(0.5, c64(0.0, 1.0));
        assert!(m.oracle_residual < 1e-12);
        assert!(m.orthonormality_residual < 1e-12);
        let res = m.pair.interior_residuals();
        assert!(res.within(INTERIOR_TOL), "{res:?}");
        // ||V2 g_j||^2 = (1 - r^2) + r^2
        let v2 = sparse_to_dense(m.pair.v2());
        let col = v2.column(m.series_index(3));
        assert!((col.norm_squared() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parameter_checks() {
        let g = c64(1.0, 0.0);
        assert!(build_izuchi_model(0.0, g, 8, 8, 50).is_err());
        assert!(build_izuchi_model(1.0, g, 8, 8, 50).is_err());
        assert!(build_izuchi_model(0.5, c64(0.5, 0.0), 8, 8, 50).is_err());
        assert!(build_izuchi_model(0.5, g, 3, 8, 50).is_err());
        assert!(build_izuchi_model(0.5, g, 8, 8, 10).is_err());
        assert_eq!(min_series_terms(0.5), 47);
        assert_eq!(min_series_terms(0.9), 306);
    }

    #[test]
    fn invariants_for_several_parameters() {
        for (r, gamma) in [(0.5, c64(1.0, 0.0)), (0.5, c64(0.0, 1.0)), (-0.3, c64(1.0, 0.0)), (0.8, C64::from_polar(1.0, 2.5))]
        {
            let report = verify_izuchi_invariants(&model(r, gamma), 1e-8).unwrap();
            assert!(report.passed(), "{:?}", report.failures);
            assert!((report.cross_eigenvalue - gamma * r).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_matches_hand_computation() {
        let (r, gamma) = (0.6, C64::from_polar(1.0, 0.4));
        let m = model(r, gamma);
        let frame = OperatorFrame::from_pair(&m.pair).unwrap();
        assert_eq!(frame.support, vec![0, m.series_index(0), m.series_index(1)]);
        let s = (1.0 - r * r).sqrt();
        let c = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c64(r * r, 0.0),
                c64(0.0, 0.0),
                c64(-r * s, 0.0),
                c64(0.0, 0.0),
                c64(1.0, 0.0),
                c64(0.0, 0.0),
                c64(-r * s, 0.0),
                c64(0.0, 0.0),
                c64(-r * r, 0.0),
            ],
        );
        assert!(frobenius_distance(&frame.defect, &c) < 1e-14);
        let mut x = ComplexMatrix::zeros(3, 3);
        x[(1, 1)] = gamma * r;
        assert!(frobenius_distance(&frame.cross, &x) < 1e-14);
    }

    #[test]
    fn canonical_basis_properties() {
        for (r, gamma) in [(0.5, c64(1.0, 0.0)), (-0.3, c64(0.0, 1.0)), (0.7, C64::from_polar(1.0, -1.0))] {
            let b = canonical_basis_3finite(&model(r, gamma), 1e-10).unwrap();
            assert!(b.report.passed(), "{:?}", b.report);
            assert!((b.lambda - r.abs()).abs() < 1e-12);
            assert!((b.f1.norm() - 1.0).abs() < 1e-12 && (b.f4.norm() - 1.0).abs() < 1e-12);
            assert!((inner(&b.f2, &b.f3) + b.lambda).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_basis_survives_scrambling() {
        let m = build_izuchi_model(0.5, c64(0.0, 1.0), 6, 6, 50).unwrap();
        let s = scramble(&m.pair, 11).unwrap();
        let b = canonical_basis_for_pair(&s, 1e-9).unwrap();
        assert!(b.report.passed(), "{:?}", b.report);
    }

    #[test]
    fn canonical_basis_rejects_other_spectra() {
        let p = crate::models::twisted_shift(c64(1.0, 0.0), 5).unwrap();
        assert!(canonical_basis_for_pair(&p, 1e-10).is_err());
    }

    #[test]
    fn blocks_of_a_sum_are_orthogonal() {
        let a = build_izuchi_model(0.5, c64(1.0, 0.0), 8, 8, 50).unwrap();
        let b = build_izuchi_model(0.3, c64(0.0, 1.0), 8, 8, 50).unwrap();
        let sum = direct_sum(&[a.pair.clone(), b.pair.clone()]).unwrap();
        let fa = canonical_basis_for_pair(&a.pair, 1e-10).unwrap().f;
        let fb = canonical_basis_for_pair(&b.pair, 1e-10).unwrap().f;
        let mut ga = ComplexVector::zeros(sum.dim());
        let mut gb = ComplexVector::zeros(sum.dim());
        ga.rows_mut(0, a.pair.dim()).copy_from(&fa);
        gb.rows_mut(a.pair.dim(), b.pair.dim()).copy_from(&fb);
        assert!(block_orthogonality(&sum, &[ga, gb], 3) < 1e-9);
    }
}
