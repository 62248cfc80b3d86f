//! Dense complex linear algebra primitives.
//!
//! Everything here is a pure function on `nalgebra` matrices of
//! [`Complex64`]. Eigen- and singular-value kernels come from `nalgebra`;
//! this module adds the conventions the rest of the crate relies on:
//! descending eigenvalue order, a canonical eigenvector phase, numerical rank
//! relative to the largest singular value, and tolerance-based clustering.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Two eigenvalues belong to the same cluster iff they differ by at most this.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Relative rank tolerance per unit of matrix dimension.
pub const RANK_TOL_FACTOR: f64 = 1e-12;

/// Singular values at or below this are never counted, whatever `sigma_max` is.
pub const RANK_ABSOLUTE_FLOOR: f64 = 1e-12;

/// Hermitian residuals below this pass regardless of the matrix norm.
pub const HERMITIAN_ABSOLUTE_FLOOR: f64 = 1e-13;

/// Orthonormality tolerance for subspace bases.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `max(rows, cols) * 1e-12`, the default relative tolerance of [`numerical_rank`].
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols).max(1) as f64 * RANK_TOL_FACTOR
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn real_diagonal(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { C64::default() })
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

pub fn hermitian_residual(a: &ComplexMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// `max(||Q - Q*||_F, ||Q^2 - Q||_F)`.
pub fn projector_residual(q: &ComplexMatrix) -> f64 {
    let herm = hermitian_residual(q);
    let idem = (q * q - q).norm();
    herm.max(idem)
}

/// `||A A* - A* A||_F`.
pub fn normality_residual(a: &ComplexMatrix) -> f64 {
    let ad = a.adjoint();
    (a * &ad - &ad * a).norm()
}

/// Largest absolute entry; zero for empty matrices.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

/// Rotate `v` so that its first entry of largest modulus is real and nonnegative.
///
/// Entries within a relative `1e-10` of the maximum modulus count as ties, so
/// that the choice does not flip on rounding noise.
pub fn phase_normalize(v: &mut ComplexVector) {
    let max = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .expect("some entry attains the maximum");
    let z = v[pivot];
    let phase = z.conj() / z.norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
    v[pivot] = c64(v[pivot].norm(), 0.0);
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: ComplexVector,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
///
/// The input is rejected when `||A - A*||_F > tol * ||A||_F`; otherwise its
/// Hermitian part is decomposed. Eigenvectors are orthonormal and
/// phase-normalized (see [`phase_normalize`]).
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    let n = ensure_square(a)?;
    let residual = hermitian_residual(a);
    if residual > (tol * a.norm()).max(HERMITIAN_ABSOLUTE_FLOOR) {
        return Err(Error::NotHermitian { residual });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // nalgebra's complex symmetric_eigen loses accuracy on large degenerate
    // clusters (eigenpair residuals ~1e-4 on 75x75 projections); faer's does not.
    let sym = faer::Mat::<C64>::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let eig = sym
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::CheckFailed(format!("Hermitian eigendecomposition did not converge: {e:?}")))?;
    let (values, vectors) = (eig.S().column_vector(), eig.U());
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut vector = ComplexVector::from_fn(n, |i, _| vectors[(i, k)]);
            phase_normalize(&mut vector);
            EigenPair { value: values[k].re, vector }
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values exceeding both `tol * sigma_max` and
/// [`RANK_ABSOLUTE_FLOOR`].
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&smax) = sv.first() else { return 0 };
    let cut = (tol * smax).max(RANK_ABSOLUTE_FLOOR);
    sv.iter().filter(|&&s| s > cut).count()
}

/// [`numerical_rank`] with the default tolerance for the matrix shape.
pub fn default_rank(a: &ComplexMatrix) -> usize {
    numerical_rank(a, default_rank_tol(a.nrows(), a.ncols()))
}

/// Split a descending (or ascending) sequence into maximal runs whose
/// consecutive gaps are at most `tol`.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).abs() > tol {
            if i > start {
                clusters.push(start..i);
            }
            start = i;
        }
    }
    clusters
}

/// A subspace of `C^ambient_dim`, carried by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: ComplexMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { basis: ComplexMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { basis: identity(ambient_dim) }
    }

    /// Wrap columns that are already orthonormal (checked at [`ORTHONORMAL_TOL`]).
    pub fn from_orthonormal(basis: ComplexMatrix) -> Result<Self> {
        let k = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let residual = frobenius_distance(&gram, &identity(k));
        if residual > ORTHONORMAL_TOL {
            return Err(Error::InvalidParameter(format!(
                "basis columns are not orthonormal (residual {residual:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Orthonormal basis of the column span, dropping directions whose singular
    /// value is below `tol * sigma_max`.
    pub fn span(vectors: &ComplexMatrix, tol: f64) -> Self {
        let ambient = vectors.nrows();
        if vectors.ncols() == 0 || ambient == 0 {
            return Self::zero(ambient);
        }
        let svd = vectors.clone().svd(true, false);
        let u = svd.u.expect("requested U");
        let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
        if smax <= RANK_ABSOLUTE_FLOOR {
            return Self::zero(ambient);
        }
        let mut cols: Vec<(f64, ComplexVector)> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > tol * smax)
            .map(|(k, &s)| (s, u.column(k).into_owned()))
            .collect();
        cols.sort_by(|x, y| y.0.total_cmp(&x.0));
        let vecs: Vec<ComplexVector> = cols
            .into_iter()
            .map(|(_, mut v)| {
                phase_normalize(&mut v);
                v
            })
            .collect();
        Self { basis: columns_to_matrix(ambient, &vecs) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn into_basis(self) -> ComplexMatrix {
        self.basis
    }

    /// Orthogonal projection onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `||v - P v||`.
    pub fn distance_to(&self, v: &ComplexVector) -> f64 {
        let coeffs = self.basis.adjoint() * v;
        (v - &self.basis * coeffs).norm()
    }

    /// Same dimension and projector difference at most `tol` in Frobenius norm.
    pub fn same_span(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && frobenius_distance(&self.projector(), &other.projector()) <= tol
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim();
        if self.dim() == n {
            return Subspace::zero(n);
        }
        let q = identity(n) - self.projector();
        eigenspace(&q, 1.0, 1e-6).expect("complement projector is Hermitian")
    }

    /// Embed into a larger space: row `i` of the basis goes to row `rows[i]`.
    pub fn embed(&self, ambient_dim: usize, rows: &[usize]) -> Subspace {
        Subspace { basis: embed_rows(&self.basis, ambient_dim, rows) }
    }
}

pub fn columns_to_matrix(rows: usize, cols: &[ComplexVector]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Place the rows of `m` at positions `rows` of a zero matrix with `ambient_dim` rows.
pub fn embed_rows(m: &ComplexMatrix, ambient_dim: usize, rows: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(ambient_dim, m.ncols());
    for (i, &r) in rows.iter().enumerate() {
        out.row_mut(r).copy_from(&m.row(i));
    }
    out
}

/// Eigenspace of a Hermitian matrix for eigenvalues within `tol` of `value`.
pub fn eigenspace(a: &ComplexMatrix, value: f64, tol: f64) -> Result<Subspace> {
    let n = ensure_square(a)?;
    let pairs = hermitian_eig(a, 1e-8)?;
    let vecs: Vec<ComplexVector> = pairs
        .into_iter()
        .filter(|p| (p.value - value).abs() <= tol)
        .map(|p| p.vector)
        .collect();
    Ok(Subspace { basis: columns_to_matrix(n, &vecs) })
}

/// Intersection of two subspaces, computed as the eigenspace of `P1 + P2`
/// at eigenvalue 2 within `tol`.
pub fn subspace_intersection(s1: &Subspace, s2: &Subspace, tol: f64) -> Result<Subspace> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in C^{} and C^{}",
            s1.ambient_dim(),
            s2.ambient_dim()
        )));
    }
    if s1.dim() == 0 || s2.dim() == 0 {
        return Ok(Subspace::zero(s1.ambient_dim()));
    }
    let sum = s1.projector() + s2.projector();
    eigenspace(&sum, 2.0, tol)
}

/// Eigendecomposition of a normal matrix by simultaneous diagonalization of
/// its Hermitian and skew-Hermitian parts.
///
/// Returns `(eigenvalue, unit eigenvector)` pairs; eigenvalues are Rayleigh
/// quotients of the returned vectors. Fails with [`Error::NotNormal`] when
/// `||MM* - M*M||_F > tol * ||M||_F^2`.
pub fn normal_eig(m: &ComplexMatrix, tol: f64) -> Result<Vec<(C64, ComplexVector)>> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = m.norm();
    let residual = normality_residual(m);
    if residual > tol * scale * scale {
        return Err(Error::NotNormal { residual: residual / (scale * scale), tol });
    }
    let md = m.adjoint();
    let re_part = (m + &md).scale(0.5);
    let im_part = (m - &md) * c64(0.0, -0.5);
    let outer = hermitian_eig(&re_part, 1e-8)?;
    let values: Vec<f64> = outer.iter().map(|p| p.value).collect();
    let cluster_tol = 1e-8 * scale.max(1.0);
    let mut out = Vec::with_capacity(n);
    for range in cluster_sorted(&values, cluster_tol) {
        let block: Vec<ComplexVector> = outer[range].iter().map(|p| p.vector.clone()).collect();
        let q = columns_to_matrix(n, &block);
        let inner = &q.adjoint() * &im_part * &q;
        for pair in hermitian_eig(&inner, 1e-6)? {
            let mut v = &q * pair.vector;
            v.unscale_mut(v.norm());
            phase_normalize(&mut v);
            let alpha = (v.adjoint() * m * &v)[(0, 0)];
            out.push((alpha, v));
        }
    }
    Ok(out)
}

/// Complex matrix with i.i.d. standard complex Gaussian entries.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(c64(re * s, im * s));
    }
    ComplexMatrix::from_row_slice(rows, cols, &data)
}

/// Haar-distributed `rows x cols` isometry (`cols <= rows`): QR of a complex
/// Gaussian matrix with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(cols <= rows, "an isometry needs cols <= rows");
    if cols == 0 {
        return ComplexMatrix::zeros(rows, 0);
    }
    let g = complex_gaussian(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    haar_isometry(n, n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = complex_gaussian(n, n, &mut rng);
        (&g + g.adjoint()).scale(0.5)
    }

    #[test]
    fn identity_eigenvalues() {
        let pairs = hermitian_eig(&identity(2), 1e-12).unwrap();
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_eigenvalues_sorted_descending() {
        let pairs = hermitian_eig(&real_diagonal(&[-0.5, 1.0, 0.5]), 1e-12).unwrap();
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        for (v, e) in vals.iter().zip([1.0, 0.5, -0.5]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let a = random_hermitian(8, 11);
        let pairs = hermitian_eig(&a, 1e-12).unwrap();
        let mut rec = ComplexMatrix::zeros(8, 8);
        for p in &pairs {
            rec += (&p.vector * p.vector.adjoint()).scale(p.value);
            let k = p.vector.iter().position(|z| z.norm() > 0.0).unwrap();
            let pivot = p.vector.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let first_max = p.vector.iter().position(|z| z.norm() >= pivot * (1.0 - 1e-10)).unwrap();
            assert!(k <= first_max);
            assert!(p.vector[first_max].im == 0.0 && p.vector[first_max].re > 0.0);
        }
        assert!(frobenius_distance(&a, &rec) <= 1e-10 * a.norm());
        let v = columns_to_matrix(8, &pairs.iter().map(|p| p.vector.clone()).collect::<Vec<_>>());
        assert!(frobenius_distance(&(v.adjoint() * &v), &identity(8)) < 1e-12);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect, 1e-12), Err(Error::NotSquare { .. })));
        let mut a = identity(2);
        a[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(hermitian_eig(&a, 1e-12), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rank_basics() {
        assert_eq!(default_rank(&ComplexMatrix::zeros(3, 3)), 0);
        let v = ComplexVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 2.0), c64(-1.0, 1.0)]);
        let w = ComplexVector::from_vec(vec![c64(0.5, 0.5), c64(3.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(default_rank(&(&v * w.adjoint())), 1);
        assert_eq!(default_rank(&real_diagonal(&[1.0, -1.0])), 2);
        assert_eq!(default_rank(&ComplexMatrix::zeros(0, 0)), 0);
    }

    fn unit(n: usize, k: usize) -> Subspace {
        let mut b = ComplexMatrix::zeros(n, 1);
        b[(k, 0)] = c64(1.0, 0.0);
        Subspace::from_orthonormal(b).unwrap()
    }

    #[test]
    fn intersection_of_identical_and_orthogonal_lines() {
        let e1 = unit(3, 0);
        let same = subspace_intersection(&e1, &e1, 1e-8).unwrap();
        assert!(same.same_span(&e1, 1e-12));
        let none = subspace_intersection(&e1, &unit(3, 1), 1e-8).unwrap();
        assert_eq!(none.dim(), 0);
        assert!(subspace_intersection(&e1, &unit(4, 0), 1e-8).is_err());
    }

    #[test]
    fn intersection_recovers_shared_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shared = haar_isometry(6, 1, &mut rng);
        let a = complex_gaussian(6, 2, &mut rng);
        let b = complex_gaussian(6, 2, &mut rng);
        let mut s1 = shared.clone().resize_horizontally(3, C64::default());
        s1.columns_mut(1, 2).copy_from(&a);
        let mut s2 = shared.clone().resize_horizontally(3, C64::default());
        s2.columns_mut(1, 2).copy_from(&b);
        let s1 = Subspace::span(&s1, 1e-12);
        let s2 = Subspace::span(&s2, 1e-12);
        assert_eq!((s1.dim(), s2.dim()), (3, 3));
        let meet = subspace_intersection(&s1, &s2, 1e-8).unwrap();
        assert_eq!(meet.dim(), 1);
        let v = shared.column(0).into_owned();
        // sin of the angle between v and the recovered line
        assert!(meet.distance_to(&v) < 1e-8);
        let swapped = subspace_intersection(&s2, &s1, 1e-8).unwrap();
        assert!(meet.same_span(&swapped, 1e-8));
    }

    #[test]
    fn projector_from_subspace_is_orthogonal_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = Subspace::span(&complex_gaussian(7, 3, &mut rng), 1e-12);
        assert!(projector_residual(&s.projector()) < 1e-10);
        let comp = s.orthogonal_complement();
        assert_eq!(comp.dim(), 4);
        assert!(frobenius_distance(&(s.projector() + comp.projector()), &identity(7)) < 1e-10);
    }

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        let u1 = haar_unitary(5, &mut ChaCha8Rng::seed_from_u64(3));
        let u2 = haar_unitary(5, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(u1, u2);
        assert!(frobenius_distance(&(u1.adjoint() * &u1), &identity(5)) < 1e-12);
    }

    #[test]
    fn normal_eig_of_diagonalized_normal_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = haar_unitary(5, &mut rng);
        let vals = [c64(0.5, 0.0), c64(0.0, 1.0), c64(0.0, 1.0), c64(-0.3, 0.2), c64(0.0, 0.0)];
        let d = ComplexMatrix::from_fn(5, 5, |i, j| if i == j { vals[i] } else { C64::default() });
        let m = &u * d * u.adjoint();
        let mut got: Vec<C64> = normal_eig(&m, 1e-10).unwrap().into_iter().map(|(a, _)| a).collect();
        let mut want = vals.to_vec();
        let key = |z: &C64| (z.re * 1e6).round() as i64 * 1_000_000_000 + (z.im * 1e6).round() as i64;
        got.sort_by_key(key);
        want.sort_by_key(key);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-10);
        }
    }

    #[test]
    fn normal_eig_rejects_nilpotent() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(normal_eig(&m, 1e-8), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn cluster_runs() {
        let v = [1.0, 1.0 - 1e-10, 0.5, 0.2, 0.2 + 1e-9];
        let c = cluster_sorted(&v, 1e-8);
        assert_eq!(c, vec![0..2, 2..3, 3..5]);
    }
}
