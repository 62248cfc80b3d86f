//! Spectral analysis of defect operators.
//!
//! A defect operator is a difference of two projections, so its spectrum sits
//! in `[-1, 1]` and its interior eigenvalues come in `±lambda` pairs of equal
//! multiplicity. This module splits the spectrum into the `+1`, `-1`, `0` and
//! interior parts, checks the two rank identities linking the defect to the
//! cross-commutator, and builds the canonical form of a difference of
//! projections from its unitary data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bcl::{wandering_projections, BclTriple};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, cluster_sorted, columns_to_matrix, frobenius_distance, haar_isometry, haar_unitary, hermitian_eig,
    identity, numerical_rank, projector_residual, singular_values, ComplexMatrix, ComplexVector, EigenPair,
    Subspace,
};
use crate::tolerance::Tolerances;

/// Defect operators are contractions; spectral norms above `1 + CONTRACTION_SLACK` are rejected.
pub const CONTRACTION_SLACK: f64 = 1e-8;

/// A `±lambda` eigenvalue pair of the defect operator.
#[derive(Debug, Clone)]
pub struct InteriorPair {
    pub lambda: f64,
    pub mult_pos: usize,
    pub mult_neg: usize,
    pub basis_pos: Subspace,
    pub basis_neg: Subspace,
}

impl InteriorPair {
    pub fn is_balanced(&self) -> bool {
        self.mult_pos == self.mult_neg
    }
}

#[derive(Debug, Clone)]
pub struct SpectralProfile {
    pub dim_e1: usize,
    pub dim_em1: usize,
    pub basis_e1: Subspace,
    pub basis_em1: Subspace,
    /// Sorted by `lambda` descending.
    pub interior_pairs: Vec<InteriorPair>,
    /// Dimension of the positive generic part (sum of `mult_pos`).
    pub dim_kplus: usize,
    pub kernel_dim: usize,
    /// Set when some interior eigenvalue has no partner of equal multiplicity.
    pub symmetry_violation: bool,
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

impl SpectralProfile {
    pub fn ambient_dim(&self) -> usize {
        self.basis_e1.ambient_dim()
    }

    /// Nonzero eigenvalues (outside the kernel band), descending.
    pub fn nonzero_eigenvalues(&self, cluster_tol: f64) -> Vec<f64> {
        self.eigenvalues.iter().copied().filter(|v| v.abs() > cluster_tol).collect()
    }
}

fn span_of(n: usize, pairs: &[&EigenPair]) -> Subspace {
    let cols: Vec<ComplexVector> = pairs.iter().map(|p| p.vector.clone()).collect();
    Subspace::from_orthonormal(columns_to_matrix(n, &cols)).expect("eigenvectors are orthonormal")
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub fn spectral_profile(c: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralProfile> {
    let n = c.nrows();
    let pairs = hermitian_eig(c, 1e-8)?;
    if let Some(top) = pairs.iter().map(|p| p.value.abs()).reduce(f64::max) {
        if top > 1.0 + CONTRACTION_SLACK {
            return Err(Error::NotContraction { norm: top });
        }
    }
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.value).collect();

    let e1: Vec<&EigenPair> = pairs.iter().filter(|p| p.value >= 1.0 - cluster_tol).collect();
    let em1: Vec<&EigenPair> = pairs.iter().filter(|p| p.value <= -1.0 + cluster_tol).collect();
    let kernel_dim = pairs.iter().filter(|p| p.value.abs() <= cluster_tol).count();
    let pos: Vec<&EigenPair> =
        pairs.iter().filter(|p| p.value > cluster_tol && p.value < 1.0 - cluster_tol).collect();
    // both lists by ascending |value|, so that negatives line up with positives
    let neg: Vec<&EigenPair> =
        pairs.iter().filter(|p| p.value < -cluster_tol && p.value > -1.0 + cluster_tol).collect();
    let mut pos_asc = pos.clone();
    pos_asc.reverse();

    let pos_vals: Vec<f64> = pos_asc.iter().map(|p| p.value).collect();
    let neg_vals: Vec<f64> = neg.iter().map(|p| -p.value).collect();
    let pos_clusters = cluster_sorted(&pos_vals, cluster_tol);
    let neg_clusters = cluster_sorted(&neg_vals, cluster_tol);

    let mut interior_pairs = Vec::new();
    let mut violation = false;
    let (mut i, mut j) = (0, 0);
    while i < pos_clusters.len() || j < neg_clusters.len() {
        let lp = pos_clusters.get(i).map(|r| mean(pos_vals[r.clone()].iter().copied()));
        let ln = neg_clusters.get(j).map(|r| mean(neg_vals[r.clone()].iter().copied()));
        let (take_pos, take_neg) = match (lp, ln) {
            (Some(a), Some(b)) if (a - b).abs() <= cluster_tol => (true, true),
            (Some(a), Some(b)) => (a < b, a >= b),
            (Some(_), None) => (true, false),
            (None, Some(_)) => (false, true),
            (None, None) => unreachable!(),
        };
        let pos_part: Vec<&EigenPair> =
            if take_pos { pos_asc[pos_clusters[i].clone()].to_vec() } else { Vec::new() };
        let neg_part: Vec<&EigenPair> = if take_neg { neg[neg_clusters[j].clone()].to_vec() } else { Vec::new() };
        let lambda = mean(pos_part.iter().map(|p| p.value).chain(neg_part.iter().map(|p| -p.value)));
        let pair = InteriorPair {
            lambda,
            mult_pos: pos_part.len(),
            mult_neg: neg_part.len(),
            basis_pos: span_of(n, &pos_part),
            basis_neg: span_of(n, &neg_part),
        };
        violation |= !pair.is_balanced();
        interior_pairs.push(pair);
        i += take_pos as usize;
        j += take_neg as usize;
    }
    interior_pairs.reverse();

    Ok(SpectralProfile {
        dim_e1: e1.len(),
        dim_em1: em1.len(),
        basis_e1: span_of(n, &e1),
        basis_em1: span_of(n, &em1),
        dim_kplus: interior_pairs.iter().map(|p| p.mult_pos).sum(),
        interior_pairs,
        kernel_dim,
        symmetry_violation: violation,
        eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankFormulaReport {
    pub rank_c: usize,
    pub rank_x: usize,
    pub dim_e1: usize,
    pub dim_em1: usize,
    pub dim_kplus: usize,
    /// `rank C = rank X + dim E1 + dim K+`
    pub additive_holds: bool,
    /// `rank C = 2 rank X + dim E1 - dim E-1`
    pub index_holds: bool,
    pub both_identities_hold: bool,
}

/// Both rank identities for a defect operator `c` and cross-commutator `x`
/// given as matrices on a common finite-dimensional space.
pub fn check_rank_formula_for(c: &ComplexMatrix, x: &ComplexMatrix, tols: &Tolerances) -> Result<RankFormulaReport> {
    let profile = spectral_profile(c, tols.cluster_tol)?;
    let rank_c = numerical_rank(c, tols.rank_tol_for(c.nrows(), c.ncols()));
    let rank_x = numerical_rank(x, tols.rank_tol_for(x.nrows(), x.ncols()));
    let additive_holds = rank_c == rank_x + profile.dim_e1 + profile.dim_kplus;
    let index_holds = rank_c as i64 == 2 * rank_x as i64 + profile.dim_e1 as i64 - profile.dim_em1 as i64;
    Ok(RankFormulaReport {
        rank_c,
        rank_x,
        dim_e1: profile.dim_e1,
        dim_em1: profile.dim_em1,
        dim_kplus: profile.dim_kplus,
        additive_holds,
        index_holds,
        both_identities_hold: additive_holds && index_holds,
    })
}

pub fn check_rank_formula(t: &BclTriple, tols: &Tolerances) -> Result<RankFormulaReport> {
    let w = wandering_projections(t)?;
    check_rank_formula_for(&w.defect, &w.cross, tols)
}

/// Unitary data of a difference of two projections `A = P - Q`:
/// `A = 0_ker + I_E1 + (-I_E-1) + D + (-D)` with `D` a strict positive
/// contraction on the generic space `K`.
#[derive(Debug, Clone)]
pub struct DiffProjCanonicalForm {
    pub kerdim: usize,
    pub dim_e1: usize,
    pub dim_em1: usize,
    pub d: ComplexMatrix,
    /// Projection on `ker A`, `kerdim x kerdim`.
    pub r: ComplexMatrix,
    /// Unitary on `K` commuting with `D`.
    pub uc: ComplexMatrix,
}

impl DiffProjCanonicalForm {
    pub fn generic_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn total_dim(&self) -> usize {
        self.kerdim + self.dim_e1 + self.dim_em1 + 2 * self.generic_dim()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let k = self.d.nrows();
        if self.d.ncols() != k || self.uc.nrows() != k || self.uc.ncols() != k {
            return Err(Error::DimensionMismatch("D and Uc must be square of equal size".into()));
        }
        if self.r.nrows() != self.kerdim || self.r.ncols() != self.kerdim {
            return Err(Error::DimensionMismatch(format!("R must be {0}x{0}", self.kerdim)));
        }
        if projector_residual(&self.r) > tol {
            return Err(Error::InvalidParameter("R is not an orthogonal projection".into()));
        }
        for pair in hermitian_eig(&self.d, tol)? {
            if !(pair.value > tol && pair.value < 1.0 - tol) {
                return Err(Error::InvalidParameter(format!(
                    "D must be a strict positive contraction, found eigenvalue {}",
                    pair.value
                )));
            }
        }
        if frobenius_distance(&(self.uc.adjoint() * &self.uc), &identity(k)) > tol {
            return Err(Error::InvalidParameter("Uc is not unitary".into()));
        }
        let comm = (&self.uc * &self.d - &self.d * &self.uc).norm();
        if comm > tol {
            return Err(Error::InvalidParameter(format!("Uc does not commute with D (residual {comm:.3e})")));
        }
        Ok(())
    }
}

/// Tolerance at which [`build_difference_projections`] validates its input.
pub const CANONICAL_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct DifferenceOfProjections {
    pub a: ComplexMatrix,
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
}

impl DifferenceOfProjections {
    /// Offset of the generic `K + K` block.
    pub fn generic_offset(form: &DiffProjCanonicalForm) -> usize {
        form.kerdim + form.dim_e1 + form.dim_em1
    }
}

/// `f(D)` for Hermitian `D` through its eigendecomposition.
fn hermitian_function(d: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let k = d.nrows();
    let mut out = ComplexMatrix::zeros(k, k);
    for pair in hermitian_eig(d, 1e-8)? {
        let v = &pair.vector;
        out += v * v.adjoint() * c64(f(pair.value), 0.0);
    }
    Ok(out)
}

pub fn build_difference_projections(form: &DiffProjCanonicalForm) -> Result<DifferenceOfProjections> {
    form.validate(CANONICAL_FORM_TOL)?;
    let k = form.generic_dim();
    let dim = form.total_dim();
    let off = DifferenceOfProjections::generic_offset(form);
    let (e1_at, em1_at) = (form.kerdim, form.kerdim + form.dim_e1);

    let mut a = ComplexMatrix::zeros(dim, dim);
    let mut p = ComplexMatrix::zeros(dim, dim);
    let mut q = ComplexMatrix::zeros(dim, dim);
    p.view_mut((0, 0), (form.kerdim, form.kerdim)).copy_from(&form.r);
    q.view_mut((0, 0), (form.kerdim, form.kerdim)).copy_from(&form.r);
    for i in 0..form.dim_e1 {
        a[(e1_at + i, e1_at + i)] = c64(1.0, 0.0);
        p[(e1_at + i, e1_at + i)] = c64(1.0, 0.0);
    }
    for i in 0..form.dim_em1 {
        a[(em1_at + i, em1_at + i)] = c64(-1.0, 0.0);
        q[(em1_at + i, em1_at + i)] = c64(1.0, 0.0);
    }
    if k > 0 {
        let id = identity(k);
        let s = hermitian_function(&form.d, |x| (1.0 - x * x).max(0.0).sqrt())?;
        let upper = &form.uc * &s;
        let lower = &s * form.uc.adjoint();
        let half = c64(0.5, 0.0);
        a.view_mut((off, off), (k, k)).copy_from(&form.d);
        a.view_mut((off + k, off + k), (k, k)).copy_from(&(-&form.d));
        for (m, top, bottom) in [(&mut p, &id + &form.d, &id - &form.d), (&mut q, &id - &form.d, &id + &form.d)] {
            m.view_mut((off, off), (k, k)).copy_from(&(top * half));
            m.view_mut((off, off + k), (k, k)).copy_from(&(&upper * half));
            m.view_mut((off + k, off), (k, k)).copy_from(&(&lower * half));
            m.view_mut((off + k, off + k), (k, k)).copy_from(&(bottom * half));
        }
    }
    Ok(DifferenceOfProjections { a, p, q })
}

/// A random canonical form with `dim K <= max_generic`. `D` gets repeated
/// eigenvalues now and then, and `Uc` is block-unitary on its eigenspaces.
pub fn random_canonical_form(max_generic: usize, seed: u64) -> DiffProjCanonicalForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kerdim = rng.random_range(0..=3);
    let dim_e1 = rng.random_range(0..=2);
    let dim_em1 = rng.random_range(0..=2);
    let k = rng.random_range(0..=max_generic);

    let rank_r = rng.random_range(0..=kerdim);
    let v = haar_isometry(kerdim, rank_r, &mut rng);
    let r = &v * v.adjoint();

    let mut levels: Vec<f64> = Vec::new();
    while levels.len() < k {
        let lambda = rng.random_range(0.05..0.95);
        let repeat = if rng.random_bool(0.3) { 2 } else { 1 };
        for _ in 0..repeat {
            if levels.len() < k {
                levels.push(lambda);
            }
        }
    }
    let mut d = ComplexMatrix::zeros(k, k);
    let mut uc = ComplexMatrix::zeros(k, k);
    let mut at = 0;
    while at < k {
        let end = (at..k).find(|&i| levels[i] != levels[at]).unwrap_or(k);
        let size = end - at;
        uc.view_mut((at, at), (size, size)).copy_from(&haar_unitary(size, &mut rng));
        for i in at..end {
            d[(i, i)] = c64(levels[i], 0.0);
        }
        at = end;
    }
    // rotate K so that D is not diagonal in the standard basis
    let w = haar_unitary(k, &mut rng);
    let d = &w * d * w.adjoint();
    let uc = &w * uc * w.adjoint();
    DiffProjCanonicalForm { kerdim, dim_e1, dim_em1, d, r, uc }
}

/// One interior eigenvalue cluster of `A` matched against its negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryEntry {
    pub lambda: f64,
    pub mult_pos: usize,
    pub mult_neg: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub entries: Vec<SymmetryEntry>,
    pub violations: usize,
}

impl SymmetryReport {
    pub fn from_profile(profile: &SpectralProfile) -> Self {
        let entries: Vec<SymmetryEntry> = profile
            .interior_pairs
            .iter()
            .map(|ip| SymmetryEntry { lambda: ip.lambda, mult_pos: ip.mult_pos, mult_neg: ip.mult_neg })
            .collect();
        let violations = entries.iter().filter(|e| e.mult_pos != e.mult_neg).count();
        Self { entries, violations }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// For `A = P - Q`, every eigenvalue `lambda` with `tol < |lambda| < 1 - tol`
/// must have `-lambda` as an eigenvalue of the same multiplicity.
pub fn eigen_symmetry_check(
    a: &ComplexMatrix,
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    tol: f64,
) -> Result<SymmetryReport> {
    if a.shape() != p.shape() || a.shape() != q.shape() {
        return Err(Error::DimensionMismatch("A, P and Q must have equal shapes".into()));
    }
    let scale = a.norm().max(1.0);
    if projector_residual(p) > tol * scale || projector_residual(q) > tol * scale {
        return Err(Error::InvalidParameter("P and Q must be orthogonal projections".into()));
    }
    let diff = frobenius_distance(a, &(p - q));
    if diff > tol * scale {
        return Err(Error::InvalidParameter(format!("A differs from P - Q by {diff:.3e}")));
    }
    Ok(SymmetryReport::from_profile(&spectral_profile(a, tol)?))
}

/// Rank of the `2k x 2k` generic block starting at `offset`.
pub fn generic_block_rank(m: &ComplexMatrix, offset: usize, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let block = m.view((offset, offset), (2 * k, 2 * k)).into_owned();
    let sv = singular_values(&block);
    sv.iter().filter(|&&s| s > 1e-8).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcl::random_triple;
    use crate::linalg::{real_diagonal, C64};

    #[test]
    fn profile_of_rank_three_diagonal() {
        let p = spectral_profile(&real_diagonal(&[1.0, 0.5, -0.5]), 1e-8).unwrap();
        assert_eq!(p.dim_e1, 1);
        assert_eq!(p.dim_em1, 0);
        assert_eq!(p.interior_pairs.len(), 1);
        let ip = &p.interior_pairs[0];
        assert!((ip.lambda - 0.5).abs() < 1e-12);
        assert_eq!((ip.mult_pos, ip.mult_neg), (1, 1));
        assert_eq!(p.dim_kplus, 1);
        assert_eq!(p.kernel_dim, 0);
        assert!(!p.symmetry_violation);
    }

    #[test]
    fn profile_of_zero() {
        let p = spectral_profile(&ComplexMatrix::zeros(4, 4), 1e-8).unwrap();
        assert_eq!(p.kernel_dim, 4);
        assert_eq!(p.dim_e1 + p.dim_em1 + p.dim_kplus, 0);
        assert!(p.interior_pairs.is_empty());
    }

    #[test]
    fn profile_flags_unpaired_and_rejects_non_contractions() {
        let p = spectral_profile(&real_diagonal(&[0.7, -0.4, -0.4]), 1e-8).unwrap();
        assert!(p.symmetry_violation);
        assert_eq!(p.interior_pairs.len(), 2);
        assert!(matches!(
            spectral_profile(&real_diagonal(&[1.5]), 1e-8),
            Err(Error::NotContraction { .. })
        ));
    }

    #[test]
    fn profile_dimensions_add_up() {
        for seed in 0..300 {
            let n = 2 + seed as usize % 11;
            let t = random_triple(n, seed as usize % (n + 1), seed).unwrap();
            let c = wandering_projections(&t).unwrap().defect;
            let p = spectral_profile(&c, 1e-8).unwrap();
            assert!(!p.symmetry_violation, "seed {seed}");
            let interior: usize = p.interior_pairs.iter().map(|ip| ip.mult_pos + ip.mult_neg).sum();
            assert_eq!(p.dim_e1 + p.dim_em1 + interior + p.kernel_dim, n);
        }
    }

    #[test]
    fn rank_formula_trivial_and_two_finite() {
        let tols = Tolerances::default();
        let t = BclTriple::from_parts(identity(3), real_diagonal(&[1.0, 0.0, 1.0])).unwrap();
        let r = check_rank_formula(&t, &tols).unwrap();
        assert_eq!((r.rank_c, r.rank_x, r.dim_e1, r.dim_kplus), (0, 0, 0, 0));
        assert!(r.both_identities_hold);

        let t = BclTriple::two_finite(C64::from_polar(1.0, 2.0)).unwrap();
        let r = check_rank_formula(&t, &tols).unwrap();
        assert_eq!((r.rank_c, r.rank_x, r.dim_e1, r.dim_em1), (2, 1, 1, 1));
        assert!(r.both_identities_hold);
    }

    #[test]
    fn rank_formula_random() {
        let tols = Tolerances::default();
        for seed in 0..200 {
            let n = 2 + seed as usize % 15;
            let t = random_triple(n, (seed as usize * 7) % (n + 1), 50_000 + seed).unwrap();
            assert!(check_rank_formula(&t, &tols).unwrap().both_identities_hold, "seed {seed}");
        }
    }

    fn scalar_form(d: f64) -> DiffProjCanonicalForm {
        DiffProjCanonicalForm {
            kerdim: 0,
            dim_e1: 0,
            dim_em1: 0,
            d: real_diagonal(&[d]),
            r: ComplexMatrix::zeros(0, 0),
            uc: identity(1),
        }
    }

    #[test]
    fn canonical_form_scalar_generic_block() {
        let out = build_difference_projections(&scalar_form(0.5)).unwrap();
        let s = 0.75_f64.sqrt() / 2.0;
        let p = ComplexMatrix::from_row_slice(2, 2, &[c64(0.75, 0.0), c64(s, 0.0), c64(s, 0.0), c64(0.25, 0.0)]);
        let q = ComplexMatrix::from_row_slice(2, 2, &[c64(0.25, 0.0), c64(s, 0.0), c64(s, 0.0), c64(0.75, 0.0)]);
        assert!(frobenius_distance(&out.p, &p) < 1e-15);
        assert!(frobenius_distance(&out.q, &q) < 1e-15);
    }

    #[test]
    fn canonical_form_e1_only() {
        let form = DiffProjCanonicalForm {
            kerdim: 1,
            dim_e1: 1,
            dim_em1: 0,
            d: ComplexMatrix::zeros(0, 0),
            r: ComplexMatrix::zeros(1, 1),
            uc: ComplexMatrix::zeros(0, 0),
        };
        let out = build_difference_projections(&form).unwrap();
        assert_eq!(out.a, real_diagonal(&[0.0, 1.0]));
        assert_eq!(out.p, real_diagonal(&[0.0, 1.0]));
        assert_eq!(out.q, ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn canonical_form_rejects_bad_data() {
        let mut form = scalar_form(1.0);
        assert!(build_difference_projections(&form).is_err());
        form = random_canonical_form(6, 3);
        while form.generic_dim() < 2 {
            form = random_canonical_form(6, form.generic_dim() as u64 + 100);
        }
        let k = form.generic_dim();
        form.d = real_diagonal(&(0..k).map(|i| 0.1 + 0.1 * i as f64).collect::<Vec<_>>());
        form.uc = haar_unitary(k, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(build_difference_projections(&form).is_err());
    }

    #[test]
    fn random_canonical_forms_reconstruct() {
        for seed in 0..100 {
            let form = random_canonical_form(8, seed);
            let out = build_difference_projections(&form).unwrap();
            assert!(projector_residual(&out.p) < 1e-10);
            assert!(projector_residual(&out.q) < 1e-10);
            assert!(frobenius_distance(&out.a, &(&out.p - &out.q)) < 1e-10);
            let off = DifferenceOfProjections::generic_offset(&form);
            let k = form.generic_dim();
            assert_eq!(generic_block_rank(&out.p, off, k), k);
            assert_eq!(generic_block_rank(&out.q, off, k), k);
        }
    }

    #[test]
    fn symmetry_of_constructed_pair() {
        let out = build_difference_projections(&scalar_form(0.3)).unwrap();
        let report = eigen_symmetry_check(&out.a, &out.p, &out.q, 1e-10).unwrap();
        assert!(report.holds());
        assert_eq!(report.entries.len(), 1);
        let e = &report.entries[0];
        assert_eq!((e.mult_pos, e.mult_neg), (1, 1));
        assert!((e.lambda - 0.3).abs() < 1e-12);

        let a = real_diagonal(&[1.0, -1.0]);
        let report = eigen_symmetry_check(&a, &real_diagonal(&[1.0, 0.0]), &real_diagonal(&[0.0, 1.0]), 1e-10).unwrap();
        assert!(report.holds() && report.entries.is_empty());
    }

    #[test]
    fn symmetry_of_random_projection_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let (rp, rq) = (rng.random_range(0..=10), rng.random_range(0..=10));
            let vp = haar_isometry(10, rp, &mut rng);
            let vq = haar_isometry(10, rq, &mut rng);
            let p = &vp * vp.adjoint();
            let q = &vq * vq.adjoint();
            let report = eigen_symmetry_check(&(&p - &q), &p, &q, 1e-8).unwrap();
            assert!(report.holds(), "{report:?}");
        }
    }

    #[test]
    fn symmetry_rejects_non_difference() {
        let p = real_diagonal(&[1.0, 0.0]);
        assert!(eigen_symmetry_check(&real_diagonal(&[0.5, 0.0]), &p, &p, 1e-10).is_err());
    }
}
