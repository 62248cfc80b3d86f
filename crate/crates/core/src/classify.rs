//! Classification of pairs whose cross-commutator is compact and normal.
//!
//! Such a pair splits into irreducible blocks, one per vector of an
//! eigenbasis of the cross-commutator compressed to `E1 = W1 ∩ W2`, plus a
//! shift-unitary remainder. A block with eigenvalue `alpha` is
//!
//! * 1-finite when `alpha = 0` (the bishift),
//! * 2-finite when `|alpha| = 1` (the twisted shift),
//! * 3-finite when `0 < |alpha| < 1` (the Izuchi model with `lambda = |alpha|`,
//!   `gamma = alpha / |alpha|`).
//!
//! The multiset of eigenvalues (the fundamental sequence) and the unitary data
//! of the remainder decide joint unitary equivalence.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{OperatorFrame, PairInput, WanderingFrame};
use crate::linalg::{
    columns_to_matrix, eigenspace, hermitian_eig, normal_eig, normality_residual, numerical_rank,
    subspace_intersection, ComplexMatrix, ComplexVector, Subspace, C64,
};
use crate::spectral::spectral_profile;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    OneFinite,
    TwoFinite,
    ThreeFinite,
}

impl BlockKind {
    /// Rank of the defect operator of a block of this kind.
    pub fn defect_rank(self) -> usize {
        match self {
            BlockKind::OneFinite => 1,
            BlockKind::TwoFinite => 2,
            BlockKind::ThreeFinite => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeFiniteParams {
    pub lambda: f64,
    pub gamma: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDescriptor {
    pub kind: BlockKind,
    /// Fundamental-sequence entry; exactly 0 for 1-finite blocks and
    /// unimodular for 2-finite ones.
    pub alpha: C64,
    pub params: Option<ThreeFiniteParams>,
    /// Unit vector of `E1` generating the block, in the input's basis.
    pub f_vector: Vec<C64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftUnitaryInvariant {
    /// Dimension of the remainder inside the wandering space.
    pub dim: usize,
    pub eigs_on_p: Vec<C64>,
    pub eigs_on_pperp: Vec<C64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `||XX* - X*X||_F / ||X||_F^2`
    pub normality: f64,
    /// `||X - P_E1 X P_E1||_F`
    pub e1_containment: f64,
    /// Distance between `W1 ∩ W2` and the `+1` eigenspace of the defect.
    pub e1_mismatch: f64,
    /// Largest `| |alpha| - lambda |` over 3-finite blocks, `lambda` the
    /// nearest interior defect eigenvalue.
    pub alpha_lambda_gap: f64,
    /// `||P - U P U*||_F` on the shift-unitary remainder.
    pub shift_unitary_commutation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    /// `dim E1`
    pub k: usize,
    pub blocks: Vec<BlockDescriptor>,
    pub shift_unitary: ShiftUnitaryInvariant,
    pub residuals: Residuals,
}

impl ClassificationResult {
    pub fn fundamental_sequence(&self) -> Vec<C64> {
        self.blocks.iter().map(|b| b.alpha).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactNormalReport {
    pub normality_residual: f64,
    pub interior_isometry: Option<f64>,
    pub interior_commutation: Option<f64>,
}

fn relative_normality(x: &ComplexMatrix) -> f64 {
    let scale = x.norm_squared();
    if scale == 0.0 {
        0.0
    } else {
        normality_residual(x) / scale
    }
}

fn check_frame_normal(frame: &OperatorFrame, tols: &Tolerances) -> Result<f64> {
    let residual = relative_normality(&frame.cross);
    if residual > tols.check_tol {
        return Err(Error::NotNormal { residual, tol: tols.check_tol });
    }
    Ok(residual)
}

/// Normality of the cross-commutator, plus interior isometry and commutation
/// for truncated models.
pub fn check_compact_normal(input: &PairInput, tols: &Tolerances) -> Result<CompactNormalReport> {
    let (interior_isometry, interior_commutation) = match input {
        PairInput::Triple(_) => (None, None),
        PairInput::Pair(p) => {
            let r = p.interior_residuals();
            if !r.within(tols.check_tol) {
                return Err(Error::CheckFailed(format!(
                    "interior is not isometric and commuting (isometry {:.3e}, commutation {:.3e})",
                    r.isometry, r.commutation
                )));
            }
            (Some(r.isometry), Some(r.commutation))
        }
    };
    let frame = OperatorFrame::from_input(input)?;
    let normality_residual = check_frame_normal(&frame, tols)?;
    Ok(CompactNormalReport { normality_residual, interior_isometry, interior_commutation })
}

/// `E1` in frame coordinates and the cross-commutator compressed to it.
#[derive(Debug, Clone)]
pub struct E1Data {
    pub basis: Subspace,
    pub x_on_e1: ComplexMatrix,
    pub containment_residual: f64,
    pub mismatch: f64,
}

fn e1_on_frame(frame: &OperatorFrame, tols: &Tolerances) -> Result<E1Data> {
    let w1 = eigenspace(&frame.p_w1, 1.0, tols.cluster_tol)?;
    let w2 = eigenspace(&frame.p_w2, 1.0, tols.cluster_tol)?;
    let basis = subspace_intersection(&w1, &w2, tols.cluster_tol)?;
    let plus_one = eigenspace(&frame.defect, 1.0, tols.cluster_tol)?;
    let mismatch = if basis.dim() == plus_one.dim() {
        (basis.projector() - plus_one.projector()).norm()
    } else {
        f64::INFINITY
    };
    if mismatch > tols.check_tol.max(1e-8) * (1 + basis.dim()) as f64 {
        return Err(Error::Inconsistent(format!(
            "W1 ∩ W2 has dimension {} but the +1 eigenspace of the defect has dimension {} (gap {mismatch:.3e})",
            basis.dim(),
            plus_one.dim()
        )));
    }
    let b = basis.basis();
    let x = &frame.cross;
    let x_on_e1 = b.adjoint() * x * b;
    let p = basis.projector();
    let containment_residual = (x - &p * x * &p).norm();
    let scale = x.norm().max(1.0);
    if containment_residual > tols.check_tol * scale {
        return Err(Error::Inconsistent(format!(
            "cross-commutator is not supported on E1 (residual {containment_residual:.3e})"
        )));
    }
    Ok(E1Data { basis, x_on_e1, containment_residual, mismatch })
}

pub fn e1_data(input: &PairInput, tols: &Tolerances) -> Result<E1Data> {
    let frame = OperatorFrame::from_input(input)?;
    check_frame_normal(&frame, tols)?;
    e1_on_frame(&frame, tols)
}

/// Kind of a block from the modulus of its entry, with the entry snapped to
/// 0 or the unit circle inside the bands.
pub fn block_kind(alpha: C64, band_tol: f64) -> (BlockKind, C64) {
    let m = alpha.norm();
    if m <= band_tol {
        (BlockKind::OneFinite, C64::default())
    } else if m >= 1.0 - band_tol {
        (BlockKind::TwoFinite, alpha / m)
    } else {
        (BlockKind::ThreeFinite, alpha)
    }
}

/// Argument in `[0, 2 pi)`, with values a hair below `2 pi` folded to 0.
fn argument(a: C64) -> f64 {
    if a.norm() == 0.0 {
        return 0.0;
    }
    let t = a.arg().rem_euclid(TAU);
    if TAU - t < 1e-12 {
        0.0
    } else {
        t
    }
}

const ORDER_TOL: f64 = 1e-9;

fn compare_blocks(a: &BlockDescriptor, b: &BlockDescriptor) -> Ordering {
    let (ma, mb) = (a.alpha.norm(), b.alpha.norm());
    if (ma - mb).abs() > ORDER_TOL {
        return mb.total_cmp(&ma);
    }
    let (ta, tb) = (argument(a.alpha), argument(b.alpha));
    if (ta - tb).abs() > ORDER_TOL {
        return ta.total_cmp(&tb);
    }
    for (x, y) in a.f_vector.iter().zip(&b.f_vector) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn sequence_on_frame(frame: &OperatorFrame, tols: &Tolerances) -> Result<ClassificationResult> {
    let normality = check_frame_normal(frame, tols)?;
    let e1 = e1_on_frame(frame, tols)?;
    let eigs = normal_eig(&e1.x_on_e1, tols.check_tol)?;
    let interior: Vec<f64> = spectral_profile(&frame.defect, tols.cluster_tol)?
        .interior_pairs
        .iter()
        .map(|p| p.lambda)
        .collect();
    let mut gap = 0.0_f64;
    let mut blocks = Vec::with_capacity(eigs.len());
    for (alpha, v) in eigs {
        let (kind, alpha) = block_kind(alpha, tols.band_tol);
        let params = (kind == BlockKind::ThreeFinite).then(|| {
            let lambda = alpha.norm();
            let nearest = interior.iter().map(|l| (l - lambda).abs()).fold(f64::INFINITY, f64::min);
            gap = gap.max(nearest);
            ThreeFiniteParams { lambda, gamma: alpha / lambda }
        });
        let f = frame.embed(&(e1.basis.basis() * v));
        blocks.push(BlockDescriptor { kind, alpha, params, f_vector: f.iter().copied().collect() });
    }
    blocks.sort_by(compare_blocks);
    Ok(ClassificationResult {
        k: e1.basis.dim(),
        blocks,
        shift_unitary: ShiftUnitaryInvariant::default(),
        residuals: Residuals {
            normality,
            e1_containment: e1.containment_residual,
            e1_mismatch: e1.mismatch,
            alpha_lambda_gap: gap,
            shift_unitary_commutation: 0.0,
        },
    })
}

/// Fundamental sequence and block descriptors; the shift-unitary part is left empty.
pub fn fundamental_sequence(input: &PairInput, tols: &Tolerances) -> Result<ClassificationResult> {
    sequence_on_frame(&OperatorFrame::from_input(input)?, tols)
}

/// Gram-Schmidt `v` against the columns of `basis` (twice, for stability).
fn orthogonalize(basis: &[ComplexVector], v: &ComplexVector) -> ComplexVector {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(&r);
            r -= b * c;
        }
    }
    r
}

const ORBIT_TOL: f64 = 1e-8;

/// Eigenvalues of `u` on `ran p` and `ran p^perp` for the part of the
/// wandering space not reached from the defect's range under `U` and `U*`.
fn shift_unitary_on(
    wandering: &WanderingFrame,
    seeds: &[ComplexVector],
    tols: &Tolerances,
) -> Result<(ShiftUnitaryInvariant, f64)> {
    let w = wandering.dim();
    let u = &wandering.u;
    let ud = u.adjoint();
    let bh = wandering.basis.adjoint();

    let mut orbit: Vec<ComplexVector> = Vec::new();
    let mut queue: Vec<ComplexVector> = seeds.iter().map(|s| &bh * s).collect();
    while let Some(v) = queue.pop() {
        let r = orthogonalize(&orbit, &v);
        let norm = r.norm();
        if norm <= ORBIT_TOL * v.norm().max(1.0) {
            continue;
        }
        let r = r.unscale(norm);
        queue.push(u * &r);
        queue.push(&ud * &r);
        orbit.push(r);
        if orbit.len() == w {
            break;
        }
    }
    let orbit_proj = columns_to_matrix(w, &orbit);
    let complement = Subspace::from_orthonormal(orbit_proj)?.orthogonal_complement();
    let rb = complement.basis();
    let dim = rb.ncols();
    if dim == 0 {
        return Ok((ShiftUnitaryInvariant::default(), 0.0));
    }
    let u_r = rb.adjoint() * u * rb;
    let p_r = rb.adjoint() * &wandering.p * rb;
    let commutation = (&p_r - &u_r * &p_r * u_r.adjoint()).norm();
    if commutation > tols.check_tol * (dim as f64).sqrt().max(1.0) {
        return Err(Error::CheckFailed(format!(
            "P does not commute with U on the shift-unitary part (residual {commutation:.3e})"
        )));
    }
    let mut eigs = [Vec::new(), Vec::new()];
    for (slot, value) in [(0, 1.0), (1, 0.0)] {
        let s = eigenspace(&p_r, value, 1e-6)?;
        if s.dim() == 0 {
            continue;
        }
        let block = s.basis().adjoint() * &u_r * s.basis();
        for (lambda, _) in normal_eig(&block, tols.check_tol.max(1e-8))? {
            if (lambda.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::CheckFailed(format!(
                    "eigenvalue {lambda} of U on the shift-unitary part is not unimodular"
                )));
            }
            eigs[slot].push(lambda);
        }
        eigs[slot].sort_by(|a, b| argument(*a).total_cmp(&argument(*b)));
    }
    let [eigs_on_p, eigs_on_pperp] = eigs;
    Ok((ShiftUnitaryInvariant { dim, eigs_on_p, eigs_on_pperp }, commutation))
}

/// Eigenvectors of the defect with nonzero eigenvalue, in the full basis.
fn defect_range(frame: &OperatorFrame, tols: &Tolerances) -> Result<Vec<ComplexVector>> {
    Ok(hermitian_eig(&frame.defect, 1e-8)?
        .into_iter()
        .filter(|p| p.value.abs() > tols.cluster_tol)
        .map(|p| frame.embed(&p.vector))
        .collect())
}

pub fn shift_unitary_invariant(input: &PairInput, tols: &Tolerances) -> Result<ShiftUnitaryInvariant> {
    let frame = OperatorFrame::from_input(input)?;
    let wandering = WanderingFrame::from_input(input)?;
    Ok(shift_unitary_on(&wandering, &defect_range(&frame, tols)?, tols)?.0)
}

/// Full pipeline: normality, `E1`, fundamental sequence, shift-unitary part.
pub fn classify(input: &PairInput, tols: &Tolerances) -> Result<ClassificationResult> {
    tols.validate()?;
    check_compact_normal(input, tols)?;
    let frame = OperatorFrame::from_input(input)?;
    let mut result = sequence_on_frame(&frame, tols)?;
    let wandering = WanderingFrame::from_input(input)?;
    let (su, commutation) = shift_unitary_on(&wandering, &defect_range(&frame, tols)?, tols)?;
    result.shift_unitary = su;
    result.residuals.shift_unitary_commutation = commutation;
    Ok(result)
}

/// Rank of the cross-commutator compared with the number of nonzero entries.
pub fn cross_rank_matches(input: &PairInput, result: &ClassificationResult, tols: &Tolerances) -> Result<bool> {
    let frame = OperatorFrame::from_input(input)?;
    let x = &frame.cross;
    let rank = numerical_rank(x, tols.rank_tol_for(x.nrows(), x.ncols()));
    Ok(rank == result.blocks.iter().filter(|b| b.kind != BlockKind::OneFinite).count())
}

/// Greedy matching: each entry of `a` in order takes the closest unused entry
/// of `b` within `tol`.
pub fn greedy_match(a: &[C64], b: &[C64], tol: f64) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut perm = Vec::with_capacity(a.len());
    for x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .filter(|(_, d)| *d <= tol)
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[best.0] = true;
        perm.push(best.0);
    }
    Some(perm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub k_a: usize,
    pub k_b: usize,
    pub sequence_a: Vec<C64>,
    pub sequence_b: Vec<C64>,
    pub sequences_match: bool,
    pub shift_unitary_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// `matching[i] = j` pairs block `i` of the first input with block `j` of the second.
    pub matching: Option<Vec<usize>>,
    pub report: EquivalenceReport,
}

pub fn compare_classifications(a: &ClassificationResult, b: &ClassificationResult, tol: f64) -> EquivalenceVerdict {
    let (sa, sb) = (a.fundamental_sequence(), b.fundamental_sequence());
    let matching = if a.k == b.k { greedy_match(&sa, &sb, tol) } else { None };
    let su = |x: &ShiftUnitaryInvariant, y: &ShiftUnitaryInvariant| {
        greedy_match(&x.eigs_on_p, &y.eigs_on_p, tol).is_some()
            && greedy_match(&x.eigs_on_pperp, &y.eigs_on_pperp, tol).is_some()
    };
    let shift_unitary_match = su(&a.shift_unitary, &b.shift_unitary);
    let sequences_match = matching.is_some();
    let equivalent = sequences_match && shift_unitary_match;
    EquivalenceVerdict {
        equivalent,
        matching: if equivalent { matching } else { None },
        report: EquivalenceReport {
            k_a: a.k,
            k_b: b.k,
            sequence_a: sa,
            sequence_b: sb,
            sequences_match,
            shift_unitary_match,
        },
    }
}

pub fn decide_equivalence(a: &PairInput, b: &PairInput, tols: &Tolerances) -> Result<EquivalenceVerdict> {
    let ca = classify(a, tols)?;
    let cb = classify(b, tols)?;
    Ok(compare_classifications(&ca, &cb, tols.match_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcl::{random_triple, BclTriple};
    use crate::izuchi::build_izuchi_model;
    use crate::linalg::{c64, haar_unitary, identity, real_diagonal};
    use crate::models::{bishift_truncated, direct_sum, scramble, twisted_shift};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn izuchi(r: f64, gamma: C64, n: usize) -> PairInput {
        build_izuchi_model(r, gamma, n, n, 50).unwrap().pair.into()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-8
    }

    #[test]
    fn doubly_commuting_inputs_are_normal() {
        let t = BclTriple::from_parts(identity(3), real_diagonal(&[1.0, 0.0, 0.0])).unwrap();
        assert!(check_compact_normal(&t.into(), &tols()).is_ok());
        assert!(check_compact_normal(&bishift_truncated(5).unwrap().into(), &tols()).is_ok());
        assert!(check_compact_normal(&izuchi(0.5, c64(0.0, 1.0), 8), &tols()).is_ok());
    }

    #[test]
    fn generic_triples_are_not_normal() {
        let mut rejected = 0;
        for seed in 0..20 {
            let t = random_triple(4, 2, seed).unwrap();
            let x = crate::bcl::cross_commutator_on_wandering(&t);
            let expected_fail = relative_normality(&x) > 1e-8;
            let got = check_compact_normal(&t.into(), &tols());
            assert_eq!(got.is_err(), expected_fail);
            if expected_fail {
                assert!(matches!(got, Err(Error::NotNormal { .. })));
                rejected += 1;
            }
        }
        assert!(rejected > 15);
    }

    #[test]
    fn e1_of_basic_models() {
        let alpha = C64::from_polar(1.0, 0.4);
        let e = e1_data(&BclTriple::two_finite(alpha).unwrap().into(), &tols()).unwrap();
        assert_eq!(e.basis.dim(), 1);
        assert!((e.basis.basis()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(close(e.x_on_e1[(0, 0)], alpha.conj()));

        let e = e1_data(&bishift_truncated(4).unwrap().into(), &tols()).unwrap();
        assert_eq!(e.basis.dim(), 1);
        assert!(e.x_on_e1[(0, 0)].norm() < 1e-14);

        let e = e1_data(&izuchi(0.5, c64(1.0, 0.0), 8), &tols()).unwrap();
        assert_eq!(e.basis.dim(), 1);
    }

    #[test]
    fn sequence_of_a_mixed_sum() {
        let sum = direct_sum(&[
            bishift_truncated(5).unwrap(),
            twisted_shift(c64(0.0, 1.0), 5).unwrap(),
            build_izuchi_model(0.5, c64(1.0, 0.0), 8, 8, 50).unwrap().pair,
        ])
        .unwrap();
        let r = classify(&sum.into(), &tols()).unwrap();
        assert_eq!(r.k, 3);
        let kinds: Vec<BlockKind> = r.blocks.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BlockKind::TwoFinite, BlockKind::ThreeFinite, BlockKind::OneFinite]);
        assert!(close(r.blocks[0].alpha, c64(0.0, -1.0)));
        assert!(close(r.blocks[1].alpha, c64(0.5, 0.0)));
        let p = r.blocks[1].params.unwrap();
        assert!((p.lambda - 0.5).abs() < 1e-10 && close(p.gamma, c64(1.0, 0.0)));
        assert_eq!(r.blocks[2].alpha, C64::default());
        assert!(r.residuals.alpha_lambda_gap < 1e-8);
        assert_eq!(r.shift_unitary.dim, 0);
    }

    #[test]
    fn twisted_alone_and_trivial_triple() {
        let alpha = C64::from_polar(1.0, 2.2);
        let r = classify(&twisted_shift(alpha, 6).unwrap().into(), &tols()).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.blocks[0].kind, BlockKind::TwoFinite);
        assert!(close(r.blocks[0].alpha, alpha.conj()));

        let t = BclTriple::from_parts(identity(4), real_diagonal(&[1.0, 1.0, 0.0, 0.0])).unwrap();
        let r = classify(&t.into(), &tols()).unwrap();
        assert_eq!(r.k, 0);
        assert!(r.blocks.is_empty());
        assert_eq!(r.shift_unitary.dim, 4);
        assert_eq!(r.shift_unitary.eigs_on_p.len(), 2);
        assert_eq!(r.shift_unitary.eigs_on_pperp.len(), 2);
        assert!(r.shift_unitary.eigs_on_p.iter().all(|z| close(*z, c64(1.0, 0.0))));
    }

    #[test]
    fn shift_unitary_of_diagonal_triple() {
        let theta = 0.8;
        let mut u = identity(2);
        u[(1, 1)] = C64::from_polar(1.0, theta);
        let t = BclTriple::from_parts(u, real_diagonal(&[1.0, 0.0])).unwrap();
        let su = shift_unitary_invariant(&t.into(), &tols()).unwrap();
        assert_eq!(su.eigs_on_p.len(), 1);
        assert!(close(su.eigs_on_p[0], c64(1.0, 0.0)));
        assert!(close(su.eigs_on_pperp[0], C64::from_polar(1.0, theta)));
    }

    #[test]
    fn shift_unitary_ignores_the_irreducible_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = haar_unitary(3, &mut rng);
        let commuting = BclTriple::from_parts(w.clone(), identity(3)).unwrap();
        let t = BclTriple::direct_sum(&[BclTriple::two_finite(c64(0.0, 1.0)).unwrap(), commuting]).unwrap();
        let r = classify(&t.into(), &tols()).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.shift_unitary.dim, 3);
        let mut expected: Vec<C64> = normal_eig(&w, 1e-10).unwrap().into_iter().map(|(a, _)| a).collect();
        expected.sort_by(|a, b| argument(*a).total_cmp(&argument(*b)));
        assert!(greedy_match(&r.shift_unitary.eigs_on_p, &expected, 1e-8).is_some());
        assert!(r.shift_unitary.eigs_on_pperp.is_empty());
    }

    #[test]
    fn shift_unitary_of_structured_models_is_empty() {
        for input in [
            bishift_truncated(6).unwrap().into(),
            twisted_shift(c64(0.0, 1.0), 6).unwrap().into(),
            izuchi(0.5, c64(0.0, 1.0), 10),
        ] {
            let su = shift_unitary_invariant(&input, &tols()).unwrap();
            assert_eq!(su.dim, 0, "{su:?}");
        }
    }

    #[test]
    fn scrambling_does_not_change_the_classification() {
        let sum = direct_sum(&[
            bishift_truncated(4).unwrap(),
            twisted_shift(C64::from_polar(1.0, 1.0), 4).unwrap(),
            build_izuchi_model(0.4, c64(0.0, 1.0), 6, 6, 50).unwrap().pair,
        ])
        .unwrap();
        let base = classify(&sum.clone().into(), &tols()).unwrap();
        for seed in 0..5 {
            let s = classify(&scramble(&sum, seed).unwrap().into(), &tols()).unwrap();
            assert!(compare_classifications(&base, &s, 1e-8).equivalent);
        }
    }

    #[test]
    fn equivalence_decisions() {
        let t = tols();
        let a = izuchi(0.5, c64(1.0, 0.0), 8);
        let b = izuchi(0.5, c64(1.0, 0.0), 10);
        let v = decide_equivalence(&a, &b, &t).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.matching, Some(vec![0]));
        assert!(!decide_equivalence(&a, &izuchi(0.5, c64(0.0, 1.0), 8), &t).unwrap().equivalent);

        let tw = |x: C64| -> PairInput { twisted_shift(x, 5).unwrap().into() };
        assert!(!decide_equivalence(&tw(c64(1.0, 0.0)), &tw(c64(0.0, 1.0)), &t).unwrap().equivalent);
        assert!(decide_equivalence(&tw(c64(0.0, 1.0)), &tw(c64(0.0, 1.0)), &t).unwrap().equivalent);

        // a finite triple and a truncated model of the same pair
        let alpha = C64::from_polar(1.0, 0.3);
        let v = decide_equivalence(&BclTriple::two_finite(alpha).unwrap().into(), &tw(alpha), &t).unwrap();
        assert!(v.equivalent);
    }

    #[test]
    fn greedy_matching() {
        let a = [c64(0.0, 0.0), c64(1.0, 0.0)];
        assert_eq!(greedy_match(&a, &[c64(1.0, 0.0), c64(0.0, 0.0)], 1e-9), Some(vec![1, 0]));
        assert_eq!(greedy_match(&a, &[c64(1.0, 0.0)], 1e-9), None);
        assert_eq!(greedy_match(&a, &[c64(1.0, 0.0), c64(0.5, 0.0)], 1e-9), None);
    }

    #[test]
    fn kinds_by_band() {
        assert_eq!(block_kind(c64(1e-9, 0.0), 1e-6), (BlockKind::OneFinite, C64::default()));
        let (k, a) = block_kind(c64(0.0, 1.0 - 1e-8), 1e-6);
        assert_eq!(k, BlockKind::TwoFinite);
        assert!((a.norm() - 1.0).abs() < 1e-15);
        assert_eq!(block_kind(c64(0.3, 0.3), 1e-6).0, BlockKind::ThreeFinite);
    }
}
