//! Spectral report on the defect operator and cross-commutator of an input.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frame::{OperatorFrame, PairInput};
use crate::linalg::{cluster_sorted, normality_residual};
use crate::spectral::{check_rank_formula_for, spectral_profile, RankFormulaReport, SymmetryReport};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub eigenvalue: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub label: usize,
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// Dimension of the space the spectrum was computed on.
    pub frame_dim: usize,
    /// Defect eigenvalues, descending.
    pub spectrum: Vec<SpectrumEntry>,
    pub clusters: Vec<ClusterSummary>,
    /// `||XX* - X*X||_F`
    pub normality_residual: f64,
    pub rank_formula: RankFormulaReport,
    pub symmetry: SymmetryReport,
    pub passed: bool,
}

impl AnalysisReport {
    /// Eigenvalues of the defect outside the kernel cluster.
    pub fn nonzero_spectrum(&self, tol: f64) -> Vec<f64> {
        self.spectrum.iter().map(|e| e.eigenvalue).filter(|v| v.abs() > tol).collect()
    }
}

pub fn analyze(input: &PairInput, tols: &Tolerances) -> Result<AnalysisReport> {
    tols.validate()?;
    let frame = OperatorFrame::from_input(input)?;
    let profile = spectral_profile(&frame.defect, tols.cluster_tol)?;
    let ranges = cluster_sorted(&profile.eigenvalues, tols.cluster_tol);
    let mut spectrum = Vec::with_capacity(profile.eigenvalues.len());
    let mut clusters = Vec::with_capacity(ranges.len());
    for (label, r) in ranges.into_iter().enumerate() {
        let values = &profile.eigenvalues[r.clone()];
        clusters.push(ClusterSummary {
            label,
            value: values.iter().sum::<f64>() / values.len() as f64,
            multiplicity: values.len(),
        });
        spectrum.extend(r.map(|index| SpectrumEntry { index, eigenvalue: profile.eigenvalues[index], cluster: label }));
    }
    let rank_formula = check_rank_formula_for(&frame.defect, &frame.cross, tols)?;
    let symmetry = SymmetryReport::from_profile(&profile);
    let passed = rank_formula.both_identities_hold && symmetry.holds();
    Ok(AnalysisReport {
        frame_dim: frame.dim(),
        spectrum,
        clusters,
        normality_residual: normality_residual(&frame.cross),
        rank_formula,
        symmetry,
        passed,
    })
}
