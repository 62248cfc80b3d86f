use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{default_rank_tol, DEFAULT_CLUSTER_TOL};

/// Numerical thresholds shared by the analysis and classification pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative rank tolerance; `None` means `max(rows, cols) * 1e-12`.
    pub rank_tol: Option<f64>,
    /// Eigenvalue clustering radius.
    pub cluster_tol: f64,
    /// Width of the `|alpha| ~ 0` and `|alpha| ~ 1` bands when assigning block kinds.
    pub band_tol: f64,
    /// Relative residual allowed by consistency checks (normality, containment).
    pub check_tol: f64,
    /// Distance at which two fundamental-sequence entries are considered equal.
    pub match_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: None,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            band_tol: 1e-6,
            check_tol: 1e-8,
            match_tol: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn rank_tol_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_tol.unwrap_or_else(|| default_rank_tol(rows, cols))
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("rank_tol", self.rank_tol.unwrap_or(1.0)),
            ("cluster_tol", self.cluster_tol),
            ("band_tol", self.band_tol),
            ("check_tol", self.check_tol),
            ("match_tol", self.match_tol),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.band_tol >= 0.5 {
            return Err(Error::InvalidParameter("band_tol must be below 0.5".into()));
        }
        Ok(())
    }
}
