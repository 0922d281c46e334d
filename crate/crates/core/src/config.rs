use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Numerical thresholds shared by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum entrywise `|m - m†|` accepted as Hermitian.
    pub herm_tol: f64,
    /// Minimum eigenvalue accepted as positive semidefinite (a negative number).
    pub psd_tol: f64,
    /// Residual bound for trace preservation and composition checks.
    pub residual_tol: f64,
    /// Relative singular-value cutoff for pseudo-inverses.
    pub pinv_cutoff: f64,
    /// Relative eigenvalue cutoff when extracting Kraus operators from a Choi matrix.
    pub kraus_cutoff: f64,
    /// Kraus operators with Frobenius norm below this are dropped by compose/tensor.
    pub prune_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_tol: 1e-10,
            psd_tol: -1e-9,
            residual_tol: 1e-8,
            pinv_cutoff: 1e-10,
            kraus_cutoff: 1e-10,
            prune_norm: 1e-12,
        }
    }
}

pub const DEFAULT_MAX_SIDE: usize = 4096;
pub const MAX_DIM_ENV: &str = "QPD_MAX_DIM";

/// Largest matrix side any constructor will allocate.
///
/// Read once from `QPD_MAX_DIM`; falls back to 4096 when unset or unparsable.
pub fn max_side() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_DIM_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_SIDE)
    })
}
