//! Homogeneous polynomial vector fields, fixed-step integration, and
//! sampling checks for invariance of `{P ≤ 0}` and decrease of `τ`.

mod checks;
mod field;
mod integrate;

use serde::Serialize;
use thiserror::Error;

use crate::alf::AlfError;
use crate::poly::PolyError;

pub use checks::{check_decrease, check_invariance, DecreaseOptions};
pub use field::{check_homogeneity, PolyVectorField};
pub use integrate::{rk4, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynError {
    #[error("vector field has no components")]
    Empty,
    #[error("matrix is not square: {rows} rows, a row of length {cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("component {component}: {reason}")]
    MixedDegrees { component: usize, reason: String },
    #[error("field has a nonzero constant term, so f(0) != 0")]
    NonzeroAtOrigin,
    #[error("invalid step h = {h} for horizon T = {t_end}")]
    InvalidStep { h: f64, t_end: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("the Lyapunov function was built from a different polynomial")]
    PolynomialMismatch,
    #[error("initial state {index} is the origin")]
    ZeroInitialState { index: usize },
    #[error("number of directions must be positive")]
    NoDirections,
    #[error(transparent)]
    Lyapunov(#[from] AlfError),
    #[error(transparent)]
    Dyn(#[from] DynError),
}

/// One sampled point of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub margin: f64,
}

/// Outcome of a sampling check.
///
/// `worst_margin` is the largest (least favourable) margin seen; the check
/// passes when it is below `-tolerance` (invariance) or below the slack
/// (decrease). `None` means nothing was sampled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub n_samples: usize,
    pub worst_margin: Option<f64>,
    pub worst_witness: Option<Vec<f64>>,
    pub tolerance: f64,
    /// The least favourable samples, worst first.
    pub details: Vec<SampleRecord>,
    pub notes: Vec<String>,
}

/// Cap on `details` entries kept in a report.
pub const MAX_DETAILS: usize = 16;

impl VerificationReport {
    pub(crate) fn from_samples(
        mut samples: Vec<SampleRecord>,
        tolerance: f64,
        pass: impl FnOnce(f64) -> bool,
    ) -> Self {
        let n_samples = samples.len();
        samples.sort_by(|a, b| b.margin.total_cmp(&a.margin).then(a.index.cmp(&b.index)));
        let worst = samples.first().cloned();
        samples.truncate(MAX_DETAILS);
        VerificationReport {
            pass: worst.as_ref().map_or(true, |w| pass(w.margin)),
            n_samples,
            worst_margin: worst.as_ref().map(|w| w.margin),
            worst_witness: worst.map(|w| w.point),
            tolerance,
            details: samples,
            notes: Vec::new(),
        }
    }
}
