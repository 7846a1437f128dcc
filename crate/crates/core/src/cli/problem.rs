use std::path::Path;

use serde::Deserialize;

use crate::alf::LyapunovOptions;
use crate::certs::MultiplierSpec;
use crate::dynsys::{DynError, PolyVectorField};
use crate::poly::{MultiPoly, PolyError};
use crate::roots::RootTolerances;

pub const DEFAULT_INVARIANCE_DIRS: usize = 4096;
pub const DEFAULT_LEVELS: [f64; 3] = [0.25, 0.5, 1.0];
pub const DEFAULT_N_THETA: usize = 360;
pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_T: f64 = 5.0;

/// `{"matrix": [[..]]}` or `{"components": ["<text>", ..]}`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    Matrix(Vec<Vec<f64>>),
    Components(Vec<String>),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemOptions {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub ray_samples: Option<usize>,
    pub invariance_dirs: Option<usize>,
    pub seed: Option<u64>,
    pub levels: Option<Vec<f64>>,
    pub n_theta: Option<usize>,
    pub h: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub strict_tol: Option<f64>,
}

/// The JSON problem file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub nvars: usize,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub options: ProblemOptions,
    #[serde(default)]
    pub multiplier: Option<MultiplierSpec>,
}

/// Problems detected while reading a problem file; all map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("P: {0}")]
    Poly(PolyError),
    #[error("field component {index}: {source}")]
    Component { index: usize, source: PolyError },
    #[error("field: {0}")]
    Field(DynError),
    #[error("{0}")]
    Invalid(String),
}

impl ProblemFile {
    pub fn from_path(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let p: ProblemFile = serde_json::from_str(text)?;
        if p.nvars == 0 {
            return Err(ProblemError::Invalid("nvars must be positive".into()));
        }
        if let Some(x0) = &p.x0 {
            if x0.len() != p.nvars {
                return Err(ProblemError::Invalid(format!(
                    "x0 has {} entries, nvars is {}",
                    x0.len(),
                    p.nvars
                )));
            }
        }
        Ok(p)
    }

    pub fn polynomial(&self) -> Result<MultiPoly, ProblemError> {
        MultiPoly::parse(&self.p, self.nvars).map_err(ProblemError::Poly)
    }

    /// Parsed field components, before the homogeneity check.
    pub fn field_components(&self) -> Result<Option<Vec<MultiPoly>>, ProblemError> {
        let Some(spec) = &self.field else {
            return Ok(None);
        };
        let comps = match spec {
            FieldSpec::Matrix(a) => PolyVectorField::linear(a)
                .map_err(ProblemError::Field)?
                .components()
                .to_vec(),
            FieldSpec::Components(texts) => texts
                .iter()
                .enumerate()
                .map(|(index, t)| {
                    MultiPoly::parse(t, self.nvars)
                        .map_err(|source| ProblemError::Component { index, source })
                })
                .collect::<Result<_, _>>()?,
        };
        if comps.len() != self.nvars {
            return Err(ProblemError::Invalid(format!(
                "field has {} components, nvars is {}",
                comps.len(),
                self.nvars
            )));
        }
        Ok(Some(comps))
    }

    pub fn lyapunov_options(&self, seed: u64) -> LyapunovOptions {
        let d = LyapunovOptions::default();
        LyapunovOptions {
            tol: RootTolerances {
                abs_tol: self.options.abs_tol.unwrap_or(d.tol.abs_tol),
                rel_tol: self.options.rel_tol.unwrap_or(d.tol.rel_tol),
            },
            ray_samples: self.options.ray_samples.unwrap_or(d.ray_samples),
            seed,
        }
    }
}
