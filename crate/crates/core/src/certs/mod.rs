//! Verification of Gram-matrix (sum-of-squares) certificates and of the
//! multiplier inequality `U1·(∇P·f) + U2·P < 0`.
//!
//! Nothing here searches for certificates; they are supplied by the caller,
//! usually from a JSON file.

mod jacobi;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynsys::{DynError, PolyVectorField, SampleRecord, VerificationReport};
use crate::poly::{Monomial, MultiPoly, PolyError};

pub use jacobi::{symmetric_eigenvalues, OFF_DIAGONAL_TOL};

/// Largest allowed `|Q_ij - Q_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Largest allowed per-coefficient gap between `zᵀQz` and the target.
pub const COEFF_TOL: f64 = 1e-10;
/// Default PSD tolerance, relative to `max |Q_ij|`.
pub const PSD_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("Q is {rows}x{cols} but the basis has {basis} monomials")]
    MatrixShape { rows: usize, cols: usize, basis: usize },
    #[error("basis is empty")]
    EmptyBasis,
    #[error("basis monomial {index} has {found} variables, expected {expected}")]
    BasisDimension { index: usize, expected: usize, found: usize },
    #[error("basis monomial {index} repeats an earlier entry")]
    DuplicateBasis { index: usize },
    #[error("Q is not symmetric: |Q[{i}][{j}] - Q[{j}][{i}]| = {gap}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },
    #[error("Q has a non-finite entry at [{i}][{j}]")]
    NonFinite { i: usize, j: usize },
    #[error("basis monomial {index} is constant; the Euler form needs degree >= 1")]
    ConstantMonomial { index: usize },
    #[error("sampling grid is empty or has lo >= hi")]
    EmptyGrid,
    #[error("field has {found} variables, polynomial has {expected}")]
    FieldDimension { expected: usize, found: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Dyn(#[from] DynError),
}

/// A claim `target = zᵀ Q z` for the monomial vector `z = basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramCertificate {
    basis: Vec<Monomial>,
    q: Vec<Vec<f64>>,
    target: MultiPoly,
}

impl GramCertificate {
    pub fn new(basis: Vec<Monomial>, q: Vec<Vec<f64>>, target: MultiPoly) -> Result<Self, CertError> {
        let m = basis.len();
        if m == 0 {
            return Err(CertError::EmptyBasis);
        }
        if q.len() != m || q.iter().any(|r| r.len() != m) {
            return Err(CertError::MatrixShape {
                rows: q.len(),
                cols: q.iter().map(Vec::len).find(|&c| c != m).unwrap_or(m),
                basis: m,
            });
        }
        let n = target.nvars();
        let mut seen = BTreeSet::new();
        for (index, z) in basis.iter().enumerate() {
            if z.nvars() != n {
                return Err(CertError::BasisDimension {
                    index,
                    expected: n,
                    found: z.nvars(),
                });
            }
            if !seen.insert(z.clone()) {
                return Err(CertError::DuplicateBasis { index });
            }
        }
        for i in 0..m {
            for j in 0..m {
                if !q[i][j].is_finite() {
                    return Err(CertError::NonFinite { i, j });
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let gap = (q[i][j] - q[j][i]).abs();
                if gap > SYMMETRY_TOL {
                    return Err(CertError::NotSymmetric { i, j, gap });
                }
            }
        }
        Ok(GramCertificate { basis, q, target })
    }

    /// Builds a certificate from the JSON form, parsing the target in `nvars`
    /// variables.
    pub fn from_spec(spec: &GramSpec, nvars: usize) -> Result<Self, CertError> {
        let target = MultiPoly::parse(&spec.target, nvars)?;
        let basis = spec.basis.iter().cloned().map(Monomial::new).collect();
        GramCertificate::new(basis, spec.q.clone(), target)
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn q(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn target(&self) -> &MultiPoly {
        &self.target
    }

    /// Symbolic expansion of `zᵀ Q z`.
    pub fn expand(&self) -> MultiPoly {
        self.weighted_expand(|_| 1.0)
    }

    /// `Σ_ij w(i) Q_ij z_i z_j`.
    fn weighted_expand(&self, w: impl Fn(usize) -> f64) -> MultiPoly {
        let mut s = MultiPoly::zero(self.target.nvars());
        for (i, zi) in self.basis.iter().enumerate() {
            for (j, zj) in self.basis.iter().enumerate() {
                s.add_term(zi.mul(zj), w(i) * self.q[i][j]);
            }
        }
        s
    }
}

/// JSON form: `{"basis": [[exponents]...], "Q": [[row]...], "target": "<text>"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSpec {
    pub basis: Vec<Vec<u32>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub target: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdStatus {
    /// Smallest eigenvalue above `psd_tol`.
    Positive,
    /// Smallest eigenvalue within `psd_tol` of zero; accepted, but flagged.
    Marginal,
    Indefinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientMismatch {
    pub exponents: Vec<u32>,
    pub target: f64,
    pub expansion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub pass: bool,
    pub coefficients_match: bool,
    pub max_coefficient_error: f64,
    pub mismatches: Vec<CoefficientMismatch>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub psd_tol: f64,
    pub psd: PsdStatus,
}

/// Checks the coefficient identity `target = zᵀQz` and that `Q ⪰ 0`.
///
/// `psd_tol` defaults to `PSD_REL · max |Q_ij|`.
pub fn verify_gram(cert: &GramCertificate, psd_tol: Option<f64>) -> GramReport {
    let expansion = cert.expand();
    let monomials: BTreeSet<&Monomial> = expansion
        .terms()
        .chain(cert.target.terms())
        .map(|(m, _)| m)
        .collect();
    let mut mismatches = Vec::new();
    let mut max_err: f64 = 0.0;
    for m in monomials {
        let e = m.exponents();
        let (a, b) = (cert.target.coeff(e), expansion.coeff(e));
        let err = (a - b).abs();
        max_err = max_err.max(err);
        if err > COEFF_TOL {
            mismatches.push(CoefficientMismatch {
                exponents: e.to_vec(),
                target: a,
                expansion: b,
            });
        }
    }
    let qmax = cert.q.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let psd_tol = psd_tol.unwrap_or(PSD_REL * qmax);
    let eigenvalues = symmetric_eigenvalues(&cert.q);
    let min = eigenvalues[0];
    let psd = if min > psd_tol {
        PsdStatus::Positive
    } else if min >= -psd_tol {
        PsdStatus::Marginal
    } else {
        PsdStatus::Indefinite
    };
    let coefficients_match = mismatches.is_empty();
    GramReport {
        pass: coefficients_match && psd != PsdStatus::Indefinite,
        coefficients_match,
        max_coefficient_error: max_err,
        mismatches,
        eigenvalues,
        psd_tol,
        psd,
    }
}

/// `y·∇(zᵀQz) − 2 zᵀTQz` with `T = diag(deg z_i)`.
///
/// By Euler's identity this is the zero polynomial; any nonzero terms come
/// from an asymmetric `Q` or from rounding in the coefficient sums.
pub fn gram_euler_identity(cert: &GramCertificate) -> Result<MultiPoly, CertError> {
    if let Some(index) = cert.basis.iter().position(Monomial::is_constant) {
        return Err(CertError::ConstantMonomial { index });
    }
    let s = cert.expand();
    let n = s.nvars();
    let radial = s
        .gradient()
        .into_iter()
        .enumerate()
        .fold(MultiPoly::zero(n), |acc, (i, g)| acc + MultiPoly::var(n, i) * g);
    let tq = cert.weighted_expand(|i| 2.0 * cert.basis[i].degree() as f64);
    Ok(radial - tq)
}

/// The multipliers `U1`, `U2` and optional Gram certificates for `U1` and `−G`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierCertificate {
    pub u1: MultiPoly,
    pub u2: MultiPoly,
    pub gram_u1: Option<GramCertificate>,
    pub gram_neg_g: Option<GramCertificate>,
}

/// JSON form: `{"U1": "<text>", "U2": "<text>", "gram_U1": {...}?, "gram_negG": {...}?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    #[serde(rename = "U1")]
    pub u1: String,
    #[serde(rename = "U2")]
    pub u2: String,
    #[serde(rename = "gram_U1", default, skip_serializing_if = "Option::is_none")]
    pub gram_u1: Option<GramSpec>,
    #[serde(rename = "gram_negG", default, skip_serializing_if = "Option::is_none")]
    pub gram_neg_g: Option<GramSpec>,
}

impl MultiplierCertificate {
    pub fn from_spec(spec: &MultiplierSpec, nvars: usize) -> Result<Self, CertError> {
        Ok(MultiplierCertificate {
            u1: MultiPoly::parse(&spec.u1, nvars)?,
            u2: MultiPoly::parse(&spec.u2, nvars)?,
            gram_u1: spec
                .gram_u1
                .as_ref()
                .map(|g| GramCertificate::from_spec(g, nvars))
                .transpose()?,
            gram_neg_g: spec
                .gram_neg_g
                .as_ref()
                .map(|g| GramCertificate::from_spec(g, nvars))
                .transpose()?,
        })
    }
}

/// Sample points: a uniform tensor grid over `[lo, hi]^n` plus `n_random`
/// seeded uniform draws from the same box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub lo: f64,
    pub hi: f64,
    pub per_axis: usize,
    pub n_random: usize,
    pub seed: u64,
}

impl SampleGrid {
    /// `[-5, 5]^n`, 41 points per axis when `n ≤ 3` (none otherwise), and
    /// 10⁴ random points.
    pub fn default_for(nvars: usize, seed: u64) -> Self {
        SampleGrid {
            lo: -5.0,
            hi: 5.0,
            per_axis: if nvars <= 3 { 41 } else { 0 },
            n_random: 10_000,
            seed,
        }
    }

    pub fn points(&self, nvars: usize) -> Result<Vec<Vec<f64>>, CertError> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(CertError::EmptyGrid);
        }
        let mut out = Vec::new();
        if self.per_axis > 0 && nvars > 0 {
            let axis: Vec<f64> = if self.per_axis == 1 {
                vec![0.5 * (self.lo + self.hi)]
            } else {
                let step = (self.hi - self.lo) / (self.per_axis - 1) as f64;
                (0..self.per_axis).map(|k| self.lo + step * k as f64).collect()
            };
            let mut idx = vec![0usize; nvars];
            'grid: loop {
                out.push(idx.iter().map(|&k| axis[k]).collect());
                for d in (0..nvars).rev() {
                    idx[d] += 1;
                    if idx[d] < axis.len() {
                        continue 'grid;
                    }
                    idx[d] = 0;
                }
                break;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.n_random {
            out.push((0..nvars).map(|_| rng.random_range(self.lo..=self.hi)).collect());
        }
        if out.is_empty() {
            return Err(CertError::EmptyGrid);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub pass: bool,
    /// `G = U1·(∇P·f) + U2·P`, printed.
    pub g: String,
    /// Samples of `G`; margins must be negative.
    pub sampling: VerificationReport,
    pub u1_min: f64,
    pub u1_min_witness: Vec<f64>,
    pub u1_negative_samples: usize,
    pub origin_excluded: bool,
    pub gram_u1: Option<GramReport>,
    pub gram_neg_g: Option<GramReport>,
    pub notes: Vec<String>,
}

fn same_poly(a: &MultiPoly, b: &MultiPoly) -> bool {
    a.nvars() == b.nvars() && (a - b).max_abs_coeff() <= COEFF_TOL
}

/// Checks `G < 0` and `U1 ≥ 0` on the grid, and any attached Gram
/// certificates.
pub fn verify_multiplier(
    p: &MultiPoly,
    f: &PolyVectorField,
    cert: &MultiplierCertificate,
    grid: &SampleGrid,
) -> Result<MultiplierReport, CertError> {
    let n = p.nvars();
    if f.nvars() != n {
        return Err(CertError::FieldDimension { expected: n, found: f.nvars() });
    }
    for u in [&cert.u1, &cert.u2] {
        if u.nvars() != n {
            return Err(PolyError::DimensionMismatch { expected: n, found: u.nvars() }.into());
        }
    }
    let lie = f.lie_derivative(p)?;
    let g = cert.u1.checked_mul(&lie)? + cert.u2.checked_mul(p)?;
    let origin_excluded = g.coeff(&vec![0; n]) == 0.0;

    let mut samples = Vec::new();
    let mut u1_min = f64::INFINITY;
    let mut u1_min_witness = Vec::new();
    let mut u1_negative_samples = 0;
    for (index, x) in grid.points(n)?.into_iter().enumerate() {
        if origin_excluded && x.iter().all(|&v| v == 0.0) {
            continue;
        }
        let u = cert.u1.eval_unchecked(&x);
        if u < 0.0 {
            u1_negative_samples += 1;
        }
        if u < u1_min {
            u1_min = u;
            u1_min_witness = x.clone();
        }
        let margin = g.eval_unchecked(&x);
        samples.push(SampleRecord { index, point: x, margin });
    }
    let mut sampling = VerificationReport::from_samples(samples, 0.0, |m| m < 0.0);
    sampling.notes.push(format!(
        "grid [{}, {}]^{n}, {} per axis, {} random points, seed {}",
        grid.lo, grid.hi, grid.per_axis, grid.n_random, grid.seed
    ));

    let mut notes = Vec::new();
    let mut pass = sampling.pass && u1_negative_samples == 0;
    let neg_g = -&g;
    let mut check = |gram: &Option<GramCertificate>, expected: &MultiPoly, name: &str| {
        gram.as_ref().map(|c| {
            let r = verify_gram(c, None);
            if !same_poly(c.target(), expected) {
                notes.push(format!("{name} certificate target does not match {name}"));
                pass = false;
            }
            pass &= r.pass;
            r
        })
    };
    let gram_u1 = check(&cert.gram_u1, &cert.u1, "U1");
    let gram_neg_g = check(&cert.gram_neg_g, &neg_g, "-G");

    Ok(MultiplierReport {
        pass,
        g: g.to_string(),
        sampling,
        u1_min,
        u1_min_witness,
        u1_negative_samples,
        origin_excluded,
        gram_u1,
        gram_neg_g,
        notes,
    })
}
