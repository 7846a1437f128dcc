//! Homogeneous decomposition `P = M_0 + M_1 + … + M_p` and the
//! homogenization `P̃(x, τ) = Σ M_i(x) τ^(p-i)`.

use thiserror::Error;

use crate::poly::{MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomogenizeError {
    #[error("cannot decompose the zero polynomial")]
    ZeroPolynomial,
    #[error("declared degree {declared} does not match actual degree {actual}")]
    DegreeMismatch { declared: u32, actual: u32 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `parts[i]` holds the degree-`i` terms of the original polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousDecomposition {
    parts: Vec<MultiPoly>,
}

impl HomogeneousDecomposition {
    pub fn parts(&self) -> &[MultiPoly] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &MultiPoly {
        &self.parts[i]
    }

    /// True degree `p` (the highest nonzero part).
    pub fn degree(&self) -> u32 {
        (self.parts.len() - 1) as u32
    }

    pub fn nvars(&self) -> usize {
        self.parts[0].nvars()
    }

    /// The constant part `M_0`, i.e. `P(0)`.
    pub fn constant_term(&self) -> f64 {
        self.parts[0].coeff(&vec![0; self.nvars()])
    }

    /// Sum of all parts; equals the decomposed polynomial term for term.
    pub fn reconstruct(&self) -> MultiPoly {
        self.parts
            .iter()
            .fold(MultiPoly::zero(self.nvars()), |acc, m| &acc + m)
    }
}

pub fn homogeneous_parts(p: &MultiPoly) -> Result<HomogeneousDecomposition, HomogenizeError> {
    let degree = p.degree().ok_or(HomogenizeError::ZeroPolynomial)?;
    let parts = (0..=degree).map(|k| p.homogeneous_component(k)).collect();
    Ok(HomogeneousDecomposition { parts })
}

/// Like [`homogeneous_parts`], but fails if the true degree differs from the
/// caller's expectation (e.g. after leading terms cancel).
pub fn homogeneous_parts_with_degree(
    p: &MultiPoly,
    declared: u32,
) -> Result<HomogeneousDecomposition, HomogenizeError> {
    let d = homogeneous_parts(p)?;
    if d.degree() != declared {
        return Err(HomogenizeError::DegreeMismatch {
            declared,
            actual: d.degree(),
        });
    }
    Ok(d)
}

/// `P̃` as a polynomial in `nvars + 1` variables; `τ` is the last one.
pub fn homogenize(d: &HomogeneousDecomposition) -> MultiPoly {
    let n = d.nvars();
    let p = d.degree();
    let mut out = MultiPoly::zero(n + 1);
    for (i, part) in d.parts.iter().enumerate() {
        for (m, c) in part.terms() {
            let mut e = m.exponents().to_vec();
            e.push(p - i as u32);
            out.add_term(e.into(), c);
        }
    }
    out
}

/// Coefficients `[c_0, …, c_p]` of `τ ↦ P̃(x, τ)`, with `c_k = M_{p-k}(x)`.
pub fn tau_coefficients(d: &HomogeneousDecomposition, x: &[f64]) -> Result<Vec<f64>, PolyError> {
    d.parts[0].check_point(x)?;
    Ok(d.parts.iter().rev().map(|m| m.eval_unchecked(x)).collect())
}

/// `x·∇M − k·M`; zero exactly when `M` is homogeneous of degree `k`.
pub fn euler_residual(m: &MultiPoly, k: u32) -> MultiPoly {
    let n = m.nvars();
    let mut out = m.scale(-(k as f64));
    for (i, dm) in m.gradient().iter().enumerate() {
        out = &out + &(&MultiPoly::var(n, i) * dm);
    }
    out
}
