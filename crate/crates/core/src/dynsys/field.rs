use crate::homogenize::euler_residual;
use crate::poly::{MultiPoly, PolyError};

use super::DynError;

/// Polynomial vector field `f` whose components are all homogeneous of
/// degree `nu + 1`, so `f(λx) = λ^(nu+1) f(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    components: Vec<MultiPoly>,
    nu: u32,
}

/// Homogeneity degree `ν` shared by all components (component degree `ν+1`).
///
/// The all-zero field is reported as `ν = 0`.
pub fn check_homogeneity(components: &[MultiPoly]) -> Result<u32, DynError> {
    let n = components.len();
    if n == 0 {
        return Err(DynError::Empty);
    }
    let mut degree: Option<u32> = None;
    for (i, c) in components.iter().enumerate() {
        if c.nvars() != n {
            return Err(DynError::Poly(PolyError::DimensionMismatch {
                expected: n,
                found: c.nvars(),
            }));
        }
        let Some(d) = c.degree() else { continue };
        if c.coeff(&vec![0; n]) != 0.0 {
            return Err(DynError::NonzeroAtOrigin);
        }
        if !euler_residual(c, d).is_zero() {
            return Err(DynError::MixedDegrees {
                component: i,
                reason: "component is not homogeneous".into(),
            });
        }
        match degree {
            None => degree = Some(d),
            Some(prev) if prev != d => {
                return Err(DynError::MixedDegrees {
                    component: i,
                    reason: format!("degree {d} differs from degree {prev} of earlier components"),
                })
            }
            _ => {}
        }
    }
    match degree {
        None => Ok(0),
        Some(0) => Err(DynError::NonzeroAtOrigin),
        Some(d) => Ok(d - 1),
    }
}

impl PolyVectorField {
    /// Field in `components.len()` variables; homogeneity is verified.
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, DynError> {
        let nu = check_homogeneity(&components)?;
        Ok(PolyVectorField { components, nu })
    }

    /// `f(x) = A x` from a row-major square matrix.
    pub fn linear(a: &[Vec<f64>]) -> Result<Self, DynError> {
        let n = a.len();
        if n == 0 {
            return Err(DynError::Empty);
        }
        if let Some(row) = a.iter().find(|r| r.len() != n) {
            return Err(DynError::NonSquare {
                rows: n,
                cols: row.len(),
            });
        }
        let components = a
            .iter()
            .map(|row| {
                MultiPoly::from_terms(
                    n,
                    row.iter()
                        .enumerate()
                        .map(|(j, &aij)| (crate::poly::Monomial::var(n, j), aij)),
                )
                .expect("row length checked")
            })
            .collect();
        Ok(PolyVectorField { components, nu: 0 })
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.components[0].check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_unchecked(x)).collect()
    }

    /// `∇P · f`, the derivative of `P` along trajectories.
    pub fn lie_derivative(&self, p: &MultiPoly) -> Result<MultiPoly, PolyError> {
        if p.nvars() != self.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars(),
                found: p.nvars(),
            });
        }
        MultiPoly::dot(&p.gradient(), &self.components)
    }
}
