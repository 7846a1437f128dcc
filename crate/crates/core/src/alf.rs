//! The algebraic Lyapunov function `τ(x)`.
//!
//! Given a polynomial `P` with `P(0) < 0` whose zero set bounds a region
//! that is star-convex about the origin, `τ(x)` is the unique `c > 0` with
//! `P̃(x, c) = 0`, equivalently `P(x / c) = 0`. It is the gauge of the region
//! `{P ≤ 0}`: homogeneous of degree one, equal to `1` on `{P = 0}`.
//!
//! ```
//! use algly::alf::{HomogenizedLyapunov, LyapunovOptions};
//! use algly::poly::parse;
//!
//! let p = parse("(x1-1)^2 + (x2+1)^2 - 4", 2).unwrap();
//! let lyap = HomogenizedLyapunov::new(p, LyapunovOptions::default()).unwrap();
//! assert!((lyap.tau(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
//! assert!((lyap.tau(&[2.0, 2.0]).unwrap() - 2.0).abs() < 1e-15);
//! ```

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynsys::PolyVectorField;
use crate::homogenize::{homogeneous_parts, homogenize, tau_coefficients, HomogeneousDecomposition};
use crate::poly::{MultiPoly, PolyError};
use crate::roots::{positive_roots, Multiplicity, RootList, RootTolerances, UniPoly};

/// Roots closer than this fraction of the Cauchy bound are one tangency,
/// not two crossings.
const ROOT_SEPARATION_REL: f64 = 1e-8;
/// `|∇P(y)·y|` below this fraction of its absolute evaluation scale
/// `Σ_i |y_i| Σ |c||m(y)|` is degenerate.
const DEGENERATE_REL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlfError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial is constant; no level set to scale")]
    ConstantPolynomial,
    #[error("origin is not interior to the set: P(0) = {value} >= 0")]
    OriginNotInterior { value: f64 },
    #[error("no positive root along x = {x:?}; the set is unbounded in that direction")]
    NoPositiveRoot { x: Vec<f64> },
    #[error("{} positive roots along x = {x:?}; the set is not star-convex", roots.len())]
    MultiplePositiveRoots { x: Vec<f64>, roots: Vec<f64> },
    #[error("degenerate gradient at boundary point y = {y:?}: ∇P(y)·y = {value}")]
    DegenerateGradient { y: Vec<f64>, value: f64 },
    #[error("coefficients along x = {x:?} overflow")]
    Overflow { x: Vec<f64> },
    #[error("τ̇ is undefined at the origin")]
    ZeroState,
    #[error("field has {found} variables, polynomial has {expected}")]
    FieldDimension { expected: usize, found: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    pub tol: RootTolerances,
    /// Number of directions sampled by [`HomogenizedLyapunov::check_star_convex`].
    pub ray_samples: usize,
    pub seed: u64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        LyapunovOptions {
            tol: RootTolerances::default(),
            ray_samples: 256,
            seed: 0,
        }
    }
}

/// Unit directions used by every sampling check.
///
/// In two dimensions these are the exact angles `2πk/count`; in one dimension
/// `+1` and `-1` alternate; otherwise normalized Gaussian draws from a
/// ChaCha8 stream seeded with `seed`.
pub fn sample_directions(nvars: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match nvars {
        1 => (0..count)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..count)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / count as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        n => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    out.push(v.into_iter().map(|x| x / norm).collect());
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RayFailure {
    NoRoot,
    MultipleRoots,
    /// A single (or clustered) root flagged as a suspected multiple root:
    /// the ray is tangent to the boundary.
    Tangency,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayWitness {
    pub index: usize,
    pub direction: Vec<f64>,
    pub root_count: usize,
    pub roots: Vec<f64>,
    pub kind: RayFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarConvexityReport {
    pub pass: bool,
    pub checked_directions: usize,
    pub failures: Vec<RayWitness>,
}

/// `P` together with its homogenization; evaluates `τ` and `τ̇`.
#[derive(Clone, Debug)]
pub struct HomogenizedLyapunov {
    poly: MultiPoly,
    decomposition: HomogeneousDecomposition,
    homogenized: MultiPoly,
    gradient: Vec<MultiPoly>,
    options: LyapunovOptions,
}

impl HomogenizedLyapunov {
    pub fn new(poly: MultiPoly, options: LyapunovOptions) -> Result<Self, AlfError> {
        let decomposition = homogeneous_parts(&poly).map_err(|_| AlfError::ZeroPolynomial)?;
        let m0 = decomposition.constant_term();
        if m0 >= 0.0 {
            return Err(AlfError::OriginNotInterior { value: m0 });
        }
        if decomposition.degree() == 0 {
            return Err(AlfError::ConstantPolynomial);
        }
        let homogenized = homogenize(&decomposition);
        let gradient = poly.gradient();
        Ok(HomogenizedLyapunov {
            poly,
            decomposition,
            homogenized,
            gradient,
            options,
        })
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn decomposition(&self) -> &HomogeneousDecomposition {
        &self.decomposition
    }

    /// `P̃(x, τ)` with `τ` as the last variable.
    pub fn homogenized(&self) -> &MultiPoly {
        &self.homogenized
    }

    pub fn degree(&self) -> u32 {
        self.decomposition.degree()
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn options(&self) -> &LyapunovOptions {
        &self.options
    }

    /// All positive roots of `c ↦ P̃(x, c)`.
    pub fn ray_roots(&self, x: &[f64]) -> Result<RootList, AlfError> {
        let coeffs = tau_coefficients(&self.decomposition, x)?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(AlfError::Overflow { x: x.to_vec() });
        }
        // the τ^p coefficient is M_0 < 0, so the polynomial is never zero
        Ok(positive_roots(&UniPoly::new(coeffs), self.options.tol)
            .expect("leading coefficient M_0 is nonzero"))
    }

    /// `τ(x)`, with `τ(0) = 0`.
    pub fn tau(&self, x: &[f64]) -> Result<f64, AlfError> {
        self.poly.check_point(x)?;
        if x.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let list = self.ray_roots(x)?;
        match list.roots.as_slice() {
            [] => Err(AlfError::NoPositiveRoot { x: x.to_vec() }),
            [r] => Ok(r.value),
            [first, .., last] => {
                if last.value - first.value > ROOT_SEPARATION_REL * list.bound {
                    Err(AlfError::MultiplePositiveRoots {
                        x: x.to_vec(),
                        roots: list.values(),
                    })
                } else {
                    // clustered roots: a tangency, surfaced by the star-convexity report
                    Ok(last.value)
                }
            }
        }
    }

    /// Boundary point `x / τ(x)` on `{P = 0}`.
    pub fn boundary_point(&self, x: &[f64]) -> Result<Vec<f64>, AlfError> {
        let c = self.tau(x)?;
        if c == 0.0 {
            return Err(AlfError::ZeroState);
        }
        Ok(x.iter().map(|v| v / c).collect())
    }

    pub fn check_star_convex(&self) -> StarConvexityReport {
        let dirs = sample_directions(self.nvars(), self.options.ray_samples, self.options.seed);
        let mut failures = Vec::new();
        for (index, d) in dirs.iter().enumerate() {
            let list = self.ray_roots(d).expect("direction has nvars entries");
            let kind = match list.roots.as_slice() {
                [] => Some(RayFailure::NoRoot),
                [r] if r.multiplicity == Multiplicity::Simple => None,
                [_] => Some(RayFailure::Tangency),
                [first, .., last] => {
                    if last.value - first.value > ROOT_SEPARATION_REL * list.bound {
                        Some(RayFailure::MultipleRoots)
                    } else {
                        Some(RayFailure::Tangency)
                    }
                }
            };
            if let Some(kind) = kind {
                failures.push(RayWitness {
                    index,
                    direction: d.clone(),
                    root_count: list.len(),
                    roots: list.values(),
                    kind,
                });
            }
        }
        StarConvexityReport {
            pass: failures.is_empty(),
            checked_directions: dirs.len(),
            failures,
        }
    }

    /// Time derivative of `τ` along `ẋ = f(x)`:
    /// `τ̇ = c^(ν+1) (∇P(y)·f(y)) / (∇P(y)·y)` with `c = τ(x)`, `y = x / c`.
    pub fn tau_dot(&self, f: &PolyVectorField, x: &[f64]) -> Result<f64, AlfError> {
        if f.nvars() != self.nvars() {
            return Err(AlfError::FieldDimension {
                expected: self.nvars(),
                found: f.nvars(),
            });
        }
        self.poly.check_point(x)?;
        if x.iter().all(|&v| v == 0.0) {
            return Err(AlfError::ZeroState);
        }
        let c = self.tau(x)?;
        let y: Vec<f64> = x.iter().map(|v| v / c).collect();
        let grad: Vec<f64> = self.gradient.iter().map(|g| g.eval_unchecked(&y)).collect();
        let fy = f.eval_unchecked(&y);
        let along_f: f64 = grad.iter().zip(&fy).map(|(g, v)| g * v).sum();
        let radial: f64 = grad.iter().zip(&y).map(|(g, v)| g * v).sum();
        let scale: f64 = self
            .gradient
            .iter()
            .zip(&y)
            .map(|(g, v)| v.abs() * g.eval_abs(&y))
            .sum();
        if !(radial.abs() > DEGENERATE_REL * scale) {
            return Err(AlfError::DegenerateGradient { y, value: radial });
        }
        Ok(c.powi(f.nu() as i32 + 1) * along_f / radial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn lyap(text: &str) -> HomogenizedLyapunov {
        HomogenizedLyapunov::new(parse(text, 2).unwrap(), LyapunovOptions::default()).unwrap()
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn circle() -> HomogenizedLyapunov {
        lyap("(x1-1)^2 + (x2+1)^2 - 4")
    }

    fn field(texts: &[&str]) -> PolyVectorField {
        PolyVectorField::new(texts.iter().map(|t| parse(t, 2).unwrap()).collect()).unwrap()
    }

    #[test]
    fn construction() {
        let l = circle();
        assert_eq!(l.degree(), 2);
        assert_eq!(l.decomposition().constant_term(), -2.0);
        let disk = lyap("x1^2 + x2^2 - 1");
        assert_eq!(disk.decomposition().constant_term(), -1.0);

        let opts = LyapunovOptions::default();
        assert_eq!(
            HomogenizedLyapunov::new(parse("x1^2 + x2^2 + 1", 2).unwrap(), opts).unwrap_err(),
            AlfError::OriginNotInterior { value: 1.0 }
        );
        assert_eq!(
            HomogenizedLyapunov::new(MultiPoly::zero(2), opts).unwrap_err(),
            AlfError::ZeroPolynomial
        );
        assert_eq!(
            HomogenizedLyapunov::new(MultiPoly::constant(2, -1.0), opts).unwrap_err(),
            AlfError::ConstantPolynomial
        );
    }

    #[test]
    fn tau_examples() {
        let l = circle();
        assert_eq!(l.tau(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(l.tau(&[2.0, 2.0]).unwrap(), 2.0);
        assert!((l.tau(&[1.0, -1.0]).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(l.tau(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(l.tau(&[1.0]).is_err());
    }

    #[test]
    fn tau_errors() {
        let annulus = lyap("-(x1^2 + x2^2 - 1)*(x1^2 + x2^2 - 4)");
        match annulus.tau(&[1.0, 0.0]).unwrap_err() {
            AlfError::MultiplePositiveRoots { roots, .. } => {
                assert_eq!(roots.len(), 2);
                assert!((roots[0] - 0.5).abs() < 1e-12 && (roots[1] - 1.0).abs() < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
        let hyperbola = lyap("x1^2 - x2^2 - 1");
        assert!(matches!(
            hyperbola.tau(&[0.0, 1.0]),
            Err(AlfError::NoPositiveRoot { .. })
        ));
    }

    #[test]
    fn star_convexity() {
        let report = circle().check_star_convex();
        assert!(report.pass);
        assert_eq!(report.checked_directions, 256);

        let report = lyap("-(x1^2 + x2^2 - 1)*(x1^2 + x2^2 - 4)").check_star_convex();
        assert!(!report.pass);
        assert_eq!(report.failures.len(), 256);
        assert!(report.failures.iter().all(|w| w.root_count == 2));

        let report = lyap("x1^2 - x2^2 - 1").check_star_convex();
        assert!(!report.pass);
        let up = report.failures.iter().find(|w| w.index == 64).unwrap();
        assert_eq!(up.kind, RayFailure::NoRoot);
    }

    #[test]
    fn tau_dot_examples() {
        let l = circle();
        let f = field(&["-x1", "-x2"]);
        assert!((l.tau_dot(&f, &[1.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);

        let disk = lyap("x1^2 + x2^2 - 1");
        assert!((disk.tau_dot(&f, &[1.0, 0.0]).unwrap() + 1.0).abs() < 1e-15);

        let cubic = field(&["-(x1^2 + x2^2)*x1", "-(x1^2 + x2^2)*x2"]);
        assert_eq!(cubic.nu(), 2);
        for x in [[0.3, -0.4], [2.0, 1.0], [-1.5, 0.0]] {
            let c = disk.tau(&x).unwrap();
            let rate = disk.tau_dot(&cubic, &x).unwrap();
            assert!((rate + c.powi(3)).abs() < 1e-12 * c.powi(3).max(1.0));
        }

        assert_eq!(l.tau_dot(&f, &[0.0, 0.0]), Err(AlfError::ZeroState));
    }

    #[test]
    fn degenerate_gradient_is_reported() {
        // cusp: ∇P vanishes at the boundary point (1, 0)
        let l = lyap("x2^2 - (1 - x1)^3");
        let f = field(&["-x1", "-x2"]);
        assert!(matches!(
            l.tau_dot(&f, &[1.0, 0.0]),
            Err(AlfError::DegenerateGradient { .. })
        ));
        assert!(l.tau_dot(&f, &[0.0, 1.0]).is_ok());
    }

    #[test]
    fn directions() {
        let d = sample_directions(2, 4, 0);
        assert_eq!(d[0], vec![1.0, 0.0]);
        assert!((d[1][0]).abs() < 1e-15 && d[1][1] == 1.0);
        let d3 = sample_directions(3, 10, 42);
        assert_eq!(d3, sample_directions(3, 10, 42));
        assert!(d3.iter().all(|v| (norm(v) - 1.0).abs() < 1e-14));
        assert_ne!(d3, sample_directions(3, 10, 43));
    }
}
