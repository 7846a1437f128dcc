//! Positive real roots of univariate polynomials.
//!
//! Roots are isolated on `(0, B]`, `B` the Cauchy bound, by counting sign
//! variations of a Sturm chain, then refined by bisection and a few Newton
//! steps. The chain is built and evaluated in exact integer arithmetic on
//! the (dyadic) `f64` coefficients, so root counts are exact for the
//! polynomial as given. Everything is deterministic: the same coefficients always give
//! bitwise-identical roots.

mod sturm;

use serde::Serialize;
use thiserror::Error;

pub use sturm::SturmChain;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid interval ({a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

/// Isolation stops at intervals narrower than this fraction of the bound.
const WIDTH_REL: f64 = 1e-13;
const NEWTON_STEPS: usize = 5;
/// `|q'(r)|` below this fraction of its scale marks a suspected multiple root.
const DERIVATIVE_ZERO_REL: f64 = 1e-8;

/// Univariate polynomial, `coeffs[k]` multiplying `τ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the last nonzero coefficient, `None` if all are zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        horner(&self.coeffs, t)
    }

    /// Evaluation with roughly doubled working precision.
    pub fn eval_accurate(&self, t: f64) -> f64 {
        horner_compensated(&self.coeffs, t)
    }

    /// `Σ |c_k| |t|^k`, the natural scale for rounding error in `eval(t)`.
    pub fn eval_scale(&self, t: f64) -> f64 {
        horner_abs(&self.coeffs, t)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(derivative(&self.coeffs))
    }

    /// Cauchy bound `1 + max_{k<d} |c_k| / |c_d|`: every root has modulus
    /// strictly below it.
    pub fn cauchy_bound(&self) -> Option<f64> {
        let d = self.degree()?;
        let lead = self.coeffs[d].abs();
        let m = self.coeffs[..d].iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        Some(1.0 + m / lead)
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

/// Compensated Horner (Graillat, Langlois, Louvet): as accurate as plain
/// Horner run in twice the working precision.
fn horner_compensated(c: &[f64], t: f64) -> f64 {
    let mut s = 0.0_f64;
    let mut err = 0.0_f64;
    for &ck in c.iter().rev() {
        let p = s * t;
        let pe = s.mul_add(t, -p);
        let sum = p + ck;
        let bb = sum - p;
        let se = (p - (sum - bb)) + (ck - bb);
        err = err.mul_add(t, pe + se);
        s = sum;
    }
    s + err
}

fn horner_abs(c: &[f64], t: f64) -> f64 {
    let t = t.abs();
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck.abs())
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| ck * k as f64)
        .collect()
}

fn trimmed(c: &[f64]) -> Vec<f64> {
    let end = c.iter().rposition(|&x| x != 0.0).map_or(0, |d| d + 1);
    c[..end].to_vec()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Simple,
    SuspectedMultiple,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: Multiplicity,
}

/// Positive roots in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RootList {
    pub roots: Vec<Root>,
    /// Isolation bound `B` used for the search.
    pub bound: f64,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RootTolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for RootTolerances {
    fn default() -> Self {
        RootTolerances {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
        }
    }
}

impl RootTolerances {
    /// Residual bound `abs_tol + rel_tol Σ|c_k| r^k` at `r`.
    pub fn residual_bound(&self, q: &UniPoly, r: f64) -> f64 {
        self.abs_tol + self.rel_tol * q.eval_scale(r)
    }
}

/// Moves `t` upward by a few ulps until it is not a root of the chain head.
fn nudge_off_root(chain: &SturmChain, mut t: f64) -> f64 {
    for _ in 0..16 {
        if !chain.leading_is_zero(t) {
            break;
        }
        t += 64.0 * f64::EPSILON * t.abs().max(1.0);
    }
    t
}

/// Distinct roots in `(a, b]` given precomputed variations.
fn count_between(va: usize, vb: usize) -> usize {
    va.saturating_sub(vb)
}

/// Number of distinct real roots of `q` in `(a, b]`.
pub fn sturm_count(q: &UniPoly, a: f64, b: f64) -> Result<usize, RootError> {
    if !(a < b) {
        return Err(RootError::InvalidInterval { a, b });
    }
    let chain = SturmChain::new(q)?;
    let a = nudge_off_root(&chain, a);
    let b = nudge_off_root(&chain, b);
    Ok(count_between(chain.variations(a), chain.variations(b)))
}

/// All roots of `q` in `(0, ∞)`.
///
/// A constant nonzero polynomial has no roots; the zero polynomial is an
/// error.
pub fn positive_roots(q: &UniPoly, tol: RootTolerances) -> Result<RootList, RootError> {
    let mut c = trimmed(&q.coeffs);
    if c.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    // τ = 0 roots are not positive; divide them out.
    let zeros_at_origin = c.iter().position(|&x| x != 0.0).unwrap();
    c.drain(..zeros_at_origin);
    let q = UniPoly::new(c);
    if q.coeffs.len() == 1 {
        return Ok(RootList {
            roots: Vec::new(),
            bound: 1.0,
        });
    }
    let bound = q.cauchy_bound().unwrap();
    let chain = SturmChain::new(&q)?;
    let solver = Solver {
        q: &q,
        dq: q.derivative(),
        chain,
        width: WIDTH_REL * bound,
        tol,
    };
    let mut roots = Vec::new();
    let v0 = solver.chain.variations(0.0);
    let vb = solver.chain.variations(bound);
    solver.isolate(0.0, bound, v0, vb, &mut roots);

    // merge anything closer than the isolation width
    let mut merged: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(prev) if r.value - prev.value <= solver.width => {
                prev.multiplicity = Multiplicity::SuspectedMultiple;
            }
            _ => merged.push(r),
        }
    }
    Ok(RootList {
        roots: merged,
        bound,
    })
}

struct Solver<'a> {
    q: &'a UniPoly,
    dq: UniPoly,
    chain: SturmChain,
    width: f64,
    tol: RootTolerances,
}

impl Solver<'_> {
    fn isolate(&self, a: f64, b: f64, va: usize, vb: usize, out: &mut Vec<Root>) {
        let n = count_between(va, vb);
        if n == 0 {
            return;
        }
        if n == 1 {
            out.push(self.refine(a, b));
            return;
        }
        if b - a <= self.width {
            let mid = 0.5 * (a + b);
            out.push(Root {
                value: mid,
                multiplicity: Multiplicity::SuspectedMultiple,
            });
            return;
        }
        let mut mid = 0.5 * (a + b);
        if self.chain.leading_is_zero(mid) {
            // off-centre split keeps a root away from the cut point
            mid = a + 0.4375 * (b - a);
        }
        let vm = self.chain.variations(mid);
        self.isolate(a, mid, va, vm, out);
        self.isolate(mid, b, vm, vb, out);
    }

    /// Refines the single distinct root in `(a, b]`.
    fn refine(&self, mut a: f64, mut b: f64) -> Root {
        let q = |t: f64| self.q.eval_accurate(t);
        let (sa, sb) = (self.chain.sign(a), self.chain.sign(b));
        let mut even = false;
        if sb == 0 {
            return self.classify(b, false);
        }
        if sa != 0 && sa != sb {
            while b - a > self.width {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let qm = q(mid);
                if qm == 0.0 {
                    return self.classify(mid, false);
                }
                if (qm > 0.0) == (sa > 0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
        } else {
            // exact signs agree: a root of even multiplicity
            let mut va = self.chain.variations(a);
            even = true;
            while b - a > self.width {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let vm = self.chain.variations(mid);
                if count_between(va, vm) >= 1 {
                    b = mid;
                } else {
                    a = mid;
                    va = vm;
                }
            }
        }
        let r = self.newton_polish(a, b);
        self.classify(r, even)
    }

    fn newton_polish(&self, a: f64, b: f64) -> f64 {
        let mut r = 0.5 * (a + b);
        for _ in 0..NEWTON_STEPS {
            let v = self.q.eval_accurate(r);
            if v == 0.0 {
                break;
            }
            let d = self.dq.eval(r);
            let next = r - v / d;
            if !next.is_finite() || next < a || next > b {
                return 0.5 * (a + b);
            }
            if next == r {
                break;
            }
            r = next;
        }
        r
    }

    fn classify(&self, r: f64, even_multiplicity: bool) -> Root {
        let d = self.dq.eval(r).abs();
        let simple = !even_multiplicity
            && d > DERIVATIVE_ZERO_REL * self.dq.eval_scale(r)
            && self.q.eval(r).abs() <= self.tol.residual_bound(self.q, r);
        Root {
            value: r,
            multiplicity: if simple {
                Multiplicity::Simple
            } else {
                Multiplicity::SuspectedMultiple
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots(c: &[f64]) -> Vec<f64> {
        positive_roots(&UniPoly::new(c.to_vec()), RootTolerances::default())
            .unwrap()
            .values()
    }

    #[test]
    fn quadratic_from_circle_at_one_minus_one() {
        let r = roots(&[2.0, -4.0, -2.0]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn small_examples() {
        assert_eq!(roots(&[-1.0, 0.0, 1.0]), vec![1.0]);
        let r = roots(&[2.0, -3.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_and_zero() {
        assert!(roots(&[3.0]).is_empty());
        assert!(roots(&[3.0, 0.0, 0.0]).is_empty());
        assert_eq!(
            positive_roots(&UniPoly::new(vec![0.0, 0.0]), RootTolerances::default()),
            Err(RootError::ZeroPolynomial)
        );
    }

    #[test]
    fn root_at_origin_is_excluded() {
        // τ (τ - 3)
        assert_eq!(roots(&[0.0, -3.0, 1.0]), vec![3.0]);
    }

    #[test]
    fn double_root_is_flagged() {
        let list =
            positive_roots(&UniPoly::new(vec![1.0, -2.0, 1.0]), RootTolerances::default()).unwrap();
        assert_eq!(list.len(), 1);
        // a double root is only located to ~sqrt of the sign-zero threshold
        assert!((list.roots[0].value - 1.0).abs() < 1e-5);
        assert_eq!(list.roots[0].multiplicity, Multiplicity::SuspectedMultiple);
    }

    #[test]
    fn sturm_count_examples() {
        let q = UniPoly::new(vec![2.0, -3.0, 1.0]);
        assert_eq!(sturm_count(&q, 0.0, 3.0).unwrap(), 2);
        assert_eq!(sturm_count(&UniPoly::new(vec![1.0, 0.0, 1.0]), -10.0, 10.0).unwrap(), 0);
        assert_eq!(sturm_count(&UniPoly::new(vec![-1.0, 0.0, 1.0]), 0.0, 10.0).unwrap(), 1);
        // endpoints on roots: (1, 2] holds only the root at 2
        assert_eq!(sturm_count(&q, 1.0, 2.0).unwrap(), 1);
        assert!(sturm_count(&q, 2.0, 1.0).is_err());
        assert!(sturm_count(&UniPoly::new(vec![0.0]), 0.0, 1.0).is_err());
    }

    #[test]
    fn cauchy_bound() {
        assert_eq!(UniPoly::new(vec![2.0, -3.0, 1.0]).cauchy_bound(), Some(4.0));
        assert_eq!(UniPoly::new(vec![0.0]).cauchy_bound(), None);
    }
}
