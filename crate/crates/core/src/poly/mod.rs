//! Sparse multivariate polynomials with `f64` coefficients.
//!
//! A [`MultiPoly`] is a map from exponent vectors to nonzero coefficients.
//! Terms are kept in graded-lex order, so evaluation and printing are
//! deterministic. Coefficients that become exactly `0.0` after an operation
//! are dropped; nothing is pruned by magnitude.

mod monomial;
mod parse;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use monomial::Monomial;
pub use parse::parse;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable x{index} at byte {offset} is out of range (nvars = {nvars})")]
    VariableOutOfRange {
        offset: usize,
        index: usize,
        nvars: usize,
    },
    #[error("exponent at byte {offset} must be a non-negative integer literal")]
    BadExponent { offset: usize },
    #[error("polynomial must have at least one variable")]
    NoVariables,
}

impl PolyError {
    /// Byte offset into the source text, for parse errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            PolyError::Syntax { offset, .. }
            | PolyError::VariableOutOfRange { offset, .. }
            | PolyError::BadExponent { offset } => Some(*offset),
            _ => None,
        }
    }
}

/// Sparse polynomial in `nvars` real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The coordinate polynomial `x_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range");
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::var(nvars, index), 1.0);
        p
    }

    /// Single term `c * m`.
    pub fn monomial(m: Monomial, c: f64) -> Self {
        let mut p = MultiPoly::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// duplicates.
    pub fn from_terms<I, M>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (M, f64)>,
        M: Into<Monomial>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            let m = m.into();
            if m.nvars() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Parses polynomial text such as `(x1-1)^2 + (x2+1)^2 - 4`.
    pub fn parse(text: &str, nvars: usize) -> Result<Self, PolyError> {
        parse(text, nvars)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Coefficient of the monomial with the given exponents (0 if absent).
    pub fn coeff(&self, exponents: &[u32]) -> f64 {
        self.terms
            .get(&Monomial::new(exponents.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// True when every term has total degree `k` (the zero polynomial is
    /// homogeneous of every degree).
    pub fn is_homogeneous_of(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    /// `Σ |c| |m(x)|`, the scale of rounding error in `eval(x)`.
    pub(crate) fn eval_abs(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| (c * m.eval(x)).abs()).sum()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<(), PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Partial derivative with respect to `x_{index+1}`.
    pub fn derivative(&self, index: usize) -> MultiPoly {
        assert!(index < self.nvars, "variable index {index} out of range");
        let mut out = MultiPoly::zero(self.nvars);
        for (m, &c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.exponents_mut()[index] = e - 1;
            out.add_term(dm, c * e as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    pub fn scale(&self, k: f64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn checked_add(&self, rhs: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_same(rhs)?;
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_same(rhs)?;
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_same(rhs)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated squaring; `p^0 = 1`.
    pub fn pow(&self, mut k: u32) -> MultiPoly {
        let mut result = MultiPoly::constant(self.nvars, 1.0);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Inner product `Σ a_i b_i` of two polynomial vectors, e.g. `∇P · f`.
    pub fn dot(a: &[MultiPoly], b: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if a.len() != b.len() {
            return Err(PolyError::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let nvars = a.first().map_or(0, MultiPoly::nvars);
        let mut out = MultiPoly::zero(nvars);
        for (p, q) in a.iter().zip(b) {
            out = out.checked_add(&p.checked_mul(q)?)?;
        }
        Ok(out)
    }

    /// Same polynomial viewed in `nvars + extra` variables.
    pub fn extend_vars(&self, extra: usize) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.extended(extra), c))
                .collect(),
        }
    }

    /// Only the terms of total degree `k`.
    pub fn homogeneous_component(&self, k: u32) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    /// Renders with caller-supplied variable names.
    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        Named { poly: self, names }
    }

    fn check_same(&self, rhs: &MultiPoly) -> Result<(), PolyError> {
        if self.nvars != rhs.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: rhs.nvars,
            });
        }
        Ok(())
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // leading (highest graded-lex) term first
        for (k, (m, &c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            match (k, c < 0.0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_constant() {
                write!(f, "{mag}")?;
            } else {
                if mag != 1.0 {
                    write!(f, "{mag}*")?;
                }
                monomial::write_monomial(f, m, names)?;
            }
        }
        Ok(())
    }
}

fn default_name(i: usize) -> String {
    format!("x{}", i + 1)
}

impl fmt::Display for MultiPoly {
    /// Canonical text form; `parse` of this output gives back the same
    /// polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &default_name)
    }
}

struct Named<'a> {
    poly: &'a MultiPoly,
    names: &'a dyn Fn(usize) -> String,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.write(f, self.names)
    }
}

// Operator impls panic on mismatched `nvars`; use the `checked_*` methods
// when the operands come from user input.

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("nvars mismatch in polynomial add")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("nvars mismatch in polynomial sub")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("nvars mismatch in polynomial mul")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(-1.0)
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> MultiPoly {
        parse(text, 2).unwrap()
    }

    #[test]
    fn eval_circle() {
        let c = p("(x1-1)^2 + (x2+1)^2 - 4");
        assert_eq!(c.eval(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(c.eval(&[0.0, 0.0]).unwrap(), -2.0);
        assert_eq!(MultiPoly::zero(2).eval(&[3.0, -7.5]).unwrap(), 0.0);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let err = p("x1").eval(&[1.0]).unwrap_err();
        assert_eq!(
            err,
            PolyError::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn gradient_examples() {
        let g = p("(x1-1)^2 + (x2+1)^2 - 4").gradient();
        assert_eq!(g, vec![p("2*x1 - 2"), p("2*x2 + 2")]);

        let g = p("7.5").gradient();
        assert!(g.iter().all(MultiPoly::is_zero));

        let g = p("x1^2*x2").gradient();
        assert_eq!(g, vec![p("2*x1*x2"), p("x1^2")]);
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&p("x1 + 1") * &p("x1 - 1"), p("x1^2 - 1"));
        let q = p("3*x1*x2 - x2^3 + 0.5");
        assert!((&q + &q.scale(-1.0)).is_zero());
        assert_eq!(p("x1 + x2").pow(2), p("x1^2 + 2*x1*x2 + x2^2"));
        assert_eq!(q.pow(0), MultiPoly::constant(2, 1.0));
    }

    #[test]
    fn checked_ops_reject_mismatched_nvars() {
        let a = MultiPoly::var(2, 0);
        let b = MultiPoly::var(3, 0);
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn display_is_graded_lex_descending() {
        let c = p("(x1-1)^2 + (x2+1)^2 - 4");
        assert_eq!(c.to_string(), "x1^2 + x2^2 - 2*x1 + 2*x2 - 2");
        assert_eq!(p("-x1^2 + 0.25").to_string(), "-x1^2 + 0.25");
        assert_eq!(MultiPoly::zero(2).to_string(), "0");
    }

    #[test]
    fn exact_cancellation_prunes() {
        let q = &p("x1 + 0.1") - &p("x1");
        assert_eq!(q.len(), 1);
        assert_eq!(q.coeff(&[0, 0]), 0.1);
        assert!((&p("x1*x2") - &p("x2*x1")).is_zero());
    }
}
