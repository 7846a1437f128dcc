//! Algebraic Lyapunov functions.
//!
//! For a polynomial `P` with `P(0) < 0` whose sublevel set `{P ≤ 0}` is
//! star-convex about the origin, the gauge `τ(x)` (the unique `c > 0` with
//! `P(x / c) = 0`) is a positive-definite, degree-one homogeneous function.
//! It is a Lyapunov function for a homogeneous polynomial vector field whose
//! flow crosses `{P = 0}` inward. This crate computes `τ` through the
//! homogenization of `P` and checks each of those conditions.
//!
//! ```
//! use algly::alf::{HomogenizedLyapunov, LyapunovOptions};
//! use algly::dynsys::PolyVectorField;
//! use algly::poly::parse;
//!
//! let p = parse("(x1-1)^2 + (x2+1)^2 - 4", 2).unwrap();
//! let lyap = HomogenizedLyapunov::new(p, LyapunovOptions::default()).unwrap();
//! assert!(lyap.check_star_convex().pass);
//!
//! let sink = PolyVectorField::linear(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
//! assert!(lyap.tau_dot(&sink, &[3.0, 2.0]).unwrap() < 0.0);
//! ```

pub mod alf;
pub mod certs;
pub mod cli;
pub mod dynsys;
pub mod homogenize;
pub mod poly;
pub mod roots;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/gauge.md")]
    mod gauge {}
    #[doc = include_str!("../../../book/src/roots.md")]
    mod roots {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
