//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use algly::alf::{HomogenizedLyapunov, LyapunovOptions};
use algly::dynsys::PolyVectorField;
use algly::poly::parse;

pub const CIRCLE: &str = "(x1-1)^2 + (x2+1)^2 - 4";
pub const ANNULUS: &str = "-(x1^2 + x2^2 - 1)*(x1^2 + x2^2 - 4)";

pub fn lyap(text: &str, nvars: usize) -> HomogenizedLyapunov {
    HomogenizedLyapunov::new(parse(text, nvars).unwrap(), LyapunovOptions::default()).unwrap()
}

pub fn circle() -> HomogenizedLyapunov {
    lyap(CIRCLE, 2)
}

/// `ẋ = s·x` in two variables.
pub fn scaled_identity(s: f64) -> PolyVectorField {
    PolyVectorField::linear(&[vec![s, 0.0], vec![0.0, s]]).unwrap()
}

/// `ẋ = -(x1² + x2²) x`.
pub fn cubic_sink() -> PolyVectorField {
    PolyVectorField::new(vec![
        parse("-x1^3 - x1*x2^2", 2).unwrap(),
        parse("-x1^2*x2 - x2^3", 2).unwrap(),
    ])
    .unwrap()
}

/// Positive root of `2τ² - 2aτ - s = 0`, `a = x2 - x1`, `s = |x|²`, the
/// gauge of the circle problem. Written without cancellation.
pub fn circle_tau(x: &[f64]) -> f64 {
    let a = x[1] - x[0];
    let s = x[0] * x[0] + x[1] * x[1];
    let r = (a * a + 2.0 * s).sqrt();
    if a >= 0.0 {
        (a + r) / 2.0
    } else {
        s / (r - a)
    }
}

/// Ascending coefficients of `∏ (τ - r_i)`.
pub fn from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= r * ck;
        }
        c = next;
    }
    c
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}
