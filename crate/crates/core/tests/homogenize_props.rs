use algly::homogenize::{euler_residual, homogeneous_parts, homogenize, tau_coefficients};
use algly::poly::{parse, MultiPoly};
use proptest::prelude::*;

/// Integer coefficients with a nonzero constant term, so every evaluation
/// below is exact.
fn poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    (
        prop::collection::vec((prop::collection::vec(0u32..=3, nvars), (-5i32..=5).prop_map(f64::from)), 0..8),
        (1i32..=5).prop_map(|c| -f64::from(c)),
    )
        .prop_map(move |(terms, c0)| {
            let mut p = MultiPoly::from_terms(nvars, terms).unwrap();
            p = p.clone() - MultiPoly::constant(nvars, p.coeff(&vec![0; nvars]));
            p + MultiPoly::constant(nvars, c0)
        })
}

fn int_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-3i32..=3).prop_map(f64::from), n)
}

proptest! {
    #[test]
    fn substitution_recovers_p((p, x) in (1usize..=3).prop_flat_map(|n| (poly(n), int_vec(n)))) {
        let d = homogeneous_parts(&p).unwrap();
        prop_assert_eq!(d.reconstruct(), p.clone());
        let h = homogenize(&d);
        let mut x1 = x.clone();
        x1.push(1.0);
        prop_assert_eq!(h.eval(&x1).unwrap(), p.eval(&x).unwrap());
    }

    #[test]
    fn homogenization_scales(
        (p, x, t, lam) in (1usize..=3).prop_flat_map(|n| (poly(n), int_vec(n), -3i32..=3, prop::sample::select(vec![0.5, 2.0, 4.0])))
    ) {
        let d = homogeneous_parts(&p).unwrap();
        let h = homogenize(&d);
        prop_assert!(h.is_homogeneous_of(d.degree()));
        let mut xt = x.clone();
        xt.push(f64::from(t));
        let scaled: Vec<f64> = xt.iter().map(|v| lam * v).collect();
        let want = lam.powi(d.degree() as i32) * h.eval(&xt).unwrap();
        prop_assert_eq!(h.eval(&scaled).unwrap(), want);
    }

    #[test]
    fn ray_coefficients_match_homogenization(
        (p, x, t) in (1usize..=3).prop_flat_map(|n| (poly(n), int_vec(n), -3i32..=3))
    ) {
        let d = homogeneous_parts(&p).unwrap();
        let c = tau_coefficients(&d, &x).unwrap();
        prop_assert_eq!(c.len(), d.degree() as usize + 1);
        let t = f64::from(t);
        let horner = c.iter().rev().fold(0.0, |acc, ck| acc * t + ck);
        let mut xt = x.clone();
        xt.push(t);
        prop_assert_eq!(horner, homogenize(&d).eval(&xt).unwrap());
    }

    #[test]
    fn parts_satisfy_euler(p in (1usize..=3).prop_flat_map(poly)) {
        let d = homogeneous_parts(&p).unwrap();
        for (i, m) in d.parts().iter().enumerate() {
            prop_assert!(euler_residual(m, i as u32).is_zero());
        }
    }
}

#[test]
fn circle_homogenization_term_map() {
    let d = homogeneous_parts(&parse("(x1-1)^2 + (x2+1)^2 - 4", 2).unwrap()).unwrap();
    let h = homogenize(&d);
    let mut terms: Vec<(Vec<u32>, f64)> = h.terms().map(|(m, c)| (m.exponents().to_vec(), c)).collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(
        terms,
        vec![
            (vec![0, 0, 2], -2.0),
            (vec![0, 1, 1], 2.0),
            (vec![0, 2, 0], 1.0),
            (vec![1, 0, 1], -2.0),
            (vec![2, 0, 0], 1.0),
        ]
    );
}
