use algly::certs::{gram_euler_identity, symmetric_eigenvalues, verify_gram, GramCertificate};
use algly::poly::{Monomial, MultiPoly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All exponent vectors in `nvars` variables with degree in `lo..=hi`.
fn monomials(nvars: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut e = vec![0u32; nvars];
    loop {
        let d: u32 = e.iter().sum();
        if (lo..=hi).contains(&d) {
            out.push(e.clone());
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return out;
            }
            e[i] += 1;
            if e[i] <= hi {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Symmetric matrix with entries `k / 8`, `|k| ≤ 64`; exact in every sum.
fn dyadic_symmetric(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = f64::from(rng.random_range(-64i32..=64)) / 8.0;
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    q
}

fn gram(basis: &[Vec<u32>], q: Vec<Vec<f64>>) -> GramCertificate {
    let n = basis[0].len();
    let basis: Vec<Monomial> = basis.iter().cloned().map(Monomial::new).collect();
    let dummy = GramCertificate::new(basis.clone(), q.clone(), MultiPoly::zero(n)).unwrap();
    GramCertificate::new(basis, q, dummy.expand()).unwrap()
}

#[test]
fn euler_identity_is_exact_on_random_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fixed = vec![vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1]];
    let c = gram(&fixed, dyadic_symmetric(&mut rng, 5));
    assert!(gram_euler_identity(&c).unwrap().is_zero());
    for _ in 0..200 {
        let n = rng.random_range(1..=3);
        let hi = rng.random_range(1..=2);
        let all = monomials(n, 1, hi);
        let mut basis: Vec<Vec<u32>> = all.iter().filter(|_| rng.random_bool(0.7)).cloned().collect();
        if basis.is_empty() {
            basis.push(all[0].clone());
        }
        let m = basis.len();
        let c = gram(&basis, dyadic_symmetric(&mut rng, m));
        assert!(gram_euler_identity(&c).unwrap().is_zero());
    }
}

/// Closed-form eigenvalues of a symmetric 3×3 matrix (trigonometric solution
/// of the characteristic cubic), ascending.
fn eig3(a: &[Vec<f64>]) -> Vec<f64> {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return vec![q; 3];
    }
    let b: Vec<Vec<f64>> = (0..3)
        .map(|i| (0..3).map(|j| (a[i][j] - if i == j { q } else { 0.0 }) / p).collect())
        .collect();
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mut v = vec![l1, 3.0 * q - l1 - l3, l3];
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #[test]
    fn jacobi_matches_2x2_formula(a in -10.0f64..10.0, b in -10.0f64..10.0, d in -10.0f64..10.0) {
        let m = (a + d) / 2.0;
        let r = ((a - d) / 2.0).hypot(b);
        let e = symmetric_eigenvalues(&[vec![a, b], vec![b, d]]);
        prop_assert!((e[0] - (m - r)).abs() <= 1e-10 && (e[1] - (m + r)).abs() <= 1e-10);
    }

    #[test]
    fn jacobi_matches_3x3_formula(v in prop::collection::vec(-10.0f64..10.0, 6)) {
        let a = vec![
            vec![v[0], v[1], v[2]],
            vec![v[1], v[3], v[4]],
            vec![v[2], v[4], v[5]],
        ];
        let e = symmetric_eigenvalues(&a);
        for (x, y) in e.iter().zip(eig3(&a)) {
            prop_assert!((x - y).abs() <= 1e-10, "{:?} vs {:?}", e, eig3(&a));
        }
    }

    #[test]
    fn passing_certificates_evaluate_consistently(
        entries in prop::collection::vec(-3.0f64..3.0, 15),
        x in prop::collection::vec(-2.0f64..2.0, 2),
    ) {
        let basis = [vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1]];
        let mut q = vec![vec![0.0; 5]; 5];
        let mut k = 0;
        for i in 0..5 {
            for j in i..5 {
                q[i][j] = entries[k];
                q[j][i] = entries[k];
                k += 1;
            }
        }
        let c = gram(&basis, q.clone());
        let r = verify_gram(&c, Some(f64::INFINITY));
        prop_assert!(r.coefficients_match);
        let z: Vec<f64> = c.basis().iter().map(|m| m.eval(&x)).collect();
        let mut zqz = 0.0;
        let mut scale = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                zqz += z[i] * q[i][j] * z[j];
                scale += (z[i] * q[i][j] * z[j]).abs();
            }
        }
        prop_assert!((c.target().eval(&x).unwrap() - zqz).abs() <= 1e-9 * (1.0 + scale));
    }
}
