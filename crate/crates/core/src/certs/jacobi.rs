//! Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

/// Stop once the off-diagonal Frobenius norm is at most this value, scaled
/// by `max(1, ‖A‖_F)`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

fn off_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues in ascending order. The input must be square; only its
/// symmetric part `(A + Aᵀ)/2` is used.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a[i][j] + a[j][i])).collect())
        .collect();
    let frob = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let stop = OFF_DIAGONAL_TOL * frob.max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J acting on rows and columns p, q
                for k in 0..n {
                    let akp = m[k][p];
                    let akq = m[k][q];
                    m[k][p] = c * akp - s * akq;
                    m[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p][k];
                    let aqk = m[q][k];
                    m[p][k] = c * apk - s * aqk;
                    m[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10)
    }

    #[test]
    fn two_by_two() {
        assert!(close(&symmetric_eigenvalues(&[vec![0.0, 1.0], vec![1.0, 0.0]]), &[-1.0, 1.0]));
        assert!(close(&symmetric_eigenvalues(&[vec![1.0, 2.0], vec![2.0, 1.0]]), &[-1.0, 3.0]));
        // trace 5, determinant 5: (5 ± √5)/2
        let r5 = 5f64.sqrt();
        assert!(close(
            &symmetric_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 3.0]]),
            &[(5.0 - r5) / 2.0, (5.0 + r5) / 2.0]
        ));
    }

    #[test]
    fn three_by_three() {
        // tridiagonal (2, -1): eigenvalues 2 - √2, 2, 2 + √2
        let a = [vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]];
        let r2 = 2f64.sqrt();
        assert!(close(&symmetric_eigenvalues(&a), &[2.0 - r2, 2.0, 2.0 + r2]));
        let d = [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]];
        assert!(close(&symmetric_eigenvalues(&d), &[1.0, 1.0, 2.0]));
    }

    #[test]
    fn empty_and_single() {
        assert!(symmetric_eigenvalues(&[]).is_empty());
        assert_eq!(symmetric_eigenvalues(&[vec![-4.5]]), vec![-4.5]);
    }
}
