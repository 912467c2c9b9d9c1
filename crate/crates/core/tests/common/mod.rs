//! Reference oracles for the property suites, independent of the library's
//! solve paths.

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
/// Adequate for the small matrices these tests use (n ≤ ~20).
pub fn jacobi_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Rotation that annihilates a_pq (Golub & Van Loan 8.4).
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[allow(dead_code)]
/// Solves the (l+1)×(l+1) bordered system
/// `[[0, 1ᵀ], [1, K + C⁻¹I]] (b, α) = (0, Y)` by Gaussian elimination
/// with partial pivoting. Returns `(b, α)`.
pub fn bordered_solve_gepp(
    gram: &[f64],
    l: usize,
    targets: &[f64],
    c: f64,
) -> (f64, Vec<f64>) {
    let n = l + 1;
    let mut m = vec![0.0f64; n * n];
    let mut rhs = vec![0.0f64; n];
    for i in 0..l {
        m[(i + 1) * n] = 1.0;
        m[i + 1] = 1.0;
        rhs[i + 1] = targets[i];
        for j in 0..l {
            let mut v = gram[i * l + j];
            if i == j {
                v += 1.0 / c;
            }
            m[(i + 1) * n + (j + 1)] = v;
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a * n + col]
                    .abs()
                    .partial_cmp(&m[b * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut sol = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in row + 1..n {
            s -= m[row * n + k] * sol[k];
        }
        sol[row] = s / m[row * n + row];
    }
    (sol[0], sol[1..].to_vec())
}

#[cfg(test)]
mod sanity {
    use super::*;

    #[test]
    fn jacobi_recovers_known_eigenvalues() {
        // diag(1, 3) rotated by 45°: eigenvalues stay {1, 3}.
        let a = vec![2.0, 1.0, 1.0, 2.0];
        let mut eig = jacobi_eigenvalues(&a, 2);
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
    }
}
