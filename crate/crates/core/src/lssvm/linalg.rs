//! Dense symmetric positive-definite factorization for the kernel systems.
//!
//! The regularized kernel matrix `H = K + C⁻¹I` is factorized once as
//! `L·Lᵀ` and the factor is reused for every right-hand side. Matrices are
//! stored row-major in a flat slice.

use crate::scalar::Scalar;

/// In-place Cholesky factorization of a symmetric matrix.
///
/// On success the lower triangle of `a` holds `L` (the strict upper
/// triangle is left untouched and must be ignored). Fails with the pivot
/// index when a non-positive pivot is met, i.e. the matrix is not
/// numerically positive definite.
pub(crate) fn cholesky_factor<T: Scalar>(a: &mut [T], n: usize) -> Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            let l_jk = a[j * n + k];
            diag -= l_jk * l_jk;
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return Err(j);
        }
        let l_jj = diag.sqrt();
        a[j * n + j] = l_jj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / l_jj;
        }
    }
    Ok(())
}

/// Solves `L·Lᵀ x = b` in place given the factor from [`cholesky_factor`].
pub(crate) fn cholesky_solve<T: Scalar>(l: &[T], n: usize, b: &mut [T]) {
    debug_assert_eq!(l.len(), n * n);
    debug_assert_eq!(b.len(), n);
    // Forward substitution L y = b.
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    // Backward substitution Lᵀ x = y.
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_solves_spd_system() {
        // A = [[4,2,0],[2,5,1],[0,1,3]], x = (1,-2,3) -> b = A x.
        let a = vec![4.0, 2.0, 0.0, 2.0, 5.0, 1.0, 0.0, 1.0, 3.0];
        let x_true = [1.0, -2.0, 3.0];
        let mut b = vec![0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i * 3 + j] * x_true[j];
            }
        }
        let mut l: Vec<f64> = a.clone();
        cholesky_factor(&mut l, 3).unwrap();
        cholesky_solve(&l, 3, &mut b);
        for i in 0..3 {
            assert!((b[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert_eq!(cholesky_factor(&mut a, 2), Err(1));
    }
}
