//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Every eigenvalue problem in this crate (physicality tests, symplectic
//! spectra, separability witnesses) is at most a few tens of rows, so a
//! plain Jacobi iteration is used throughout: it is unconditionally stable
//! on symmetric input and its accuracy does not depend on the eigenvalue
//! distribution.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius threshold at which the sweep stops.
const CONVERGENCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 60;

/// Eigendecomposition `A = V diag(values) V^T` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, ordered like `values`.
    pub vectors: DMatrix<f64>,
}

fn off_diagonal_norm_sq(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    s
}

/// Diagonalizes a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps stop when the off-diagonal Frobenius norm drops below
/// `1e-13` times the Frobenius norm of the input.
pub fn sym_eigen(a: &DMatrix<f64>) -> Result<SymEigen> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);

    let norm = a.norm().max(f64::MIN_POSITIVE);
    let target = (CONVERGENCE * norm).powi(2);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm_sq(&a) <= target {
            return Ok(collect_sorted(a, v));
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Rotation annihilating a[(p, q)].
                let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                let t = if theta.abs() > 1e150 {
                    // Avoid overflow in theta^2; rotation is ~ 1/(2 theta).
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let h = t * apq;
                a[(p, p)] -= h;
                a[(q, q)] += h;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for j in 0..n {
                    if j != p && j != q {
                        let g = a[(j, p)];
                        let h = a[(j, q)];
                        a[(j, p)] = g - s * (h + g * tau);
                        a[(j, q)] = h + s * (g - h * tau);
                        a[(p, j)] = a[(j, p)];
                        a[(q, j)] = a[(j, q)];
                    }
                }
                for j in 0..n {
                    let g = v[(j, p)];
                    let h = v[(j, q)];
                    v[(j, p)] = g - s * (h + g * tau);
                    v[(j, q)] = h + s * (g - h * tau);
                }
            }
        }
    }

    // One last check: a matrix this small that still has not converged is
    // effectively converged up to roundoff accumulation.
    if off_diagonal_norm_sq(&a) <= (1e-10 * norm).powi(2) {
        return Ok(collect_sorted(a, v));
    }
    Err(Error::EigenNotConverged)
}

fn collect_sorted(a: DMatrix<f64>, v: DMatrix<f64>) -> SymEigen {
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(src));
    }
    SymEigen { values, vectors }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigen(a)?.values[0])
}

/// Positive-semidefiniteness with the crate-wide relative tolerance:
/// the smallest eigenvalue may dip to `-tol * max(1, max diagonal entry)`.
pub fn is_psd(a: &DMatrix<f64>, tol: f64) -> bool {
    let scale = a.diagonal().iter().fold(1.0f64, |acc, &x| acc.max(x));
    match min_eigenvalue(a) {
        Ok(min) => min >= -tol * scale,
        Err(_) => false,
    }
}

/// Symmetric square root of a positive-definite matrix.
pub fn sym_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = sym_eigen(a)?;
    if eig.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let n = a.nrows();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = eig.values[i].sqrt();
    }
    Ok(&eig.vectors * d * eig.vectors.transpose())
}
