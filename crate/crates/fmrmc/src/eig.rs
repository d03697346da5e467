//! Dense symmetric eigensolver (cyclic Jacobi).
//!
//! Jacobi is slow in the large but exact enough at the sizes this crate
//! targets, and it delivers a full orthonormal eigenbasis which the
//! subgradient solver needs anyway. Convergence: off-diagonal Frobenius norm
//! below `1e-12 * ||M||_F`, at most 100 sweeps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const SWEEP_LIMIT: usize = 100;
const OFFDIAG_TOL: f64 = 1e-12;

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues, `values[0]` largest.
    pub values: Vec<f64>,
    /// Column `k` of `vectors` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn off_diag_sq(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * m[(i, j)] * m[(i, j)];
        }
    }
    s
}

/// Eigenvalues and eigenvectors of a symmetric `m`, sorted nonincreasing.
/// Fails if `m` deviates from symmetry by more than `1e-9` relative to its
/// largest entry.
pub fn eig_symmetric(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    eig_symmetric_with_guess(m, None)
}

/// Same as [`eig_symmetric`], but rotates `m` into the column basis of
/// `guess` first. When `guess` nearly diagonalizes `m` (eigenvectors of a
/// nearby matrix) Jacobi finishes in one or two sweeps.
pub fn eig_symmetric_with_guess(
    m: &DMatrix<f64>,
    guess: Option<&DMatrix<f64>>,
) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1e-300);
    let asym = max_asymmetry(m);
    if asym > 1e-9 * scale.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }

    let (mut a, mut v) = match guess {
        Some(g) if g.nrows() == n && g.ncols() == n => {
            let rotated = g.transpose() * m * g;
            // symmetrize: the congruence keeps symmetry up to roundoff
            let sym = 0.5 * (&rotated + rotated.transpose());
            (sym, g.clone())
        }
        _ => (0.5 * (m + m.transpose()), DMatrix::identity(n, n)),
    };

    let norm_sq: f64 = a.iter().map(|x| x * x).sum();
    let target = (OFFDIAG_TOL * OFFDIAG_TOL) * norm_sq.max(1e-300);

    for _sweep in 0..SWEEP_LIMIT {
        if off_diag_sq(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // classic Jacobi rotation angle
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(k));
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, sorted nonincreasing.
pub fn eigvals_symmetric(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(eig_symmetric(m)?.values)
}
