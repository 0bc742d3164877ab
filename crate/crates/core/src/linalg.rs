//! Minimal dense linear algebra: SPD solves and symmetric eigenvalues.
//!
//! The meta-design matrices here are small (tens of columns), so a
//! Cholesky factorization and a cyclic Jacobi eigenvalue sweep cover
//! everything the engine needs without an external backend.

use crate::error::{Error, Result};

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
///
/// `a` is a full d×d matrix stored as rows. Fails with a singularity
/// error when a pivot is not strictly positive.
pub fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let d = a.len();
    if d == 0 || b.len() != d || a.iter().any(|row| row.len() != d) {
        return Err(Error::Dimension("cholesky_solve expects square A matching b".into()));
    }
    // lower-triangular factor, row-major
    let mut l = vec![0.0f64; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Singular(format!(
                        "non-positive pivot {sum:.3e} at column {i}; the system is singular \
                         or indefinite (a positive ridge penalty restores definiteness)"
                    )));
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    // forward then backward substitution
    let mut y = vec![0.0f64; d];
    for i in 0..d {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * d + k] * y[k];
        }
        y[i] = sum / l[i * d + i];
    }
    let mut x = vec![0.0f64; d];
    for i in (0..d).rev() {
        let mut sum = y[i];
        for k in i + 1..d {
            sum -= l[k * d + i] * x[k];
        }
        x[i] = sum / l[i * d + i];
    }
    Ok(x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// returned in descending order.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = a.len();
    if d == 0 || a.iter().any(|row| row.len() != d) {
        return Err(Error::Dimension("symmetric_eigenvalues expects a square matrix".into()));
    }
    let mut m: Vec<f64> = a.iter().flatten().copied().collect();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigenvalue input".into()));
    }
    let scale: f64 = m.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in p + 1..d {
                off = off.max(m[p * d + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..d).map(|i| m[i * d + i]).collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_known_system() {
        // A = [[4,2],[2,3]], b = [10, 9] -> x = [1.5, 2]
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let x = cholesky_solve(&a, &[10.0, 9.0]).unwrap();
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(cholesky_solve(&a, &[1.0, 1.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn eigenvalues_of_two_by_two_correlation() {
        let c = vec![vec![1.0, 0.6], vec![0.6, 1.0]];
        let e = symmetric_eigenvalues(&c).unwrap();
        assert!((e[0] - 1.6).abs() < 1e-12);
        assert!((e[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_match_trace_and_det() {
        // random-ish symmetric 4x4
        let a = vec![
            vec![3.0, 0.5, -0.2, 0.1],
            vec![0.5, 2.0, 0.3, -0.4],
            vec![-0.2, 0.3, 1.5, 0.2],
            vec![0.1, -0.4, 0.2, 2.5],
        ];
        let e = symmetric_eigenvalues(&a).unwrap();
        let trace: f64 = (0..4).map(|i| a[i][i]).sum();
        assert!((e.iter().sum::<f64>() - trace).abs() < 1e-10);
        // descending
        assert!(e.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn cholesky_matches_jacobi_inverse_route() {
        // solve with cholesky, verify A x == b
        let a = vec![
            vec![5.0, 1.0, 0.5],
            vec![1.0, 4.0, -0.3],
            vec![0.5, -0.3, 3.0],
        ];
        let b = [1.0, -2.0, 0.5];
        let x = cholesky_solve(&a, &b).unwrap();
        for i in 0..3 {
            let ax: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-12);
        }
    }
}
