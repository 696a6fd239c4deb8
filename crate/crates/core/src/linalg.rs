//! Small dense linear algebra: a cyclic Jacobi eigensolver for symmetric
//! matrices, LU solves and a spectral Moore-Penrose inverse.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerance;

/// Eigen-decomposition of a real symmetric matrix.
///
/// Eigenvalues are sorted in ascending order; column `a` of `vectors` is the
/// unit eigenvector for `values[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.dim() - 1]
    }

    /// Eigenvector belonging to the largest eigenvalue.
    pub fn top_vector(&self) -> DVector<f64> {
        self.vectors.column(self.dim() - 1).into_owned()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm is
/// below [`tolerance::JACOBI_OFF_DIAGONAL`] times the matrix norm. The input is
/// symmetrized as `(A + Aᵀ)/2` first. Eigenvector signs are fixed so that the
/// entry of largest magnitude is positive, which makes the output independent
/// of the pivot order.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<SymEigen> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Argument(format!(
            "eigen-decomposition needs a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument("matrix has non-finite entries".into()));
    }
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = m.norm();

    let off = |m: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off(&m) <= tolerance::JACOBI_OFF_DIAGONAL * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // Rotation angle annihilating m[p][q] (Rutishauser's formulation).
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) > tolerance::JACOBI_OFF_DIAGONAL * norm {
        return Err(Error::Internal("Jacobi eigensolver did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        let pivot = col.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(SymEigen { values, vectors })
}

/// Solves `a x = b` by LU with partial pivoting.
///
/// Returns `None` when the matrix is singular to working precision.
pub fn lu_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

/// Moore-Penrose inverse of a symmetric positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct SymPinv {
    pub pinv: DMatrix<f64>,
    pub rank: usize,
    pub eigen: SymEigen,
}

/// Spectral pseudo-inverse: eigenvalues at or below `rel_cutoff` times the
/// largest eigenvalue are dropped.
pub fn sym_pinv(s: &DMatrix<f64>, rel_cutoff: f64) -> Result<SymPinv> {
    let eigen = jacobi_eigen(s)?;
    let n = eigen.dim();
    let top = eigen.values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let cutoff = rel_cutoff * top;
    let mut pinv = DMatrix::<f64>::zeros(n, n);
    let mut rank = 0;
    if top > 0.0 {
        for a in 0..n {
            let lambda = eigen.values[a];
            if lambda > cutoff {
                rank += 1;
                let g = eigen.vectors.column(a);
                pinv += (g * g.transpose()) / lambda;
            }
        }
    }
    Ok(SymPinv { pinv, rank, eigen })
}

/// Inverse of a symmetric positive definite matrix, rejecting near-singular
/// input: the smallest eigenvalue must exceed `rel_floor` times the largest,
/// and the largest must exceed `rel_floor` itself (inputs are unit-scale
/// covariances, so an all-tiny spectrum is rounding noise).
pub fn sym_inverse_checked(g: &DMatrix<f64>, rel_floor: f64) -> Result<DMatrix<f64>> {
    let p = sym_pinv(g, rel_floor)?;
    let n = g.nrows();
    let min = p.eigen.values[0];
    let max = p.eigen.max_value();
    if !(max > rel_floor) || min <= rel_floor * max || p.rank < n {
        return Err(Error::SingularCovariance { rank: p.rank, dim: n });
    }
    Ok(p.pinv)
}

/// Quadratic form `xᵀ A x`.
pub fn quad_form(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    (x.transpose() * a * x)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn diagonal_matrix_is_sorted() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let e = jacobi_eigen(&a).unwrap();
        assert_eq!(e.values.as_slice(), &[-1.0, 2.0, 3.0]);
        assert_relative_eq!(e.vectors.column(2).into_owned(), DVector::from_vec(vec![1.0, 0.0, 0.0]));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..200 {
                let a = random_symmetric(&mut rng, n);
                let e = jacobi_eigen(&a).unwrap();
                let rel = (e.reconstruct() - &a).norm() / a.norm().max(f64::MIN_POSITIVE);
                assert!(rel < 1e-12, "n={n} rel={rel}");
                let gram = e.vectors.transpose() * &e.vectors;
                assert!((gram - DMatrix::identity(n, n)).norm() < 1e-12);
                for i in 1..n {
                    assert!(e.values[i - 1] <= e.values[i]);
                }
            }
        }
    }

    #[test]
    fn matches_independent_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a = random_symmetric(&mut rng, 4);
            let mine = jacobi_eigen(&a).unwrap();
            let mut theirs: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (x, y) in mine.values.iter().zip(theirs) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pinv_contract_on_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for rank in 1..4 {
            let b = DMatrix::<f64>::from_fn(4, rank, |_, _| rng.random_range(-1.0..1.0));
            let s = &b * b.transpose();
            let p = sym_pinv(&s, tolerance::PINV_RANK).unwrap();
            assert_eq!(p.rank, rank);
            assert!((&s * &p.pinv * &s - &s).norm() < 1e-8 * s.norm());
            // row-space vectors are recovered
            let v = &s * DVector::<f64>::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            assert!((&p.pinv * &s * &v - &v).norm() < 1e-8 * v.norm());
            // agrees with the SVD route
            let svd = s.clone().pseudo_inverse(1e-10 * s.norm()).unwrap();
            assert!((svd - &p.pinv).norm() < 1e-6 * p.pinv.norm());
        }
    }

    #[test]
    fn singular_inverse_rejected() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            sym_inverse_checked(&s, tolerance::COVARIANCE_RANK),
            Err(Error::SingularCovariance { rank: 1, dim: 2 })
        ));
        let z = DMatrix::<f64>::zeros(2, 2);
        assert!(sym_inverse_checked(&z, tolerance::COVARIANCE_RANK).is_err());
    }

    #[test]
    fn lu_solves_small_system() {
        let a = DMatrix::from_row_slice(3, 3, &[69.0, 591.0, 626.0, 53.0, 33.0, 402.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![69.0, 430.0, 1.0]);
        let x = lu_solve(&a, &b).unwrap();
        assert!((&a * &x - &b).norm() < 1e-10);
    }
}
