//! Dense linear algebra primitives. Everything here is deterministic:
//! fixed loop orders, cyclic Jacobi sweeps, no threading.

mod eigen;
mod matrix;
mod qr;
mod svd;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use matrix::{dot, norm1, norm2, Matrix};
pub use qr::{qr, solve_upper, RANK_TOLERANCE};
pub use svd::{svd, SvdResult};

pub(crate) use qr::qr_unchecked;

use crate::error::{dim, Error, Result};

/// Relative asymmetry accepted by [`psd_sqrt`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
/// Negative eigenvalues down to `-PSD_TOLERANCE · ‖S‖₂` are treated as roundoff.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return dim("spectral norm of an empty matrix");
    }
    a.ensure_finite("spectral norm input")?;
    if a.rows() >= a.cols() {
        Ok(svd(a)?.sigma[0])
    } else {
        Ok(svd(&a.transpose())?.sigma[0])
    }
}

/// Square root of a symmetric PSD matrix together with its spectral data.
#[derive(Clone, Debug)]
pub struct PsdSqrt {
    /// The symmetric PSD root `T` with `T·T = S`.
    pub root: Matrix,
    /// Eigenvalues of `T` (square roots of those of `S`), nonincreasing.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors (columns).
    pub vectors: Matrix,
}

/// Relative cutoff on the eigenvalues of a root below which it is singular.
pub const ROOT_RANK_TOLERANCE: f64 = 1e-12;

impl PsdSqrt {
    pub fn rank(&self) -> usize {
        let top = self.values.first().copied().unwrap_or(0.0);
        self.values.iter().filter(|&&v| v > ROOT_RANK_TOLERANCE * top).count()
    }

    pub fn is_full_rank(&self) -> bool {
        !self.values.is_empty() && self.rank() == self.values.len()
    }

    /// `T⁻¹ = Q Λ⁻¹ Qᵀ`; fails when `T` is numerically singular.
    pub fn inverse_root(&self) -> Result<Matrix> {
        if !self.is_full_rank() {
            let top = self.values.first().copied().unwrap_or(0.0);
            let bottom = self.values.last().copied().unwrap_or(0.0);
            return Err(Error::RankDeficient(format!(
                "square root is singular: eigenvalue range [{bottom:e}, {top:e}]"
            )));
        }
        Ok(self.spectral(|v| 1.0 / v))
    }

    /// `Q f(Λ) Qᵀ`.
    pub fn spectral(&self, f: impl Fn(f64) -> f64) -> Matrix {
        SymmetricEigen { values: self.values.clone(), vectors: self.vectors.clone() }
            .reconstruct_with(f)
    }
}

/// Symmetric PSD square root via Jacobi eigendecomposition.
pub fn psd_sqrt(s: &Matrix) -> Result<Matrix> {
    Ok(psd_sqrt_decomposed(s)?.root)
}

pub fn psd_sqrt_decomposed(s: &Matrix) -> Result<PsdSqrt> {
    if !s.is_square() {
        return dim(format!("square root of non-square {}x{}", s.rows(), s.cols()));
    }
    s.ensure_finite("psd_sqrt input")?;
    let asym = s.max_asymmetry();
    let sym_tol = SYMMETRY_TOLERANCE * s.max_abs();
    if asym > sym_tol {
        return Err(Error::Symmetry { asymmetry: asym, tolerance: sym_tol });
    }
    let eig = symmetric_eigen(s)?;
    let tol = PSD_TOLERANCE * eig.spectral_radius();
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPsd { min_eigenvalue: min, tolerance: tol });
    }
    let values: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let out = PsdSqrt { root: Matrix::zeros(0, 0), values, vectors: eig.vectors };
    Ok(PsdSqrt { root: out.spectral(|v| v), ..out })
}

/// `(SᵀS)^{1/2}` computed from the SVD of `S` rather than from the Gram
/// matrix, so small singular values keep full relative accuracy.
pub fn gram_sqrt(s: &Matrix) -> Result<PsdSqrt> {
    if s.rows() < s.cols() {
        return psd_sqrt_decomposed(&s.gram());
    }
    let f = svd(s)?;
    let out = PsdSqrt { root: Matrix::zeros(0, 0), values: f.sigma, vectors: f.v };
    Ok(PsdSqrt { root: out.spectral(|v| v), ..out })
}

/// Least-squares solution of `A X ≈ B` through Householder QR.
pub fn solve_least_squares(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return dim(format!("lstsq with {} rows and rhs of {} rows", a.rows(), b.rows()));
    }
    let (q, r) = qr(a)?;
    solve_upper(&r, &q.t_matmul(b)?)
}

/// Solves a square system by Gaussian elimination with partial pivoting.
/// Returns `None` when the system is singular to working precision.
pub fn solve_square(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return None;
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return None;
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| m[(i, k)].abs().total_cmp(&m[(j, k)].abs()))?;
        if m[(pivot, k)].abs() <= 1e-13 * scale {
            return None;
        }
        if pivot != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            rhs.swap(k, pivot);
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_diagonal() {
        let t = psd_sqrt(&Matrix::diag(&[4.0, 9.0])).unwrap();
        assert_eq!(t, Matrix::diag(&[2.0, 3.0]));
        assert_eq!(psd_sqrt(&Matrix::identity(5)).unwrap(), Matrix::identity(5));
    }

    #[test]
    fn sqrt_multiplies_back() {
        let s = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let t = psd_sqrt(&s).unwrap();
        assert!(t.matmul(&t).unwrap().sub(&s).unwrap().max_abs() <= 1e-10);
        assert_eq!(t.max_asymmetry(), 0.0);
    }

    #[test]
    fn sqrt_rejects_indefinite_and_asymmetric() {
        let s = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(psd_sqrt(&s), Err(Error::NotPsd { .. })));
        let s = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(psd_sqrt(&s), Err(Error::Symmetry { .. })));
    }

    #[test]
    fn sqrt_clamps_roundoff_negatives() {
        let s = Matrix::diag(&[1.0, -1e-12]);
        let t = psd_sqrt(&s).unwrap();
        assert_eq!(t, Matrix::diag(&[1.0, 0.0]));
    }

    #[test]
    fn gram_sqrt_matches_eigen_route() {
        let s = Matrix::from_fn(9, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.0 + (i == j) as u8 as f64);
        let a = gram_sqrt(&s).unwrap();
        let b = psd_sqrt_decomposed(&s.gram()).unwrap();
        assert!(a.root.sub(&b.root).unwrap().max_abs() < 1e-10);
        assert!(a.root.matmul(&a.root).unwrap().sub(&s.gram()).unwrap().max_abs() < 1e-9);
        let inv = a.inverse_root().unwrap();
        assert!(inv.matmul(&a.root).unwrap().sub(&Matrix::identity(4)).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn singular_root_has_no_inverse() {
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.5, 1.0]]).unwrap();
        let root = gram_sqrt(&s).unwrap();
        assert_eq!(root.rank(), 1);
        assert!(matches!(root.inverse_root(), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn spectral_norm_small_cases() {
        assert_eq!(spectral_norm(&Matrix::diag(&[5.0, 2.0])).unwrap(), 5.0);
        assert_eq!(spectral_norm(&Matrix::zeros(3, 2)).unwrap(), 0.0);
        assert!(spectral_norm(&Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn least_squares_identity_and_consistent() {
        let b = Matrix::from_rows(&[vec![1.0], vec![-2.0], vec![0.5]]).unwrap();
        let x = solve_least_squares(&Matrix::identity(3), &b).unwrap();
        assert!(x.sub(&b).unwrap().max_abs() < 1e-15);

        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x0 = Matrix::column_vector(&[0.5, -1.5]);
        let rhs = a.matmul(&x0).unwrap();
        let x = solve_least_squares(&a, &rhs).unwrap();
        assert!(a.matmul(&x).unwrap().sub(&rhs).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn square_solve() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        let x = solve_square(&a, &[4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(solve_square(&singular, &[1.0, 2.0]).is_none());
    }
}
