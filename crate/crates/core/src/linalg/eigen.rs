use super::Matrix;
use crate::error::{dim, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix: `S = V diag(values) Vᵀ`,
/// eigenvalues sorted in nonincreasing order.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// `V f(Λ) Vᵀ` for a spectral function `f`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += v[(i, k)] * fv[k] * v[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cyclic Jacobi eigendecomposition. Only the upper triangle is read; the
/// matrix is treated as exactly symmetric.
pub fn symmetric_eigen(s: &Matrix) -> Result<SymmetricEigen> {
    if !s.is_square() {
        return dim(format!("eigendecomposition of non-square {}x{}", s.rows(), s.cols()));
    }
    s.ensure_finite("symmetric eigen input")?;
    let n = s.rows();
    let mut a = s.clone();
    for i in 0..n {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
        }
    }
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(SymmetricEigen { values: vec![0.0; n], vectors: v });
    }
    let floor = scale * 1e-300_f64.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // negligible against the diagonal or against the whole matrix
                if apq.abs() <= floor
                    || apq.abs() <= f64::EPSILON * 0.25 * (app.abs() * aqq.abs()).sqrt()
                    || apq.abs() <= f64::EPSILON * 1e-3 * scale
                {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let np = c * akp - sn * akq;
                    let nq = sn * akp + c * akq;
                    a[(k, p)] = np;
                    a[(p, k)] = np;
                    a[(k, q)] = nq;
                    a[(q, k)] = nq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let e = symmetric_eigen(&Matrix::diag(&[1.0, 4.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![4.0, 2.0, 1.0]);
    }

    #[test]
    fn two_by_two() {
        let s = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&s).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let back = e.reconstruct_with(|l| l);
        assert!(back.sub(&s).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        let b = Matrix::from_fn(7, 7, |i, j| ((i * 13 + j * 7) % 17) as f64 / 5.0 - 1.5);
        let s = b.add(&b.transpose()).unwrap();
        let e = symmetric_eigen(&s).unwrap();
        let back = e.reconstruct_with(|l| l);
        assert!(back.sub(&s).unwrap().max_abs() < 1e-12);
        let vtv = e.vectors.gram();
        assert!(vtv.sub(&Matrix::identity(7)).unwrap().max_abs() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
