use super::{dot, Matrix};
use crate::error::{dim, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(sigma) Vᵀ` with `sigma` nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let us = self.u.scale_rows_by_columns(&self.sigma);
        us.matmul(&self.v.transpose()).expect("shapes agree by construction")
    }

    /// `σ_min / σ_max`, zero for an all-zero matrix.
    pub fn inverse_condition(&self) -> f64 {
        match (self.sigma.first(), self.sigma.last()) {
            (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
            _ => 0.0,
        }
    }
}

impl Matrix {
    fn scale_rows_by_columns(&self, factors: &[f64]) -> Matrix {
        Matrix::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] * factors[j])
    }
}

/// One-sided (Hestenes) Jacobi SVD of a tall matrix.
pub fn svd(a: &Matrix) -> Result<SvdResult> {
    let (n, d) = a.shape();
    if n < d {
        return dim(format!("svd requires rows >= cols, got {n}x{d}"));
    }
    a.ensure_finite("svd input")?;

    let mut w: Vec<Vec<f64>> = (0..d).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = f64::EPSILON * (n as f64).sqrt().max(1.0);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (k, &j) in order.iter().enumerate() {
        let s = sigma[k];
        let numerically_zero = s <= sigma_max * 1e-13 || s < 1e-290;
        let col = if numerically_zero {
            complete_basis(&u_cols, n, (s > 1e-290).then(|| &w[j]))
        } else {
            w[j].iter().map(|x| x / s).collect()
        };
        u_cols.push(col);
    }

    let u = Matrix::from_fn(n, d, |i, k| u_cols[k][i]);
    let vm = Matrix::from_fn(d, d, |i, k| v[order[k]][i]);
    Ok(SvdResult { u, sigma, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// A unit vector orthogonal to `basis`, seeded by `hint` when usable and by
/// canonical vectors otherwise.
fn complete_basis(basis: &[Vec<f64>], n: usize, hint: Option<&Vec<f64>>) -> Vec<f64> {
    let candidates = hint
        .cloned()
        .into_iter()
        .chain((0..n).map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        }));
    for mut c in candidates {
        let start = dot(&c, &c).sqrt();
        if start == 0.0 {
            continue;
        }
        c.iter_mut().for_each(|x| *x /= start);
        for _ in 0..2 {
            for b in basis {
                let proj = dot(&c, b);
                c.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = dot(&c, &c).sqrt();
        if norm > 1e-6 {
            c.iter_mut().for_each(|x| *x /= norm);
            return c;
        }
    }
    unreachable!("fewer than n basis vectors always admit a completion")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormality_error(m: &Matrix) -> f64 {
        m.gram().sub(&Matrix::identity(m.cols())).unwrap().max_abs()
    }

    #[test]
    fn diagonal() {
        let s = svd(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.sigma, vec![3.0, 1.0]);
        for i in 0..2 {
            assert!((s.u[(i, i)].abs() - 1.0).abs() < 1e-15);
            assert!((s.v[(i, i)].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [1.0, 2.0, -1.0, 0.5];
        let v = [3.0, -4.0];
        let a = Matrix::from_fn(4, 2, |i, j| u[i] * v[j]);
        let s = svd(&a).unwrap();
        let expected = (u.iter().map(|x| x * x).sum::<f64>()).sqrt() * 5.0;
        assert!((s.sigma[0] - expected).abs() < 1e-12);
        assert!(s.sigma[1].abs() < 1e-12);
        assert!(orthonormality_error(&s.u) <= 1e-10);
        assert!(orthonormality_error(&s.v) <= 1e-10);
        assert!(s.reconstruct().sub(&a).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_orthonormal_factors() {
        let s = svd(&Matrix::zeros(5, 3)).unwrap();
        assert_eq!(s.sigma, vec![0.0; 3]);
        assert!(orthonormality_error(&s.u) <= 1e-12);
    }

    #[test]
    fn rejects_wide() {
        assert!(svd(&Matrix::zeros(2, 3)).is_err());
    }
}
