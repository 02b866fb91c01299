use super::{eigen::symmetric_eigen, Matrix};
use crate::error::{dim, Error, Result};

/// Relative threshold on `|R_ii| / ‖A‖₂` below which a column is dependent.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Householder QR with thin `Q` (n×d) and upper triangular `R` (d×d) with a
/// nonnegative diagonal.
pub fn qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (q, r) = qr_unchecked(a)?;
    let norm = spectral_norm_small(&r)?;
    for i in 0..r.rows() {
        if r[(i, i)] <= RANK_TOLERANCE * norm {
            return Err(Error::RankDeficient(format!(
                "|R[{i},{i}]| = {:e} <= {RANK_TOLERANCE:e} * ‖A‖₂ = {:e}",
                r[(i, i)],
                norm
            )));
        }
    }
    Ok((q, r))
}

/// Applies `I − 2vvᵀ` (acting on rows `k..`) to columns `first..` of a
/// row-major matrix with `d` columns, walking rows contiguously.
fn reflect_rows(data: &mut [f64], d: usize, k: usize, v: &[f64], first: usize, proj: &mut [f64]) {
    let proj = &mut proj[first..d];
    proj.iter_mut().for_each(|p| *p = 0.0);
    for (vi, row) in v.iter().zip(data[k * d..].chunks_exact(d)) {
        for (p, x) in proj.iter_mut().zip(&row[first..]) {
            *p += vi * x;
        }
    }
    for (vi, row) in v.iter().zip(data[k * d..].chunks_exact_mut(d)) {
        let s = 2.0 * vi;
        for (x, p) in row[first..].iter_mut().zip(proj.iter()) {
            *x -= s * p;
        }
    }
}

/// QR without the rank check; `R` may carry zero diagonal entries.
pub(crate) fn qr_unchecked(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (n, d) = a.shape();
    if n < d {
        return dim(format!("qr requires rows >= cols, got {n}x{d}"));
    }
    a.ensure_finite("qr input")?;
    let mut work = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(d);

    let mut proj = vec![0.0; d];
    for k in 0..d {
        let mut v: Vec<f64> = (k..n).map(|i| work[(i, k)]).collect();
        let norm_x = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm_x } else { norm_x };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= vnorm);
        reflect_rows(work.data_mut(), d, k, &v, k, &mut proj);
        for i in (k + 1)..n {
            work[(i, k)] = 0.0;
        }
        work[(k, k)] = alpha;
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{d-1} applied to the first d columns of I_n.
    let mut q = Matrix::zeros(n, d);
    for j in 0..d {
        q[(j, j)] = 1.0;
    }
    for k in (0..d).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        reflect_rows(q.data_mut(), d, k, v, 0, &mut proj);
    }

    let mut r = Matrix::zeros(d, d);
    for i in 0..d {
        let flip = work[(i, i)] < 0.0;
        for j in i..d {
            r[(i, j)] = if flip { -work[(i, j)] } else { work[(i, j)] };
        }
        if flip {
            for row in 0..n {
                q[(row, i)] = -q[(row, i)];
            }
        }
    }
    Ok((q, r))
}

/// Solves `R x = B` for upper triangular `R`.
pub fn solve_upper(r: &Matrix, b: &Matrix) -> Result<Matrix> {
    let d = r.rows();
    if !r.is_square() || b.rows() != d {
        return dim(format!(
            "triangular solve with {}x{} and rhs {}x{}",
            r.rows(),
            r.cols(),
            b.rows(),
            b.cols()
        ));
    }
    let p = b.cols();
    let mut x = b.clone();
    for i in (0..d).rev() {
        let rii = r[(i, i)];
        if rii == 0.0 {
            return Err(Error::RankDeficient(format!("zero pivot at {i}")));
        }
        for c in 0..p {
            let mut s = x[(i, c)];
            for k in (i + 1)..d {
                s -= r[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / rii;
        }
    }
    Ok(x)
}

/// Spectral norm of a small square-ish matrix through the eigenvalues of
/// its Gram matrix.
pub(crate) fn spectral_norm_small(m: &Matrix) -> Result<f64> {
    let e = symmetric_eigen(&m.gram())?;
    Ok(e.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let a = Matrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        let (q, r) = qr(&a).unwrap();
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((q[(1, 0)] - 0.8).abs() < 1e-15);
        assert!((r[(0, 0)] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn identity_is_exact() {
        let (q, r) = qr(&Matrix::identity(4)).unwrap();
        assert_eq!(q, Matrix::identity(4));
        assert_eq!(r, Matrix::identity(4));
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(qr(&a), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn upper_solve() {
        let r = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![4.0], vec![8.0]]).unwrap();
        let x = solve_upper(&r, &b).unwrap();
        assert_eq!(x.data(), &[1.0, 2.0]);
    }
}
