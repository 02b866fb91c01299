use crate::error::{param, Result};
use crate::linalg::Matrix;
use crate::sketch::{sample_gaussian, Rng};

/// `d² × d` matrix whose `i`-th `d × d` block is `e_i e_iᵀ`, plus i.i.d.
/// `N(0, noise²)` entries.
pub fn gen_bad_matrix(d: usize, noise: f64, rng: Rng) -> Result<Matrix> {
    if d < 2 {
        return param(format!("bad matrix needs d >= 2, got {d}"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return param(format!("noise level {noise} must be finite and nonnegative"));
    }
    let n = d * d;
    let mut data = if noise > 0.0 { sample_gaussian(rng, n * d, noise) } else { vec![0.0; n * d] };
    for i in 0..d {
        data[(i * d + i) * d + i] += 1.0;
    }
    Matrix::from_vec(n, d, data)
}

/// Regression instance with `d` informative spikes hidden among noisy,
/// centered constraints:
///
/// ```text
/// A = [e_i e_iᵀ + (I − e_i e_iᵀ) G_i (I − 11ᵀ/d)]_{i ≤ d} ; G (I − 11ᵀ/d)
/// b = [α e_i + ε (I − e_i e_iᵀ) g_i]_{i ≤ d}             ; ε g
/// ```
pub fn gen_l1_experiment(d: usize, n: usize, alpha: f64, eps: f64, rng: Rng) -> Result<(Matrix, Vec<f64>)> {
    if d < 1 || n < d * d + 1 {
        return param(format!("experiment needs n >= d² + 1, got n = {n}, d = {d}"));
    }
    if !(alpha >= 0.0 && eps >= 0.0 && alpha.is_finite() && eps.is_finite()) {
        return param(format!("alpha = {alpha}, eps = {eps} must be finite and nonnegative"));
    }
    let mut a = Matrix::zeros(n, d);
    let mut b = vec![0.0; n];
    let centre = |row: &mut [f64]| {
        let mean = row.iter().sum::<f64>() / d as f64;
        row.iter_mut().for_each(|v| *v -= mean);
    };
    for i in 0..d {
        let g = sample_gaussian(rng.split(i as u64), d * d, 1.0);
        let gb = sample_gaussian(rng.split((d + i) as u64), d, 1.0);
        for k in 0..d {
            let row = a.row_mut(i * d + k);
            if k == i {
                row[i] = 1.0;
                b[i * d + k] = alpha;
            } else {
                row.copy_from_slice(&g[k * d..(k + 1) * d]);
                centre(row);
                b[i * d + k] = eps * gb[k];
            }
        }
    }
    let tail = n - d * d;
    let g = sample_gaussian(rng.split(2 * d as u64), tail * d, 1.0);
    let gb = sample_gaussian(rng.split(2 * d as u64 + 1), tail, 1.0);
    for k in 0..tail {
        let row = a.row_mut(d * d + k);
        row.copy_from_slice(&g[k * d..(k + 1) * d]);
        centre(row);
        b[d * d + k] = eps * gb[k];
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_matrix_d2() {
        let a = gen_bad_matrix(2, 0.0, Rng::new(0)).unwrap();
        assert_eq!(a, Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap());
    }

    #[test]
    fn bad_matrix_shape_and_support() {
        for d in 2..7 {
            let a = gen_bad_matrix(d, 0.0, Rng::new(1)).unwrap();
            assert_eq!(a.shape(), (d * d, d));
            let nz: Vec<f64> = a.data().iter().copied().filter(|&v| v != 0.0).collect();
            assert_eq!(nz, vec![1.0; d]);
            let noisy = gen_bad_matrix(d, 0.01, Rng::new(1)).unwrap();
            assert!(noisy.is_finite() && noisy.shape() == (d * d, d));
        }
        assert!(gen_bad_matrix(1, 0.0, Rng::new(0)).is_err());
    }

    #[test]
    fn experiment_structure() {
        let (d, n) = (4, 100);
        let (a, b) = gen_l1_experiment(d, n, 20.0, 0.1, Rng::new(2)).unwrap();
        assert_eq!(a.shape(), (n, d));
        assert_eq!(b.len(), n);
        for i in 0..n {
            let row = a.row(i);
            if i < d * d && i % d == i / d {
                let k = i / d;
                assert!(row.iter().enumerate().all(|(j, &v)| v == if j == k { 1.0 } else { 0.0 }));
                assert_eq!(b[i], 20.0);
            } else {
                assert!(row.iter().sum::<f64>().abs() < 1e-12);
                assert!(b[i].abs() < 1.0);
            }
        }
        assert!(gen_l1_experiment(4, 16, 1.0, 0.1, Rng::new(0)).is_err());
    }
}
