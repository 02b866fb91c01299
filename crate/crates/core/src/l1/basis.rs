use super::embed::L1Embedding;
use crate::error::{Error, Result};
use crate::l2::{embed_l2, embed_l2_any_rank};
use crate::linalg::{qr, qr_unchecked, svd, Matrix};
use crate::sketch::SketchSpec;

/// Analytic bound on `α(U) = ‖U‖₁ / min_{‖x‖∞=1} ‖Ux‖₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaBound {
    /// `factor · κ₁(A)`; `κ₁` is not computable, so the bound stays symbolic.
    TimesKappa1(f64),
    Value(f64),
}

impl AlphaBound {
    /// Numeric value, substituting `kappa1` when symbolic.
    pub fn eval(&self, kappa1: f64) -> f64 {
        match *self {
            AlphaBound::TimesKappa1(f) => f * kappa1,
            AlphaBound::Value(v) => v,
        }
    }
}

/// `U = A R⁻¹`. `R⁻¹` is stored so `U` is never formed unless asked for.
#[derive(Clone, Debug)]
pub struct BasisChange {
    pub r: Matrix,
    pub r_inv: Matrix,
    pub alpha_bound: AlphaBound,
}

impl BasisChange {
    pub fn materialize(&self, a: &Matrix) -> Result<Matrix> {
        a.matmul(&self.r_inv)
    }

    /// `σ_max(R) / σ_min(R)`.
    pub fn condition(&self) -> Result<f64> {
        let s = svd(&self.r)?;
        Ok(s.sigma[0] / s.sigma[s.sigma.len() - 1])
    }
}

/// `R = Ã` from the ℓ2 embedding. `spec` should be a ½-JLT.
pub fn basis_from_l2(a: &Matrix, spec: &SketchSpec) -> Result<BasisChange> {
    let emb = embed_l2(a, spec)?;
    let d = a.cols() as f64;
    Ok(BasisChange {
        r_inv: emb.inverse()?,
        r: emb.a_tilde,
        alpha_bound: AlphaBound::TimesKappa1(3f64.sqrt() * d * d),
    })
}

/// `R` from a QR factorization of the stacked ℓ1 embedding.
pub fn basis_from_l1(a: &Matrix, emb: &L1Embedding) -> Result<BasisChange> {
    if emb.stacked.cols() != a.cols() {
        return Err(Error::Dimension(format!(
            "embedding has {} columns, input has {}",
            emb.stacked.cols(),
            a.cols()
        )));
    }
    let (_, r) = qr(&emb.stacked)?;
    let d = a.cols();
    let r_inv = crate::linalg::solve_upper(&r, &Matrix::identity(d))?;
    let alpha = emb.kappa() * d as f64 * ((d + emb.r) as f64).sqrt();
    Ok(BasisChange { r, r_inv, alpha_bound: AlphaBound::Value(alpha) })
}

/// Basis for possibly rank-deficient inputs: `R⁻¹` is replaced by the
/// pseudo-inverse, so `U` spans the range of `A`.
pub(crate) fn basis_from_l2_any_rank(a: &Matrix, spec: &SketchSpec) -> Result<BasisChange> {
    match basis_from_l2(a, spec) {
        Err(Error::RankDeficient(_)) => {
            let emb = embed_l2_any_rank(a, spec)?;
            let top = emb.eigenvalues()[0];
            let cutoff = crate::linalg::ROOT_RANK_TOLERANCE * top;
            let pinv = emb.root_spectral(|v| if v > cutoff { 1.0 / v } else { 0.0 });
            let d = a.cols() as f64;
            Ok(BasisChange {
                r: emb.a_tilde,
                r_inv: pinv,
                alpha_bound: AlphaBound::TimesKappa1(3f64.sqrt() * d * d),
            })
        }
        other => other,
    }
}

pub(crate) fn basis_from_stacked_any_rank(stacked: &Matrix, kappa_rows: Option<(f64, usize)>) -> Result<BasisChange> {
    let d = stacked.cols();
    let alpha = |kr: Option<(f64, usize)>| match kr {
        Some((kappa, rows)) => AlphaBound::Value(kappa * d as f64 * (rows as f64).sqrt()),
        None => AlphaBound::Value(f64::INFINITY),
    };
    match qr(stacked) {
        Ok((_, r)) => {
            let r_inv = crate::linalg::solve_upper(&r, &Matrix::identity(d))?;
            Ok(BasisChange { r, r_inv, alpha_bound: alpha(kappa_rows) })
        }
        Err(Error::RankDeficient(_)) => {
            let (_, r) = qr_unchecked(stacked)?;
            Ok(BasisChange { r_inv: pseudo_inverse(&r)?, r, alpha_bound: alpha(kappa_rows) })
        }
        Err(e) => Err(e),
    }
}

/// Moore–Penrose inverse of a square matrix with relative cutoff 1e-12.
pub(crate) fn pseudo_inverse(m: &Matrix) -> Result<Matrix> {
    let s = svd(m)?;
    let cutoff = 1e-12 * s.sigma[0];
    let d = m.cols();
    Ok(Matrix::from_fn(d, m.rows(), |i, j| {
        (0..d)
            .filter(|&k| s.sigma[k] > cutoff)
            .map(|k| s.v[(i, k)] * s.u[(j, k)] / s.sigma[k])
            .sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l1::{embed_l1, Variant};
    use crate::linalg::{norm1, norm2};
    use crate::sketch::{sample_gaussian, Rng};

    fn random_matrix(n: usize, d: usize, seed: u64) -> Matrix {
        Matrix::from_vec(n, d, sample_gaussian(Rng::new(seed), n * d, 1.0)).unwrap()
    }

    /// Monte-Carlo `α`: `‖U‖₁` over the smallest `‖Ux‖₁` seen among random
    /// sign-like `x` with `‖x‖∞ = 1` (an upper estimate of the minimum).
    fn alpha_estimate(u: &Matrix, trials: u64, seed: u64) -> f64 {
        let d = u.cols();
        let total = norm1(u.data());
        let mut min = f64::INFINITY;
        for k in 0..trials {
            let mut x = sample_gaussian(Rng::new(seed).split(k), d, 1.0);
            let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            x.iter_mut().for_each(|v| *v /= m);
            min = min.min(norm1(&u.mul_vec(&x).unwrap()));
        }
        total / min
    }

    #[test]
    fn orthonormal_input_with_exact_sketch() {
        let (q, _) = qr(&random_matrix(50, 4, 1)).unwrap();
        let b = basis_from_l2(&q, &SketchSpec::identity()).unwrap();
        assert!(b.r.sub(&Matrix::identity(4)).unwrap().max_abs() < 1e-12);
        assert!(b.materialize(&q).unwrap().sub(&q).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn exact_l2_basis_columns_have_unit_norm() {
        let a = random_matrix(80, 5, 2).scale_rows(&(0..80).map(|i| 1.0 + i as f64).collect::<Vec<_>>()).unwrap();
        let u = basis_from_l2(&a, &SketchSpec::identity()).unwrap().materialize(&a).unwrap();
        for k in 0..5 {
            assert!(norm2(&u.column(k)) >= (2.0_f64 / 3.0).sqrt());
        }
    }

    #[test]
    fn l2_basis_alpha_below_loose_surrogate() {
        let a = random_matrix(500, 8, 3);
        let b = basis_from_l2(&a, &SketchSpec::srht(256, 4)).unwrap();
        let alpha = alpha_estimate(&b.materialize(&a).unwrap(), 10_000, 5);
        let s = svd(&a).unwrap().sigma;
        let surrogate = b.alpha_bound.eval(s[0] / s[7] * 8.0);
        assert!(alpha <= surrogate, "{alpha} vs {surrogate}");
    }

    #[test]
    fn l1_basis_is_triangular_and_bounded() {
        let a = random_matrix(400, 10, 6);
        let spec = SketchSpec::default_for(400, 10, 0.5, 10.0, 7).unwrap();
        let emb = embed_l1(&a, 10.0, Variant::LogR, &spec, Rng::new(8)).unwrap();
        let b = basis_from_l1(&a, &emb).unwrap();
        assert_eq!(b.r.shape(), (10, 10));
        for i in 0..10 {
            for j in 0..i {
                assert_eq!(b.r[(i, j)], 0.0);
            }
        }
        let alpha = alpha_estimate(&b.materialize(&a).unwrap(), 2000, 9);
        assert!(alpha <= b.alpha_bound.eval(f64::NAN));
    }

    #[test]
    fn qr_of_orthonormal_stack_is_identity() {
        let (q, _) = qr(&Matrix::identity(3)).unwrap();
        let b = basis_from_stacked_any_rank(&q, None).unwrap();
        assert_eq!(b.r, Matrix::identity(3));
    }

    #[test]
    fn pseudo_inverse_of_singular() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let p = pseudo_inverse(&m).unwrap();
        assert!(p.sub(&m).unwrap().max_abs() < 1e-15);
    }
}
