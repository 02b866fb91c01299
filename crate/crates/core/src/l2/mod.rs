//! Fixed-dimension ℓ2 subspace embedding `Ã = (AᵀΠΠᵀA)^{1/2}` and the
//! applications built on it.

mod leverage;
mod pca;
mod regression;

pub use leverage::{
    approx_leverage, default_jl_cols, exact_leverage, lewis_jl_cols, LeverageScores,
};
pub use pca::approx_pca;
pub use regression::{
    l2_cost, sketch_regress_l2, L2Solver, NonNegative, RegressionResult, Ridge, Unconstrained,
};

use crate::error::{dim, Error, Result};
use crate::linalg::{gram_sqrt, svd, Matrix, PsdSqrt, ROOT_RANK_TOLERANCE};
use crate::sketch::{apply_sketch, identity_gap, SketchSpec};

/// The `d × d` embedding of an `n × d` matrix.
#[derive(Clone, Debug)]
pub struct L2Embedding {
    /// Symmetric PSD `Ã`.
    pub a_tilde: Matrix,
    /// Sketch used for `Π`.
    pub spec: SketchSpec,
    /// Distortion the sketch was sized for, when known.
    pub target_eps: Option<f64>,
    root: PsdSqrt,
}

impl L2Embedding {
    pub fn dim(&self) -> usize {
        self.a_tilde.rows()
    }

    /// `Ã⁻¹` from the stored eigendecomposition.
    pub fn inverse(&self) -> Result<Matrix> {
        self.root.inverse_root()
    }

    /// Eigenvalues of `Ã`, nonincreasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.root.values
    }

    /// Eigenvectors of `Ã` as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &Matrix {
        &self.root.vectors
    }

    /// `Q f(Λ) Qᵀ` over the eigendecomposition of `Ã`.
    pub(crate) fn root_spectral(&self, f: impl Fn(f64) -> f64) -> Matrix {
        self.root.spectral(f)
    }
}

/// Builds `Ã` for a full-rank `a`.
pub fn embed_l2(a: &Matrix, spec: &SketchSpec) -> Result<L2Embedding> {
    let emb = embed_l2_any_rank(a, spec)?;
    if !emb.root.is_full_rank() {
        let v = emb.eigenvalues();
        return Err(Error::RankDeficient(format!(
            "sketched matrix has rank {} < {} (eigenvalues of Ã in [{:e}, {:e}], cutoff {ROOT_RANK_TOLERANCE:e})",
            emb.root.rank(),
            v.len(),
            v[v.len() - 1],
            v[0]
        )));
    }
    Ok(emb)
}

/// [`embed_l2`] with the default sketch for distortion `eps` at failure
/// probability `1/t`.
pub fn embed_l2_eps(a: &Matrix, eps: f64, t: f64, seed: u64) -> Result<L2Embedding> {
    let spec = SketchSpec::default_for(a.rows(), a.cols(), eps, t, seed)?;
    let mut emb = embed_l2(a, &spec)?;
    emb.target_eps = Some(eps);
    Ok(emb)
}

/// Same construction without the rank check. Regression on consistent
/// systems and PCA of low-rank inputs go through here.
pub(crate) fn embed_l2_any_rank(a: &Matrix, spec: &SketchSpec) -> Result<L2Embedding> {
    let (n, d) = a.shape();
    if n < d {
        return dim(format!("embedding needs rows >= cols, got {n}x{d}"));
    }
    let sketched = apply_sketch(spec, a)?;
    let root = gram_sqrt(&sketched)?;
    Ok(L2Embedding { a_tilde: root.root.clone(), spec: *spec, target_eps: None, root })
}

/// Spectral distortion `‖I − (AᵀA)^{-1/2} ÃᵀÃ (AᵀA)^{-1/2}‖₂`.
pub fn measure_l2_distortion(a: &Matrix, a_tilde: &Matrix) -> Result<f64> {
    let d = a.cols();
    if a_tilde.cols() != d {
        return dim(format!("embedding has {} columns, input has {d}", a_tilde.cols()));
    }
    let f = svd(a)?;
    let (hi, lo) = (f.sigma[0], f.sigma[d - 1]);
    if lo <= 1e-12 * hi {
        return Err(Error::RankDeficient(format!("σ_min/σ_max = {:e}", lo / hi)));
    }
    // (AᵀA)^{-1/2} = V Σ⁻¹ Vᵀ; the outer V's drop out of the norm.
    let inv_sigma: Vec<f64> = f.sigma.iter().map(|s| 1.0 / s).collect();
    let b = a_tilde.matmul(&f.v)?;
    let b = Matrix::from_fn(b.rows(), d, |i, j| b[(i, j)] * inv_sigma[j]);
    identity_gap(&b.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, qr};
    use crate::sketch::{jlt_error, sample_gaussian, Rng};

    fn random_matrix(n: usize, d: usize, seed: u64) -> Matrix {
        Matrix::from_vec(n, d, sample_gaussian(Rng::new(seed), n * d, 1.0)).unwrap()
    }

    #[test]
    fn identity_sketch_is_exact() {
        let a = random_matrix(40, 5, 1);
        let emb = embed_l2(&a, &SketchSpec::identity()).unwrap();
        assert!(measure_l2_distortion(&a, &emb.a_tilde).unwrap() < 1e-12);
        let (q, _) = qr(&a).unwrap();
        let emb = embed_l2(&q, &SketchSpec::identity()).unwrap();
        assert!(emb.a_tilde.sub(&Matrix::identity(5)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn distortion_of_scaled_root() {
        let a = random_matrix(30, 4, 2);
        let exact = embed_l2(&a, &SketchSpec::identity()).unwrap().a_tilde;
        let eps: f64 = 0.3;
        let scaled = exact.scale((1.0 + eps).sqrt());
        assert!((measure_l2_distortion(&a, &scaled).unwrap() - eps).abs() < 1e-10);
    }

    #[test]
    fn distortion_equals_jlt_error() {
        let a = random_matrix(512, 6, 3);
        let spec = SketchSpec::srht(60, 4);
        let emb = embed_l2(&a, &spec).unwrap();
        let u = svd(&a).unwrap().u;
        let jlt = jlt_error(&apply_sketch(&spec, &u).unwrap(), &u).unwrap();
        let dist = measure_l2_distortion(&a, &emb.a_tilde).unwrap();
        assert!((jlt - dist).abs() < 1e-8, "{jlt} vs {dist}");
    }

    #[test]
    fn directional_errors_below_distortion() {
        let a = random_matrix(300, 5, 7);
        let emb = embed_l2(&a, &SketchSpec::gaussian(40, 8)).unwrap();
        let eps = measure_l2_distortion(&a, &emb.a_tilde).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..2000 {
            let x = sample_gaussian(Rng::new(9).split(k), 5, 1.0);
            let ax = norm2(&a.mul_vec(&x).unwrap()).powi(2);
            let tx = norm2(&emb.a_tilde.mul_vec(&x).unwrap()).powi(2);
            worst = worst.max((tx - ax).abs() / ax);
        }
        assert!(worst <= eps + 1e-10);
        assert!(worst >= 0.5 * eps, "sampled {worst} vs exact {eps}");
    }

    #[test]
    fn rejects_rank_deficient() {
        let mut a = random_matrix(50, 3, 5);
        for i in 0..50 {
            a[(i, 2)] = a[(i, 0)] - 2.0 * a[(i, 1)];
        }
        assert!(matches!(embed_l2(&a, &SketchSpec::identity()), Err(Error::RankDeficient(_))));
        assert!(matches!(
            measure_l2_distortion(&a, &Matrix::identity(3)),
            Err(Error::RankDeficient(_))
        ));
        assert!(embed_l2(&random_matrix(2, 3, 1), &SketchSpec::identity()).is_err());
    }

    #[test]
    fn output_is_d_by_d() {
        let a = random_matrix(1024, 16, 11);
        for eps in [0.5_f64, 0.25, 0.1] {
            let emb = embed_l2_eps(&a, eps, 4.0, 1).unwrap();
            assert_eq!(emb.a_tilde.shape(), (16, 16));
            assert_eq!(emb.a_tilde.max_asymmetry(), 0.0);
        }
    }
}
