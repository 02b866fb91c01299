use super::embed_l2;
use crate::error::{dim, param, Result};
use crate::linalg::{qr, Matrix};
use crate::sketch::{sample_gaussian, Rng, SketchSpec};

#[derive(Clone, Debug)]
pub struct LeverageScores {
    pub tau: Vec<f64>,
    pub eps: f64,
}

impl LeverageScores {
    pub fn total(&self) -> f64 {
        self.tau.iter().sum()
    }
}

/// Default Gaussian compression width `8·⌈ε⁻² ln n⌉`.
pub fn default_jl_cols(n: usize, eps: f64) -> usize {
    8 * ((n.max(2) as f64).ln() / (eps * eps)).ceil() as usize
}

/// Width `⌈300 ln n⌉` used inside the Lewis iteration.
pub fn lewis_jl_cols(n: usize) -> usize {
    (300.0 * (n.max(2) as f64).ln()).ceil() as usize
}

/// Estimates `τ̃_i = ‖e_iᵀ A Ã⁻¹ G‖²`. `jl_cols = 0` skips `G` and returns
/// the row norms of `AÃ⁻¹` exactly. `G` is drawn from `spec.seed`'s
/// dedicated child stream.
pub fn approx_leverage(
    a: &Matrix,
    eps: f64,
    spec: &SketchSpec,
    jl_cols: usize,
) -> Result<LeverageScores> {
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps = {eps} outside (0, 1)"));
    }
    let d = a.cols();
    let emb = embed_l2(a, spec)?;
    let mut right = emb.inverse()?;
    if jl_cols > 0 {
        let g = Matrix::from_vec(
            d,
            jl_cols,
            sample_gaussian(Rng::new(spec.seed).split(0x1e7e), d * jl_cols, 1.0 / (jl_cols as f64).sqrt()),
        )?;
        right = right.matmul(&g)?;
    }
    Ok(LeverageScores { tau: row_norms_sq(&a.matmul(&right)?), eps })
}

/// Exact leverage scores via the row norms of `Q` from a QR factorization.
pub fn exact_leverage(a: &Matrix) -> Result<Vec<f64>> {
    if a.rows() < a.cols() {
        return dim(format!("leverage needs rows >= cols, got {}x{}", a.rows(), a.cols()));
    }
    let (q, _) = qr(a)?;
    Ok(row_norms_sq(&q))
}

fn row_norms_sq(m: &Matrix) -> Vec<f64> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x * x).sum()).collect()
}
