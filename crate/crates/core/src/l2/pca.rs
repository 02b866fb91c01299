use super::embed_l2_any_rank;
use crate::error::{param, Result};
use crate::linalg::Matrix;
use crate::sketch::SketchSpec;

/// Rank-`k` approximation `Â_k = A Ṽ_k Ṽ_kᵀ` with `Ṽ_k` the top right
/// singular vectors of `Ã`. Returns `(Ṽ_k, Â_k)`.
pub fn approx_pca(a: &Matrix, k: usize, spec: &SketchSpec) -> Result<(Matrix, Matrix)> {
    let d = a.cols();
    if k == 0 || k > d {
        return param(format!("rank k = {k} outside 1..={d}"));
    }
    let emb = embed_l2_any_rank(a, spec)?;
    // Ã is symmetric PSD: its right singular vectors are its eigenvectors
    let vk = emb.eigenvectors().column_block(0, k)?;
    let a_hat = a.matmul(&vk)?.matmul(&vk.transpose())?;
    Ok((vk, a_hat))
}
