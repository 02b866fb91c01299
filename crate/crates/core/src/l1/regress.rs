use super::basis::{basis_from_l2_any_rank, basis_from_stacked_any_rank, BasisChange};
use super::embed::{embed_l1_with, L1EmbedOptions, Variant};
use super::lewis::{default_lewis_iters, lewis_coreset_rows, lewis_sample_size, lewis_weights, LeverageMode};
use super::sampling::{l1_coreset, l1_sample_size, l1_sampling_probs, uniform_coreset, CoresetSample};
use super::solve::{l1_objective, solve_l1_small};
use super::spread::spread_apply;
use crate::error::{dim, param, Error, Result};
use crate::l2::RegressionResult;
use crate::linalg::Matrix;
use crate::sketch::{apply_sketch, Rng, SketchSpec};

/// How the reduced problem is built from `X = [A, −b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Basis `R = Ã` from the ℓ2 embedding, then ℓ1 sampling.
    WCBasisL2,
    /// Basis from a QR of the ℓ1 embedding, then ℓ1 sampling.
    WCBasisL1,
    /// As `WCBasisL1` with a linear CountSketch in place of `Ã₁`.
    CountSketchBasis,
    /// Exact-leverage Lewis weights, sampled with replacement.
    Lewis,
    /// Uniform rows without replacement. A baseline, not a guarantee.
    Uniform,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::WCBasisL2 => "wc-l2",
            Pipeline::WCBasisL1 => "mg",
            Pipeline::CountSketchBasis => "ww",
            Pipeline::Lewis => "lewis",
            Pipeline::Uniform => "unif",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct L1RegressParams {
    /// Coreset size: expected rows `s` for the basis pipelines, draws for
    /// Lewis, rows for uniform. Defaults to the sizes that carry the guarantee.
    pub sample_rows: Option<usize>,
    pub t: f64,
    pub variant: Variant,
    pub delta: f64,
    /// Bucket count of `Π₂`; defaults to the variant's formula.
    pub embed_rows: Option<usize>,
    /// Sketch for the ℓ2 part; defaults to a ½-JLT SRHT.
    pub l2_spec: Option<SketchSpec>,
    /// Rows of the CountSketch in the `CountSketchBasis` pipeline; defaults to
    /// `2(d+1)²`.
    pub ww_rows: Option<usize>,
    pub lewis_iters: Option<usize>,
    /// Constant of the Lewis sample size.
    pub c: f64,
}

impl Default for L1RegressParams {
    fn default() -> Self {
        L1RegressParams {
            sample_rows: None,
            t: 10.0,
            variant: Variant::LogR,
            delta: 0.1,
            embed_rows: None,
            l2_spec: None,
            ww_rows: None,
            lewis_iters: None,
            c: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct L1RegressInfo {
    pub coreset_rows: usize,
    /// Inner solve fell back to a minimum-norm step (rank-deficient coreset).
    pub min_norm: bool,
    pub converged: bool,
}

/// Coreset-based `min ‖Ax − b‖₁`.
pub fn regress_l1(
    a: &Matrix,
    b: &[f64],
    pipeline: Pipeline,
    eps: f64,
    params: &L1RegressParams,
    rng: Rng,
) -> Result<RegressionResult> {
    Ok(regress_l1_detailed(a, b, pipeline, eps, params, rng)?.0)
}

pub fn regress_l1_detailed(
    a: &Matrix,
    b: &[f64],
    pipeline: Pipeline,
    eps: f64,
    params: &L1RegressParams,
    rng: Rng,
) -> Result<(RegressionResult, L1RegressInfo)> {
    let (n, d) = a.shape();
    if b.len() != n {
        return dim(format!("rhs has {} entries, matrix has {n} rows", b.len()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps = {eps} outside (0, 1)"));
    }
    let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
    let x = a.hstack(&Matrix::column_vector(&neg_b))?;
    let core = build_coreset(&x, pipeline, eps, params, rng)?;
    if core.len() < d {
        return Err(Error::RankDeficient(format!("coreset has {} rows for {d} unknowns", core.len())));
    }
    let a_small = core.rows.column_block(0, d)?;
    let b_small: Vec<f64> = (0..core.len()).map(|i| -core.rows[(i, d)]).collect();
    let sol = solve_l1_small(&a_small, &b_small)?;
    let info = L1RegressInfo { coreset_rows: core.len(), min_norm: sol.min_norm, converged: sol.converged };
    let result = RegressionResult {
        sketched_cost: sol.objective,
        full_cost: Some(l1_objective(a, &sol.x, b)?),
        x: Matrix::column_vector(&sol.x),
    };
    Ok((result, info))
}

fn build_coreset(x: &Matrix, pipeline: Pipeline, eps: f64, p: &L1RegressParams, rng: Rng) -> Result<CoresetSample> {
    let (n, dx) = x.shape();
    let l2_spec = match p.l2_spec {
        Some(s) => s,
        None => SketchSpec::default_for(n, dx, 0.5, p.t, rng.split(0).derive_seed())?,
    };
    let sample = |basis: &BasisChange, alpha: f64| -> Result<CoresetSample> {
        let s = match p.sample_rows {
            Some(s) => s as f64,
            None => l1_sample_size(dx, alpha, eps, p.delta),
        };
        let probs = l1_sampling_probs(x, basis, s, p.delta, rng.split(1))?;
        l1_coreset(x, &probs, rng.split(2))
    };
    match pipeline {
        Pipeline::WCBasisL2 => {
            let basis = basis_from_l2_any_rank(x, &l2_spec)?;
            // κ₁ has no closed form; the ℓ2 condition of R stands in for it
            let kappa = basis.condition().unwrap_or(f64::INFINITY);
            sample(&basis, basis.alpha_bound.eval(kappa))
        }
        Pipeline::WCBasisL1 => {
            let opts = L1EmbedOptions { rows: p.embed_rows, ..Default::default() };
            let emb = embed_l1_with(x, p.t, p.variant, &l2_spec, rng.split(3), opts)?;
            let basis = basis_from_stacked_any_rank(&emb.stacked, Some((emb.kappa(), dx + emb.r)))?;
            sample(&basis, basis.alpha_bound.eval(f64::NAN))
        }
        Pipeline::CountSketchBasis => {
            let r = p.embed_rows.unwrap_or_else(|| p.variant.rows(dx, p.t));
            let rows = p.ww_rows.unwrap_or(2 * dx * dx);
            let scale = (dx as f64).sqrt() * (p.t * dx as f64).ln();
            let cs = SketchSpec::count_sketch(rows, rng.split(4).derive_seed());
            let top = apply_sketch(&cs, x)?.scale(scale);
            let stacked = top.vstack(&spread_apply(x, r, rng.split(3))?)?;
            let basis = basis_from_stacked_any_rank(&stacked, None)?;
            sample(&basis, f64::INFINITY)
        }
        Pipeline::Lewis => {
            let iters = p.lewis_iters.unwrap_or_else(|| default_lewis_iters(n));
            let state = lewis_weights(x, iters, LeverageMode::ExactLeverage, rng.split(5))?;
            let rows = p.sample_rows.unwrap_or_else(|| lewis_sample_size(dx, eps, p.c));
            lewis_coreset_rows(x, &state, rows, rng.split(6))
        }
        Pipeline::Uniform => {
            let rows = p
                .sample_rows
                .ok_or_else(|| Error::Param("uniform sampling needs an explicit row count".into()))?;
            uniform_coreset(x, rows, rng.split(7))
        }
    }
}
