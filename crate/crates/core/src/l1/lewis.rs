use super::sampling::{with_replacement, CoresetSample};
use crate::error::{param, Error, Result};
use crate::l2::{approx_leverage, exact_leverage};
use crate::linalg::{svd, Matrix};
use crate::sketch::{Rng, SketchSpec};

/// Smallest weight kept during the iteration.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// How leverage scores are obtained inside the iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeverageMode {
    ExactLeverage,
    /// `approx_leverage` at `ε = 1/4`; the sketch seed is re-derived each
    /// iteration from the caller's stream.
    SketchedLeverage { spec: SketchSpec, jl_cols: usize },
}

#[derive(Clone, Debug)]
pub struct LewisState {
    pub w: Vec<f64>,
    pub iterations_run: usize,
    /// Entries clamped at [`WEIGHT_FLOOR`] in the last iteration.
    pub floored: usize,
}

impl LewisState {
    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }
}

/// `⌈2 log₂ log₂ n⌉`, at least 1.
pub fn default_lewis_iters(n: usize) -> usize {
    let n = n.max(4) as f64;
    ((2.0 * n.log2().log2()).ceil() as usize).max(1)
}

/// Iterates `w ← √(w · τ(W^{-1/2} A))` from `w = 1`. Stops early once an
/// update leaves `w` unchanged.
pub fn lewis_weights(a: &Matrix, t_iters: usize, mode: LeverageMode, rng: Rng) -> Result<LewisState> {
    if t_iters == 0 {
        return param("Lewis iteration needs at least one step");
    }
    let n = a.rows();
    let mut w = vec![1.0; n];
    let mut state = LewisState { w: w.clone(), iterations_run: 0, floored: 0 };
    for it in 0..t_iters {
        let inv_sqrt: Vec<f64> = w.iter().map(|v| 1.0 / v.sqrt()).collect();
        let scaled = a.scale_rows(&inv_sqrt)?;
        let tau = match mode {
            LeverageMode::ExactLeverage => leverage_any_rank(&scaled)?,
            LeverageMode::SketchedLeverage { spec, jl_cols } => {
                let spec = SketchSpec { seed: rng.split(it as u64).derive_seed(), ..spec };
                approx_leverage(&scaled, 0.25, &spec, jl_cols)?.tau
            }
        };
        let mut floored = 0;
        let next: Vec<f64> = w
            .iter()
            .zip(&tau)
            .map(|(wi, ti)| {
                let v = (wi * ti).sqrt();
                if v < WEIGHT_FLOOR {
                    floored += 1;
                    WEIGHT_FLOOR
                } else {
                    v
                }
            })
            .collect();
        let unchanged = next == w;
        w = next;
        state = LewisState { w: w.clone(), iterations_run: it + 1, floored };
        if unchanged {
            break;
        }
    }
    Ok(state)
}

/// Leverage scores, using the SVD restricted to the numerical range when
/// the matrix is rank deficient.
pub(crate) fn leverage_any_rank(a: &Matrix) -> Result<Vec<f64>> {
    match exact_leverage(a) {
        Err(Error::RankDeficient(_)) => {
            let s = svd(a)?;
            let cutoff = 1e-12 * s.sigma[0];
            let keep: Vec<usize> = (0..a.cols()).filter(|&k| s.sigma[k] > cutoff).collect();
            Ok((0..a.rows()).map(|i| keep.iter().map(|&k| s.u[(i, k)].powi(2)).sum()).collect())
        }
        other => other,
    }
}

/// `⌈72 c ε⁻² d ln(72 c ε⁻² d)⌉`.
pub fn lewis_sample_size(d: usize, eps: f64, c: f64) -> usize {
    let base = 72.0 * c * d as f64 / (eps * eps);
    (base * base.ln()).ceil() as usize
}

/// Samples `lewis_sample_size(d, eps, c)` rows with replacement from
/// `p_i = w_i / Σw`, scaling each by `1/(r p_i)`.
pub fn lewis_coreset(a: &Matrix, state: &LewisState, eps: f64, c: f64, rng: Rng) -> Result<CoresetSample> {
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("eps = {eps} outside (0, 1)"));
    }
    if !(c > 0.0) {
        return param(format!("sampling constant c = {c} must be positive"));
    }
    lewis_coreset_rows(a, state, lewis_sample_size(a.cols(), eps, c), rng)
}

/// [`lewis_coreset`] with an explicit number of draws.
pub fn lewis_coreset_rows(a: &Matrix, state: &LewisState, rows: usize, rng: Rng) -> Result<CoresetSample> {
    if state.w.len() != a.rows() {
        return Err(Error::Dimension(format!("{} weights for {} rows", state.w.len(), a.rows())));
    }
    if rows == 0 {
        return param("Lewis coreset needs at least one row");
    }
    let total = state.total();
    let p: Vec<f64> = state.w.iter().map(|w| w / total).collect();
    with_replacement(a, &p, rows, rng)
}
