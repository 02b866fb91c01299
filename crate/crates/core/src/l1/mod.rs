//! ℓ1 subspace embeddings, well-conditioned bases, sampling coresets and
//! coreset-based ℓ1 regression.

mod basis;
mod embed;
mod lewis;
mod regress;
mod sampling;
mod solve;
mod spread;

pub use basis::{basis_from_l1, basis_from_l2, AlphaBound, BasisChange};
pub use embed::{embed_l1, embed_l1_with, measure_l1_distortion, L1EmbedOptions, L1Embedding, Variant};
pub use lewis::{
    default_lewis_iters, lewis_coreset, lewis_coreset_rows, lewis_sample_size, lewis_weights, LeverageMode, LewisState,
    WEIGHT_FLOOR,
};
pub use regress::{regress_l1, regress_l1_detailed, L1RegressInfo, L1RegressParams, Pipeline};
pub use sampling::{
    cauchy_columns, l1_coreset, l1_sample_size, l1_sampling_probs, uniform_coreset, CoresetSample, WeightVector,
};
pub use solve::{l1_bruteforce_oracle, l1_objective, solve_l1_small, L1Solution};
pub use spread::{spread_apply, spread_apply_with, CauchySource};
