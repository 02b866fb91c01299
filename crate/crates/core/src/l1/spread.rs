use rand::Rng as _;

use crate::error::{param, Result};
use crate::linalg::Matrix;
use crate::sketch::{cauchy, Rng};

/// Where the per-row scale factors of `Π₂` come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CauchySource {
    #[default]
    Random,
    /// Every factor is exactly 1. For testing mass identities only.
    UnitCauchy,
}

/// Bucket of each row under a uniform random partition into `r` sets.
pub(crate) fn partition(n: usize, r: usize, rng: Rng) -> Vec<usize> {
    let mut g = rng.split(0).generator();
    (0..n).map(|_| g.random_range(0..r)).collect()
}

/// `Π₂ᵀA`: row `j` is `Σ_{i ∈ S_j} C_i A_(i)` with one Cauchy per input row.
pub fn spread_apply(a: &Matrix, r: usize, rng: Rng) -> Result<Matrix> {
    spread_apply_with(a, r, rng, CauchySource::Random)
}

pub fn spread_apply_with(a: &Matrix, r: usize, rng: Rng, source: CauchySource) -> Result<Matrix> {
    if r == 0 {
        return param("spreading operator needs at least one bucket");
    }
    let (n, d) = a.shape();
    let buckets = partition(n, r, rng);
    let mut g = rng.split(1).generator();
    let mut out = Matrix::zeros(r, d);
    for (i, &j) in buckets.iter().enumerate() {
        let c = match source {
            CauchySource::Random => cauchy(&mut g),
            CauchySource::UnitCauchy => 1.0,
        };
        for (o, &x) in out.row_mut(j).iter_mut().zip(a.row(i)) {
            *o += c * x;
        }
    }
    out.ensure_finite("spreading output")?;
    Ok(out)
}
