use super::spread::{spread_apply_with, CauchySource};
use crate::error::{dim, param, Result};
use crate::l2::embed_l2_any_rank;
use crate::linalg::{norm1, Matrix};
use crate::sketch::{sample_gaussian, Rng, SketchSpec};

/// Choice of bucket count for `Π₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    /// `r = ⌈80 d ln(td)⌉`.
    LogR,
    /// `r = ⌈100 d ln^{1+1/q}(td)⌉`, `q ≥ 3`.
    LogPowerR(f64),
}

impl Variant {
    pub fn rows(&self, d: usize, t: f64) -> usize {
        let u = t * d as f64;
        match *self {
            Variant::LogR => (80.0 * d as f64 * u.ln()).ceil() as usize,
            Variant::LogPowerR(q) => (100.0 * d as f64 * u.ln().powf(1.0 + 1.0 / q)).ceil() as usize,
        }
    }

    /// Guaranteed lower distortion constant.
    pub fn lower_bound(&self, d: usize, t: f64) -> f64 {
        match *self {
            Variant::LogR => 1.0 / 64.0,
            Variant::LogPowerR(q) => (t * d as f64).ln().ln() / (64.0 * q),
        }
    }

    /// Guaranteed upper distortion constant `(63/20) td ln(td)`.
    pub fn upper_bound(&self, d: usize, t: f64) -> f64 {
        let u = t * d as f64;
        63.0 / 20.0 * u * u.ln()
    }

    fn check(&self, d: usize, t: f64) -> Result<()> {
        if d < 10 {
            return param(format!("l1 embedding needs d >= 10, got {d}"));
        }
        if !(t >= 10.0) {
            return param(format!("l1 embedding needs t >= 10, got {t}"));
        }
        if let Variant::LogPowerR(q) = *self {
            if !(q >= 3.0) {
                return param(format!("variant exponent q = {q} must be >= 3"));
            }
            if t * (d as f64) < q.powf(1.17) {
                return param(format!("td = {} below q^1.17 = {}", t * d as f64, q.powf(1.17)));
            }
        }
        Ok(())
    }
}

/// Stacked `(d + r) × d` matrix `[√d ln(td) · Ã₁; Π₂ᵀA]`.
#[derive(Clone, Debug)]
pub struct L1Embedding {
    pub stacked: Matrix,
    pub scale_top: f64,
    pub r: usize,
    pub t: f64,
    pub variant: Variant,
    /// Seed of the partition and Cauchy streams.
    pub seed: u64,
    /// Sketch used for `Ã₁`.
    pub l2_spec: SketchSpec,
}

impl L1Embedding {
    pub fn d(&self) -> usize {
        self.stacked.cols()
    }

    pub fn lower_bound(&self) -> f64 {
        self.variant.lower_bound(self.d(), self.t)
    }

    pub fn upper_bound(&self) -> f64 {
        self.variant.upper_bound(self.d(), self.t)
    }

    /// Per-instance dilation constant `(3/2) d ln(td) + t d ln(trd)`.
    pub fn dilation_bound(&self) -> f64 {
        let (d, t, r) = (self.d() as f64, self.t, self.r as f64);
        1.5 * d * (t * d).ln() + t * d * (t * r * d).ln()
    }

    /// Ratio of upper to lower constant.
    pub fn kappa(&self) -> f64 {
        self.upper_bound() / self.lower_bound()
    }
}

/// Overrides of the default sizes and Cauchy source.
#[derive(Clone, Copy, Debug, Default)]
pub struct L1EmbedOptions {
    /// Overrides the variant's bucket count.
    pub rows: Option<usize>,
    pub cauchy: CauchySource,
}

/// The oblivious ℓ1 embedding. `spec` should be a ½-JLT for `a`, for
/// example `SketchSpec::default_for(n, d, 0.5, t, seed)`.
pub fn embed_l1(a: &Matrix, t: f64, variant: Variant, spec: &SketchSpec, rng: Rng) -> Result<L1Embedding> {
    variant.check(a.cols(), t)?;
    embed_l1_with(a, t, variant, spec, rng, L1EmbedOptions::default())
}

/// [`embed_l1`] without the `d, t ≥ 10` hypotheses and with overrides.
pub fn embed_l1_with(
    a: &Matrix,
    t: f64,
    variant: Variant,
    spec: &SketchSpec,
    rng: Rng,
    opts: L1EmbedOptions,
) -> Result<L1Embedding> {
    let d = a.cols();
    if d == 0 || a.rows() < d {
        return dim(format!("l1 embedding needs rows >= cols >= 1, got {}x{d}", a.rows()));
    }
    if !(t > 1.0) {
        return param(format!("t = {t} must exceed 1"));
    }
    if let Variant::LogPowerR(q) = variant {
        if !(q > 0.0) {
            return param(format!("variant exponent q = {q} must be positive"));
        }
    }
    let r = opts.rows.unwrap_or_else(|| variant.rows(d, t));
    let scale_top = (d as f64).sqrt() * (t * d as f64).ln();
    let top = embed_l2_any_rank(a, spec)?.a_tilde.scale(scale_top);
    let bottom = spread_apply_with(a, r, rng, opts.cauchy)?;
    Ok(L1Embedding {
        stacked: top.vstack(&bottom)?,
        scale_top,
        r,
        t,
        variant,
        seed: rng.seed(),
        l2_spec: *spec,
    })
}

/// Smallest and largest `‖Ãx‖₁ / ‖Ax‖₁` over `num_dirs` Gaussian directions
/// and the `2d` signed coordinate directions.
pub fn measure_l1_distortion(a: &Matrix, emb: &L1Embedding, num_dirs: usize, rng: Rng) -> Result<(f64, f64)> {
    l1_ratio_range(a, &emb.stacked, num_dirs, rng)
}

pub(crate) fn l1_ratio_range(a: &Matrix, stacked: &Matrix, num_dirs: usize, rng: Rng) -> Result<(f64, f64)> {
    let d = a.cols();
    if stacked.cols() != d {
        return dim(format!("embedding has {} columns, input has {d}", stacked.cols()));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut visit = |x: &[f64]| -> Result<()> {
        let ax = norm1(&a.mul_vec(x)?);
        if ax > 0.0 {
            let ratio = norm1(&stacked.mul_vec(x)?) / ax;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        Ok(())
    };
    for k in 0..d {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[k] = sign;
            visit(&e)?;
        }
    }
    for k in 0..num_dirs {
        visit(&sample_gaussian(rng.split(k as u64), d, 1.0))?;
    }
    if lo > hi {
        return Err(crate::Error::Numeric("every probe direction lies in the null space".into()));
    }
    Ok((lo, hi))
}
