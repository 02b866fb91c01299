//! Oblivious ℓ2 sketches `Π` and the helpers around them.

mod fwht;
mod rng;

pub use fwht::fwht;
pub use rng::{cauchy, sample_cauchy, sample_gaussian, Rng};

pub(crate) use fwht::fwht_rows;
pub(crate) use rng::open_unit;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{dim, param, Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// Distribution family of `Π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchKind {
    /// Dense i.i.d. `N(0, 1/r)` entries.
    Gaussian,
    /// Random signs, orthonormal Hadamard, uniform row subsample.
    Srht,
    /// `passes` rounds of signs and Hadamard before subsampling.
    IteratedSrht,
    /// One random sign per input row at a random output row.
    CountSketch,
    /// `Π = I`; used for exact reference computations.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchSpec {
    pub kind: SketchKind,
    /// Target rows `r`. Ignored by `Identity`; clamped to the padded length
    /// for the Hadamard kinds.
    pub rows: usize,
    /// Hadamard rounds for `IteratedSrht`.
    pub passes: usize,
    pub seed: u64,
}

impl SketchSpec {
    pub fn gaussian(rows: usize, seed: u64) -> Self {
        SketchSpec { kind: SketchKind::Gaussian, rows, passes: 1, seed }
    }

    pub fn srht(rows: usize, seed: u64) -> Self {
        SketchSpec { kind: SketchKind::Srht, rows, passes: 1, seed }
    }

    pub fn iterated_srht(rows: usize, passes: usize, seed: u64) -> Self {
        SketchSpec { kind: SketchKind::IteratedSrht, rows, passes, seed }
    }

    pub fn count_sketch(rows: usize, seed: u64) -> Self {
        SketchSpec { kind: SketchKind::CountSketch, rows, passes: 1, seed }
    }

    pub fn identity() -> Self {
        SketchSpec { kind: SketchKind::Identity, rows: 0, passes: 1, seed: 0 }
    }

    /// Default sketch for an `n × d` input: SRHT at the dimension
    /// guaranteeing an `eps`-JLT with probability `1 − 1/t`, or a Gaussian
    /// sketch when the input is too small for the Hadamard bound to apply.
    pub fn default_for(n: usize, d: usize, eps: f64, t: f64, seed: u64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.5) {
            return param(format!("eps = {eps} outside (0, 1/2]"));
        }
        if d >= 2 && n >= 64 && n >= d {
            return Ok(SketchSpec::srht(srht_dim(d, n, eps, t)?, seed));
        }
        let r = ((d as f64 + 8.0 * (3.0 * t).ln()) / (eps * eps)).ceil() as usize;
        Ok(SketchSpec::gaussian(r.max(1), seed))
    }

    /// Number of rows `ΠᵀA` will have for an input with `n` rows.
    pub fn output_rows(&self, n: usize) -> usize {
        match self.kind {
            SketchKind::Identity => n,
            SketchKind::Srht | SketchKind::IteratedSrht => self.rows.min(n.next_power_of_two()),
            SketchKind::Gaussian | SketchKind::CountSketch => self.rows,
        }
    }
}

/// Unclamped Hadamard sketch size `(12/(5ε²))(√d + √(8 ln(3tn)))² ln d`.
pub fn srht_dim_raw(d: usize, n: usize, eps: f64, t: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return param(format!("eps = {eps} outside (0, 1/2]"));
    }
    if !(t >= 2.0) {
        return param(format!("failure parameter t = {t} must be >= 2"));
    }
    if d < 2 || n < d {
        return param(format!("srht_dim needs d >= 2 and n >= d, got d={d}, n={n}"));
    }
    let (d, n) = (d as f64, n as f64);
    let root = d.sqrt() + (8.0 * (3.0 * t * n).ln()).sqrt();
    Ok(12.0 / (5.0 * eps * eps) * root * root * d.ln())
}

/// Rows of an SRHT that is an `eps`-JLT with probability at least `1 − 1/t`,
/// clamped to the padded length.
pub fn srht_dim(d: usize, n: usize, eps: f64, t: f64) -> Result<usize> {
    let raw = srht_dim_raw(d, n, eps, t)?.ceil() as usize;
    Ok(raw.clamp(1, n.next_power_of_two()))
}

/// Computes `ΠᵀA`.
pub fn apply_sketch(spec: &SketchSpec, a: &Matrix) -> Result<Matrix> {
    let (n, d) = a.shape();
    if n == 0 || d == 0 {
        return dim(format!("cannot sketch an empty {n}x{d} matrix"));
    }
    a.ensure_finite("sketch input")?;
    if spec.kind != SketchKind::Identity && spec.rows == 0 {
        return param("sketch must have at least one row");
    }
    let rng = Rng::new(spec.seed);
    let out = match spec.kind {
        SketchKind::Identity => a.clone(),
        SketchKind::Gaussian => gaussian(a, spec.rows, rng),
        SketchKind::Srht => srht(a, spec.rows, 1, rng)?,
        SketchKind::IteratedSrht => {
            if spec.passes == 0 {
                return param("iterated SRHT needs at least one pass");
            }
            srht(a, spec.rows, spec.passes, rng)?
        }
        SketchKind::CountSketch => count_sketch(a, spec.rows, rng),
    };
    out.ensure_finite("sketch output")?;
    Ok(out)
}

fn gaussian(a: &Matrix, r: usize, rng: Rng) -> Matrix {
    let (n, d) = a.shape();
    let std_dev = 1.0 / (r as f64).sqrt();
    let mut out = Matrix::zeros(r, d);
    let mut coef = vec![0.0; n];
    for j in 0..r {
        let mut g = rng.split(j as u64).generator();
        coef.iter_mut().for_each(|c| *c = std_dev * g.sample::<f64, _>(StandardNormal));
        let row = out.row_mut(j);
        for (i, &c) in coef.iter().enumerate() {
            for (o, &x) in row.iter_mut().zip(a.row(i)) {
                *o += c * x;
            }
        }
    }
    out
}

fn srht(a: &Matrix, r: usize, passes: usize, rng: Rng) -> Result<Matrix> {
    let (n, d) = a.shape();
    let big_n = n.next_power_of_two();
    let r = r.min(big_n);
    let mut work = vec![0.0; big_n * d];
    work[..n * d].copy_from_slice(a.data());
    let norm = 1.0 / (big_n as f64).sqrt();
    for pass in 0..passes {
        let mut g = rng.split(pass as u64).generator();
        for i in 0..big_n {
            if g.random::<bool>() {
                work[i * d..(i + 1) * d].iter_mut().for_each(|x| *x = -*x);
            }
        }
        fwht_rows(&mut work, big_n, d)?;
        work.iter_mut().for_each(|x| *x *= norm);
    }
    let picked = sample_without_replacement(big_n, r, rng.split(u64::MAX));
    let scale = (big_n as f64 / r as f64).sqrt();
    let mut out = Matrix::zeros(r, d);
    for (k, &i) in picked.iter().enumerate() {
        for (o, &x) in out.row_mut(k).iter_mut().zip(&work[i * d..(i + 1) * d]) {
            *o = scale * x;
        }
    }
    Ok(out)
}

/// First `r` entries of a seeded Fisher–Yates shuffle of `0..n`.
pub(crate) fn sample_without_replacement(n: usize, r: usize, rng: Rng) -> Vec<usize> {
    let mut g = rng.generator();
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..r.min(n) {
        let j = g.random_range(k..n);
        idx.swap(k, j);
    }
    idx.truncate(r.min(n));
    idx
}

fn count_sketch(a: &Matrix, r: usize, rng: Rng) -> Matrix {
    let (n, d) = a.shape();
    let mut g = rng.generator();
    let mut out = Matrix::zeros(r, d);
    for i in 0..n {
        let bucket = g.random_range(0..r);
        let sign = if g.random::<bool>() { 1.0 } else { -1.0 };
        for (o, &x) in out.row_mut(bucket).iter_mut().zip(a.row(i)) {
            *o += sign * x;
        }
    }
    out
}

/// `‖I − (ΠᵀU)ᵀ(ΠᵀU)‖₂` for an orthonormal `U`.
pub fn jlt_error(sketched_u: &Matrix, u: &Matrix) -> Result<f64> {
    let d = u.cols();
    if sketched_u.cols() != d {
        return dim(format!("sketched basis has {} columns, basis has {d}", sketched_u.cols()));
    }
    let off = u.gram().sub(&Matrix::identity(d))?.max_abs();
    if off > 1e-8 {
        return Err(Error::Param(format!("basis is not orthonormal: ‖UᵀU − I‖_max = {off:e}")));
    }
    identity_gap(&sketched_u.gram())
}

/// `‖I − S‖₂` for symmetric `S`.
pub(crate) fn identity_gap(s: &Matrix) -> Result<f64> {
    let gap = Matrix::identity(s.rows()).sub(s)?;
    Ok(symmetric_eigen(&gap)?.spectral_radius())
}
