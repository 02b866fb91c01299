//! Instance generators, matrix IO and the benchmark drivers behind the
//! `bench-*` subcommands.

mod distortion;
mod gen;
mod io;
mod regress;

pub use distortion::{bench_distortion, DistortionCell, DistortionReport, DistortionRow, DISTORTION_METHODS};
pub use gen::{gen_bad_matrix, gen_l1_experiment};
pub use io::{parse_csv, parse_mtb, read_matrix, to_csv, to_mtb, write_matrix};
pub use regress::{bench_regress_l1, RegressCell, RegressReport, RegressRow, REGRESS_METHODS};

use crate::error::{param, Result};
use crate::l1::Variant;

/// Rows `r₁` of the Hadamard sketch inside the nonlinear embeddings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerRows {
    Fixed(usize),
    /// `r₁ = k·r` at each grid point.
    TimesR(f64),
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub d: usize,
    pub n: usize,
    pub seeds: usize,
    /// Embedding sizes as multiples of `d`.
    pub r_grid: Vec<f64>,
    pub eps: f64,
    pub t: f64,
    pub variant: Variant,
    /// Entry noise of the bad matrix, or `ε` of the regression generator.
    pub noise: f64,
    pub alpha: f64,
    /// Defaults to `Fixed(10·d)`.
    pub inner: Option<InnerRows>,
    pub seed: u64,
    pub timing: bool,
}

impl BenchConfig {
    /// `d = 16` on the `d² × d` bad matrix with noise 0.01.
    pub fn distortion_default() -> Self {
        BenchConfig {
            d: 16,
            n: 256,
            seeds: 20,
            r_grid: vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0],
            eps: 0.5,
            t: 10.0,
            variant: Variant::LogR,
            noise: 0.01,
            alpha: 0.0,
            inner: None,
            seed: 0,
            timing: true,
        }
    }

    /// `d = 10`, `n = 1000`, `α = 20`, `ε = 1/√n`.
    pub fn regress_default() -> Self {
        BenchConfig {
            d: 10,
            n: 1000,
            seeds: 10,
            r_grid: vec![3.0, 5.0, 10.0, 20.0, 30.0],
            eps: 0.5,
            t: 10.0,
            variant: Variant::LogR,
            noise: 1.0 / 1000f64.sqrt(),
            alpha: 20.0,
            inner: None,
            seed: 0,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return param("need at least one seed");
        }
        if self.r_grid.is_empty() || self.r_grid.iter().any(|&m| !(m >= 1.0) || !m.is_finite()) {
            return param(format!("r grid entries must be >= 1, got {:?}", self.r_grid));
        }
        if self.d == 0 {
            return param("d must be positive");
        }
        Ok(())
    }

    pub(crate) fn grid_rows(&self) -> Vec<usize> {
        self.r_grid.iter().map(|m| (m * self.d as f64).round() as usize).collect()
    }

    pub(crate) fn inner_rows(&self, r: usize) -> usize {
        match self.inner.unwrap_or(InnerRows::Fixed(10 * self.d)) {
            InnerRows::Fixed(r1) => r1,
            InnerRows::TimesR(k) => (k * r as f64).round() as usize,
        }
    }
}

/// Median, averaging the middle pair for even counts.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

pub(crate) fn fmt_time(timing: bool, v: f64) -> String {
    if timing {
        format!("{v:.6}")
    } else {
        "NA".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn config_validation() {
        let mut c = BenchConfig::distortion_default();
        assert!(c.validate().is_ok());
        c.r_grid = vec![0.5];
        assert!(c.validate().is_err());
        c.r_grid = vec![1.0];
        c.seeds = 0;
        assert!(c.validate().is_err());
    }
}
