use std::time::Instant;

use super::{fmt_time, gen_bad_matrix, median, BenchConfig};
use crate::error::Result;
use crate::l2::{embed_l2, measure_l2_distortion};
use crate::linalg::Matrix;
use crate::sketch::{apply_sketch, Rng, SketchSpec};

/// Linear Gaussian, linear SRHT, two-pass SRHT, `(AᵀΠΠᵀA)^{1/2}` and the
/// same root followed by an `r × d` Gaussian.
pub const DISTORTION_METHODS: [&str; 5] = ["gaussian", "srht", "srht2", "root", "root-gaussian"];

#[derive(Clone, Debug)]
pub struct DistortionCell {
    pub method: &'static str,
    pub r_over_d: f64,
    pub seed: usize,
    pub time_s: f64,
    pub distortion: f64,
}

#[derive(Clone, Debug)]
pub struct DistortionRow {
    pub method: &'static str,
    pub r_over_d: f64,
    pub time_s: f64,
    pub distortion: f64,
    pub speedup: f64,
}

#[derive(Clone, Debug)]
pub struct DistortionReport {
    pub cells: Vec<DistortionCell>,
    pub timing: bool,
}

impl DistortionReport {
    /// Medians over seeds, grid-major then method order.
    pub fn rows(&self) -> Vec<DistortionRow> {
        let mut grid: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !grid.contains(&c.r_over_d) {
                grid.push(c.r_over_d);
            }
        }
        let pick = |m: &str, g: f64, f: fn(&DistortionCell) -> f64| -> f64 {
            let v: Vec<f64> = self.cells.iter().filter(|c| c.method == m && c.r_over_d == g).map(f).collect();
            median(&v)
        };
        let mut out = Vec::new();
        for &g in &grid {
            let base = pick("gaussian", g, |c| c.time_s);
            for m in DISTORTION_METHODS {
                let time_s = pick(m, g, |c| c.time_s);
                out.push(DistortionRow {
                    method: m,
                    r_over_d: g,
                    time_s,
                    distortion: pick(m, g, |c| c.distortion),
                    speedup: base / time_s,
                });
            }
        }
        out
    }

    pub fn median_distortion(&self, method: &str, r_over_d: f64) -> f64 {
        let v: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.method == method && c.r_over_d == r_over_d)
            .map(|c| c.distortion)
            .collect();
        median(&v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,r_over_d,time_s,distortion,speedup\n");
        for r in self.rows() {
            out.push_str(&format!(
                "{},{},{},{:.12e},{}\n",
                r.method,
                r.r_over_d,
                fmt_time(self.timing, r.time_s),
                r.distortion,
                fmt_time(self.timing, r.speedup)
            ));
        }
        out
    }
}

/// Distortion of the five embeddings on the noisy `d² × d` bad matrix. The
/// three Hadamard-based methods share one sketch seed per (seed, r) cell.
pub fn bench_distortion(cfg: &BenchConfig) -> Result<DistortionReport> {
    cfg.validate()?;
    let mut cells = Vec::new();
    let root = Rng::new(cfg.seed);
    for s in 0..cfg.seeds {
        let rng = root.split(s as u64);
        let a = gen_bad_matrix(cfg.d, cfg.noise, rng.split(0))?;
        for (gi, (&mult, r)) in cfg.r_grid.iter().zip(cfg.grid_rows()).enumerate() {
            let cell = rng.split(1 + gi as u64);
            let had_seed = cell.split(0).derive_seed();
            let gauss_seed = cell.split(1).derive_seed();
            for method in DISTORTION_METHODS {
                let start = Instant::now();
                let a_tilde: Matrix = match method {
                    "gaussian" => apply_sketch(&SketchSpec::gaussian(r, gauss_seed), &a)?,
                    "srht" => apply_sketch(&SketchSpec::srht(r, had_seed), &a)?,
                    "srht2" => apply_sketch(&SketchSpec::iterated_srht(r, 2, had_seed), &a)?,
                    "root" => embed_l2(&a, &SketchSpec::srht(cfg.inner_rows(r), had_seed))?.a_tilde,
                    _ => {
                        let root = embed_l2(&a, &SketchSpec::srht(cfg.inner_rows(r), had_seed))?.a_tilde;
                        apply_sketch(&SketchSpec::gaussian(r, gauss_seed), &root)?
                    }
                };
                let time_s = start.elapsed().as_secs_f64();
                cells.push(DistortionCell {
                    method,
                    r_over_d: mult,
                    seed: s,
                    time_s,
                    distortion: measure_l2_distortion(&a, &a_tilde)?,
                });
            }
        }
    }
    Ok(DistortionReport { cells, timing: cfg.timing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::InnerRows;

    fn small() -> BenchConfig {
        BenchConfig { d: 8, n: 64, seeds: 5, r_grid: vec![1.0, 2.0, 4.0], timing: false, ..BenchConfig::distortion_default() }
    }

    #[test]
    fn csv_header_and_shape() {
        let rep = bench_distortion(&small()).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("method,r_over_d,time_s,distortion,speedup"));
        assert_eq!(lines.count(), 3 * DISTORTION_METHODS.len());
        assert!(csv.contains(",NA,"));
    }

    #[test]
    fn deterministic_without_timing() {
        assert_eq!(bench_distortion(&small()).unwrap().to_csv(), bench_distortion(&small()).unwrap().to_csv());
    }

    #[test]
    fn root_beats_srht_when_inner_rows_scale_with_r() {
        let cfg = BenchConfig { inner: Some(InnerRows::TimesR(10.0)), r_grid: vec![1.0, 2.0], ..small() };
        let rep = bench_distortion(&cfg).unwrap();
        for g in [1.0, 2.0] {
            assert!(rep.median_distortion("root", g) < rep.median_distortion("srht", g));
            assert!(rep.median_distortion("root-gaussian", g) >= rep.median_distortion("root", g));
        }
    }
}
