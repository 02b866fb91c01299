use std::time::Instant;

use super::{fmt_time, gen_l1_experiment, median, BenchConfig};
use crate::error::{Error, Result};
use crate::l1::{regress_l1, solve_l1_small, L1RegressParams, Pipeline};
use crate::sketch::Rng;

pub const REGRESS_METHODS: [(&str, Pipeline); 4] = [
    ("Unif", Pipeline::Uniform),
    ("Lewis", Pipeline::Lewis),
    ("WW", Pipeline::CountSketchBasis),
    ("MG", Pipeline::WCBasisL1),
];

#[derive(Clone, Debug)]
pub struct RegressCell {
    pub method: &'static str,
    pub r_over_d: f64,
    pub seed: usize,
    /// `‖Ax̃ − b‖₁ / ‖Ax* − b‖₁`; infinite when the coreset was too small
    /// to pose the reduced problem.
    pub rel_error: f64,
    pub time_frac: f64,
}

#[derive(Clone, Debug)]
pub struct RegressRow {
    pub method: &'static str,
    pub r_over_d: f64,
    pub rel_error: f64,
    pub time_frac: f64,
}

#[derive(Clone, Debug)]
pub struct RegressReport {
    pub cells: Vec<RegressCell>,
    pub timing: bool,
}

impl RegressReport {
    pub fn median_rel_error(&self, method: &str, r_over_d: f64) -> f64 {
        let v: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.method == method && c.r_over_d == r_over_d)
            .map(|c| c.rel_error)
            .collect();
        median(&v)
    }

    pub fn rows(&self) -> Vec<RegressRow> {
        let mut grid: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !grid.contains(&c.r_over_d) {
                grid.push(c.r_over_d);
            }
        }
        let mut out = Vec::new();
        for &g in &grid {
            for (m, _) in REGRESS_METHODS {
                let t: Vec<f64> =
                    self.cells.iter().filter(|c| c.method == m && c.r_over_d == g).map(|c| c.time_frac).collect();
                out.push(RegressRow { method: m, r_over_d: g, rel_error: self.median_rel_error(m, g), time_frac: median(&t) });
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,r_over_d,rel_error,time_frac\n");
        for r in self.rows() {
            out.push_str(&format!(
                "{},{},{:.12e},{}\n",
                r.method,
                r.r_over_d,
                r.rel_error,
                fmt_time(self.timing, r.time_frac)
            ));
        }
        out
    }
}

/// Each method reduces `[A, −b]` to `r` sampled constraints; `WW` and `MG`
/// also embed into `r` buckets before building their basis.
pub fn bench_regress_l1(cfg: &BenchConfig) -> Result<RegressReport> {
    cfg.validate()?;
    let root = Rng::new(cfg.seed);
    let mut cells = Vec::new();
    for s in 0..cfg.seeds {
        let rng = root.split(s as u64);
        let (a, b) = gen_l1_experiment(cfg.d, cfg.n, cfg.alpha, cfg.noise, rng.split(0))?;
        let start = Instant::now();
        let opt = solve_l1_small(&a, &b)?.objective;
        let full_time = start.elapsed().as_secs_f64();
        for (gi, (&mult, r)) in cfg.r_grid.iter().zip(cfg.grid_rows()).enumerate() {
            for (mi, (name, pipeline)) in REGRESS_METHODS.into_iter().enumerate() {
                let params = L1RegressParams {
                    sample_rows: Some(r),
                    embed_rows: Some(r),
                    t: cfg.t,
                    variant: cfg.variant,
                    ..Default::default()
                };
                let start = Instant::now();
                let res = regress_l1(&a, &b, pipeline, cfg.eps, &params, rng.split(1 + gi as u64).split(mi as u64));
                let time_frac = start.elapsed().as_secs_f64() / full_time;
                let rel_error = match res {
                    Ok(r) => r.full_cost.unwrap_or(f64::NAN) / opt,
                    Err(Error::RankDeficient(_)) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                cells.push(RegressCell { method: name, r_over_d: mult, seed: s, rel_error, time_frac });
            }
        }
    }
    Ok(RegressReport { cells, timing: cfg.timing })
}
