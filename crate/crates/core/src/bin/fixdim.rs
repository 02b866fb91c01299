use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fixdim::bench::{
    bench_distortion, bench_regress_l1, gen_bad_matrix, gen_l1_experiment, read_matrix, to_csv, write_matrix,
    BenchConfig, InnerRows,
};
use fixdim::l1::{embed_l1_with, lewis_weights, regress_l1_detailed, L1EmbedOptions, L1RegressParams, LeverageMode, Pipeline, Variant};
use fixdim::l2::{
    approx_leverage, approx_pca, default_jl_cols, embed_l2, exact_leverage, lewis_jl_cols, sketch_regress_l2,
    NonNegative, Ridge, Unconstrained,
};
use fixdim::{Error, Matrix, Result, Rng, SketchSpec};

#[derive(Parser)]
#[command(name = "fixdim", version, about = "Fixed-dimension subspace embeddings and sketched regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Input matrix (.csv or .mtb).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; CSV on stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Target distortion.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Failure-probability parameter (success probability 1 − 1/t).
    #[arg(long, global = true, default_value_t = 10.0)]
    t: f64,
    /// `logr` or `logpow:q`.
    #[arg(long, global = true, default_value = "logr", value_parser = parse_variant)]
    variant: Variant,
    /// Print NA in timing columns so output is reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SketchArg {
    Srht,
    Srht2,
    Gaussian,
    CountSketch,
}

#[derive(Args)]
struct SketchOpts {
    #[arg(long, value_enum, default_value = "srht")]
    sketch: SketchArg,
    /// Sketch rows; defaults to the dimension guaranteeing an `eps`-JLT.
    #[arg(long)]
    rows: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Bad,
    L1,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    WcL2,
    Mg,
    Ww,
    Lewis,
    Unif,
}

#[derive(Subcommand)]
enum Command {
    /// d × d embedding (AᵀΠΠᵀA)^{1/2}.
    EmbedL2 {
        #[command(flatten)]
        sketch: SketchOpts,
    },
    /// (d + r) × d oblivious ℓ1 embedding.
    EmbedL1 {
        /// Buckets of the spreading operator; defaults to the variant's count.
        #[arg(long)]
        buckets: Option<usize>,
        #[command(flatten)]
        sketch: SketchOpts,
    },
    /// Approximate (or exact) ℓ2 leverage scores, one per line.
    Leverage {
        #[arg(long)]
        exact: bool,
        /// Gaussian compression width; 0 computes row norms of AÃ⁻¹ exactly.
        #[arg(long)]
        jl_cols: Option<usize>,
        #[command(flatten)]
        sketch: SketchOpts,
    },
    /// ℓ1 Lewis weights, one per line.
    Lewis {
        #[arg(long)]
        iters: Option<usize>,
        /// Use sketched leverage scores inside the iteration.
        #[arg(long)]
        sketched: bool,
    },
    /// Sketch-and-solve least squares; writes x.
    RegressL2 {
        #[arg(long)]
        rhs: PathBuf,
        /// `ls`, `ridge:λ` or `nnls`.
        #[arg(long, default_value = "ls")]
        solver: String,
        #[command(flatten)]
        sketch: SketchOpts,
    },
    /// Coreset ℓ1 regression; writes x.
    RegressL1 {
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, value_enum, default_value = "mg")]
        pipeline: PipelineArg,
        /// Coreset size; defaults to the guaranteed size (required for `unif`).
        #[arg(long)]
        rows: Option<usize>,
        /// Buckets of the spreading operator.
        #[arg(long)]
        buckets: Option<usize>,
    },
    /// Top-k principal subspace from the d × d embedding; writes V_k.
    Pca {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        sketch: SketchOpts,
    },
    /// Distortion of linear and nonlinear ℓ2 embeddings on the bad matrix.
    BenchDistortion {
        #[arg(long, default_value_t = 16)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// Comma-separated multiples of d.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10,12,14,16")]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        /// Inner Hadamard rows r₁ (default 10·d).
        #[arg(long, conflicts_with = "r1_mult")]
        r1: Option<usize>,
        /// Inner Hadamard rows as a multiple of r.
        #[arg(long)]
        r1_mult: Option<f64>,
    },
    /// Relative ℓ1 error of coreset regressions on the spiked instance.
    BenchRegressL1 {
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,5,10,20,30")]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 20.0)]
        alpha: f64,
        /// Noise level of the generator; defaults to 1/√n.
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Writes a generated instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 20.0)]
        alpha: f64,
        /// Where to write b for `--kind l1`.
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    if s == "logr" {
        return Ok(Variant::LogR);
    }
    match s.strip_prefix("logpow:").map(str::parse::<f64>) {
        Some(Ok(q)) => Ok(Variant::LogPowerR(q)),
        _ => Err(format!("expected `logr` or `logpow:q`, got `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn input(c: &Common) -> Result<Matrix> {
    match &c.input {
        Some(p) => read_matrix(p),
        None => Err(Error::Param("--input is required".into())),
    }
}

fn emit_matrix(c: &Common, m: &Matrix) -> Result<()> {
    match &c.output {
        Some(p) => write_matrix(p, m),
        None => emit_text(None, &to_csv(m)),
    }
}

fn emit_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn rhs_vector(path: &Path) -> Result<Vec<f64>> {
    let b = read_matrix(path)?;
    if b.cols() != 1 {
        return Err(Error::Dimension(format!("rhs must be a single column, got {} columns", b.cols())));
    }
    Ok(b.into_data())
}

fn sketch_spec(c: &Common, s: &SketchOpts, n: usize, d: usize) -> Result<SketchSpec> {
    let eps = c.eps.unwrap_or(0.5);
    let rows = match s.rows {
        Some(r) => r,
        None => SketchSpec::default_for(n, d, eps, c.t, c.seed)?.rows,
    };
    Ok(match s.sketch {
        SketchArg::Srht => SketchSpec::srht(rows, c.seed),
        SketchArg::Srht2 => SketchSpec::iterated_srht(rows, 2, c.seed),
        SketchArg::Gaussian => SketchSpec::gaussian(rows, c.seed),
        SketchArg::CountSketch => SketchSpec::count_sketch(rows, c.seed),
    })
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    match &cli.command {
        Command::EmbedL2 { sketch } => {
            let a = input(c)?;
            let spec = sketch_spec(c, sketch, a.rows(), a.cols())?;
            emit_matrix(c, &embed_l2(&a, &spec)?.a_tilde)
        }
        Command::EmbedL1 { buckets, sketch } => {
            let a = input(c)?;
            let spec = sketch_spec(c, sketch, a.rows(), a.cols())?;
            let opts = L1EmbedOptions { rows: *buckets, ..Default::default() };
            let emb = if buckets.is_some() {
                embed_l1_with(&a, c.t, c.variant, &spec, Rng::new(c.seed), opts)?
            } else {
                fixdim::l1::embed_l1(&a, c.t, c.variant, &spec, Rng::new(c.seed))?
            };
            emit_matrix(c, &emb.stacked)
        }
        Command::Leverage { exact, jl_cols, sketch } => {
            let a = input(c)?;
            let tau = if *exact {
                exact_leverage(&a)?
            } else {
                let eps = c.eps.unwrap_or(0.25);
                let spec = sketch_spec(c, sketch, a.rows(), a.cols())?;
                let cols = jl_cols.unwrap_or_else(|| default_jl_cols(a.rows(), eps));
                approx_leverage(&a, eps, &spec, cols)?.tau
            };
            emit_matrix(c, &Matrix::column_vector(&tau))
        }
        Command::Lewis { iters, sketched } => {
            let a = input(c)?;
            let t = iters.unwrap_or_else(|| fixdim::l1::default_lewis_iters(a.rows()));
            let mode = if *sketched {
                let spec = SketchSpec::default_for(a.rows(), a.cols(), 0.25, c.t, c.seed)?;
                LeverageMode::SketchedLeverage { spec, jl_cols: lewis_jl_cols(a.rows()) }
            } else {
                LeverageMode::ExactLeverage
            };
            let state = lewis_weights(&a, t, mode, Rng::new(c.seed))?;
            if state.floored > 0 {
                eprintln!("{} weights clamped at the floor", state.floored);
            }
            emit_matrix(c, &Matrix::column_vector(&state.w))
        }
        Command::RegressL2 { rhs, solver, sketch } => {
            let a = input(c)?;
            let b = read_matrix(rhs)?;
            let spec = sketch_spec(c, sketch, a.rows(), a.cols() + b.cols())?;
            let res = match solver.as_str() {
                "ls" => sketch_regress_l2(&a, &b, &spec, &Unconstrained)?,
                "nnls" => sketch_regress_l2(&a, &b, &spec, &NonNegative::default())?,
                s => match s.strip_prefix("ridge:").map(str::parse::<f64>) {
                    Some(Ok(lambda)) => sketch_regress_l2(&a, &b, &spec, &Ridge { lambda })?,
                    _ => return Err(Error::Param(format!("unknown solver `{s}`"))),
                },
            };
            eprintln!("sketched cost {:e}, full cost {:e}", res.sketched_cost, res.full_cost.unwrap_or(f64::NAN));
            emit_matrix(c, &res.x)
        }
        Command::RegressL1 { rhs, pipeline, rows, buckets } => {
            let a = input(c)?;
            let b = rhs_vector(rhs)?;
            let pipeline = match pipeline {
                PipelineArg::WcL2 => Pipeline::WCBasisL2,
                PipelineArg::Mg => Pipeline::WCBasisL1,
                PipelineArg::Ww => Pipeline::CountSketchBasis,
                PipelineArg::Lewis => Pipeline::Lewis,
                PipelineArg::Unif => Pipeline::Uniform,
            };
            let params =
                L1RegressParams { sample_rows: *rows, embed_rows: *buckets, t: c.t, variant: c.variant, ..Default::default() };
            let (res, info) = regress_l1_detailed(&a, &b, pipeline, c.eps.unwrap_or(0.5), &params, Rng::new(c.seed))?;
            eprintln!(
                "coreset {} rows, reduced cost {:e}, full cost {:e}{}",
                info.coreset_rows,
                res.sketched_cost,
                res.full_cost.unwrap_or(f64::NAN),
                if info.min_norm { ", rank-deficient coreset" } else { "" }
            );
            emit_matrix(c, &res.x)
        }
        Command::Pca { k, sketch } => {
            let a = input(c)?;
            let spec = sketch_spec(c, sketch, a.rows(), a.cols())?;
            emit_matrix(c, &approx_pca(&a, *k, &spec)?.0)
        }
        Command::BenchDistortion { d, seeds, grid, noise, r1, r1_mult } => {
            let inner = match (r1, r1_mult) {
                (Some(r), _) => Some(InnerRows::Fixed(*r)),
                (None, Some(k)) => Some(InnerRows::TimesR(*k)),
                (None, None) => None,
            };
            let cfg = BenchConfig {
                d: *d,
                n: d * d,
                seeds: *seeds,
                r_grid: grid.clone(),
                noise: *noise,
                inner,
                seed: c.seed,
                t: c.t,
                eps: c.eps.unwrap_or(0.5),
                variant: c.variant,
                timing: !c.no_timing,
                ..BenchConfig::distortion_default()
            };
            emit_text(c.output.as_deref(), &bench_distortion(&cfg)?.to_csv())
        }
        Command::BenchRegressL1 { d, n, seeds, grid, alpha, noise } => {
            let cfg = BenchConfig {
                d: *d,
                n: *n,
                seeds: *seeds,
                r_grid: grid.clone(),
                noise: noise.unwrap_or(1.0 / (*n as f64).sqrt()),
                alpha: *alpha,
                seed: c.seed,
                t: c.t,
                eps: c.eps.unwrap_or(0.5),
                variant: c.variant,
                timing: !c.no_timing,
                ..BenchConfig::regress_default()
            };
            emit_text(c.output.as_deref(), &bench_regress_l1(&cfg)?.to_csv())
        }
        Command::Gen { kind, d, n, noise, alpha, rhs } => match kind {
            GenKind::Bad => emit_matrix(c, &gen_bad_matrix(*d, *noise, Rng::new(c.seed))?),
            GenKind::L1 => {
                let n = n.unwrap_or(d * d * d);
                let eps = c.eps.unwrap_or(1.0 / (n as f64).sqrt());
                let (a, b) = gen_l1_experiment(*d, n, *alpha, eps, Rng::new(c.seed))?;
                if let Some(p) = rhs {
                    write_matrix(p, &Matrix::column_vector(&b))?;
                }
                emit_matrix(c, &a)
            }
        },
    }
}
