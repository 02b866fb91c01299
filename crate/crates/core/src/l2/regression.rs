use super::embed_l2_any_rank;
use crate::error::{dim, param, Error, Result};
use crate::linalg::{solve_least_squares, spectral_norm, Matrix};
use crate::sketch::SketchSpec;

/// Solver for the small sketched problem `min ‖Ãx − B̃‖²_F + Φ(x)`.
pub trait L2Solver {
    fn solve(&self, a: &Matrix, b: &Matrix) -> Result<Matrix>;

    /// `Φ(x)`.
    fn penalty(&self, _x: &Matrix) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Unconstrained;

impl L2Solver for Unconstrained {
    fn solve(&self, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        solve_least_squares(a, b)
    }
}

/// Ridge penalty `λ‖x‖²_F`.
#[derive(Clone, Copy, Debug)]
pub struct Ridge {
    pub lambda: f64,
}

impl L2Solver for Ridge {
    fn solve(&self, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        if !(self.lambda >= 0.0) {
            return param(format!("ridge parameter {} must be nonnegative", self.lambda));
        }
        let d = a.cols();
        let aug_a = a.vstack(&Matrix::identity(d).scale(self.lambda.sqrt()))?;
        let aug_b = b.vstack(&Matrix::zeros(d, b.cols()))?;
        solve_least_squares(&aug_a, &aug_b)
    }

    fn penalty(&self, x: &Matrix) -> f64 {
        self.lambda * x.frobenius_norm().powi(2)
    }
}

/// `x ≥ 0` entrywise, by projected gradient.
#[derive(Clone, Copy, Debug)]
pub struct NonNegative {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for NonNegative {
    fn default() -> Self {
        NonNegative { max_iters: 500, tol: 1e-10 }
    }
}

impl L2Solver for NonNegative {
    fn solve(&self, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        let lip = spectral_norm(a)?.powi(2);
        if lip == 0.0 {
            return Ok(Matrix::zeros(a.cols(), b.cols()));
        }
        let step = 1.0 / lip;
        let ata = a.gram();
        let atb = a.t_matmul(b)?;
        let mut x = match solve_least_squares(a, b) {
            Ok(x) => project(x),
            Err(_) => Matrix::zeros(a.cols(), b.cols()),
        };
        for _ in 0..self.max_iters {
            let grad = ata.matmul(&x)?.sub(&atb)?;
            let next = project(x.sub(&grad.scale(step))?);
            let moved = next.sub(&x)?.max_abs();
            x = next;
            if moved <= self.tol * (1.0 + x.max_abs()) {
                break;
            }
        }
        Ok(x)
    }
}

fn project(mut x: Matrix) -> Matrix {
    x.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
    x
}

#[derive(Clone, Debug)]
pub struct RegressionResult {
    /// `d × p` solution.
    pub x: Matrix,
    /// Objective of `x` on the reduced problem.
    pub sketched_cost: f64,
    /// Objective of `x` on the full problem, if computed.
    pub full_cost: Option<f64>,
}

/// `‖Ax − B‖²_F`.
pub fn l2_cost(a: &Matrix, x: &Matrix, b: &Matrix) -> Result<f64> {
    Ok(a.matmul(x)?.sub(b)?.frobenius_norm().powi(2))
}

/// Sketch-and-solve: embeds `X = [A, −B]`, splits `X̃ = [Ã, −B̃]` and hands
/// the `(d+p) × d` problem to `solver`. The full cost is filled in.
pub fn sketch_regress_l2(
    a: &Matrix,
    b: &Matrix,
    spec: &SketchSpec,
    solver: &dyn L2Solver,
) -> Result<RegressionResult> {
    let (n, d) = a.shape();
    if b.rows() != n {
        return dim(format!("rhs has {} rows, matrix has {n}", b.rows()));
    }
    if b.cols() == 0 {
        return dim("rhs has no columns");
    }
    let x = a.hstack(&b.scale(-1.0))?;
    let emb = embed_l2_any_rank(&x, spec)?;
    let a_small = emb.a_tilde.column_block(0, d)?;
    let b_small = emb.a_tilde.column_block(d, d + b.cols())?.scale(-1.0);
    let sol = solver.solve(&a_small, &b_small)?;
    if sol.shape() != (d, b.cols()) {
        return Err(Error::Solver(format!(
            "solver returned {}x{}, expected {d}x{}",
            sol.rows(),
            sol.cols(),
            b.cols()
        )));
    }
    sol.ensure_finite("solver output")
        .map_err(|_| Error::Solver("solver returned non-finite values".into()))?;
    let penalty = solver.penalty(&sol);
    Ok(RegressionResult {
        sketched_cost: l2_cost(&a_small, &sol, &b_small)? + penalty,
        full_cost: Some(l2_cost(a, &sol, b)? + penalty),
        x: sol,
    })
}
