use crate::error::{dim, param, Error, Result};
use crate::l1::basis::pseudo_inverse;
use crate::linalg::{dot, norm1, solve_least_squares, solve_square, Matrix};

const MAX_OUTER: usize = 200;
const MU_START: f64 = 1e-2;
const MU_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct L1Solution {
    pub x: Vec<f64>,
    /// `‖Ax − b‖₁`.
    pub objective: f64,
    /// False when the iteration cap was hit before the stopping test.
    pub converged: bool,
    pub iterations: usize,
    /// Set when `A` (or a reweighted copy) was rank deficient and the
    /// minimum-norm least-squares step was used.
    pub min_norm: bool,
}

pub fn l1_objective(a: &Matrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    Ok(ax.iter().zip(b).map(|(p, q)| (p - q).abs()).sum())
}

/// `min ‖Ax − b‖₁` by IRLS on `Σ √(r_i² + μ s²)` with `μ` halved from
/// 1e-2 to 1e-12 (`s` is the mean `|b_i|`), followed by a vertex polish
/// that interpolates `d` rows of smallest residual.
pub fn solve_l1_small(a: &Matrix, b: &[f64]) -> Result<L1Solution> {
    let (n, d) = a.shape();
    if b.len() != n {
        return dim(format!("rhs has {} entries, matrix has {n} rows", b.len()));
    }
    if n < d || d == 0 {
        return dim(format!("l1 solve needs rows >= cols >= 1, got {n}x{d}"));
    }
    a.ensure_finite("l1 solve input")?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite rhs".into()));
    }
    let scale = norm1(b) / n as f64;
    if scale == 0.0 {
        return Ok(L1Solution { x: vec![0.0; d], objective: 0.0, converged: true, iterations: 0, min_norm: false });
    }

    let mut min_norm = false;
    let mut x = weighted_ls(a, b, None, &mut min_norm)?;
    let mut best_obj = l1_objective(a, &x, b)?;
    let mut best = x.clone();
    let mut mu = MU_START;
    let mut converged = false;
    let mut iterations = 0;
    let mut prev_obj = best_obj;
    for _ in 0..MAX_OUTER {
        iterations += 1;
        let resid = residual(a, &x, b)?;
        let floor = mu * scale * scale;
        let w: Vec<f64> = resid.iter().map(|r| 1.0 / (r * r + floor).sqrt()).collect();
        let next = weighted_ls(a, b, Some(&w), &mut min_norm)?;
        let obj = l1_objective(a, &next, b)?;
        let step = next.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let size = next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        x = next;
        if obj < best_obj {
            best_obj = obj;
            best = x.clone();
        }
        if mu <= MU_FLOOR && ((prev_obj - obj).abs() <= 1e-12 * obj.max(scale) || step <= 1e-12 * (1.0 + size)) {
            converged = true;
            break;
        }
        prev_obj = obj;
        mu = (mu * 0.5).max(MU_FLOOR);
    }

    if !min_norm {
        if let Some(v) = vertex_polish(a, b, &best)? {
            let obj = l1_objective(a, &v, b)?;
            if obj <= best_obj {
                best_obj = obj;
                best = v;
            }
        }
    }
    if best_obj <= 1e-15 * scale * n as f64 {
        converged = true;
    }
    Ok(L1Solution { x: best, objective: best_obj, converged, iterations, min_norm })
}

fn residual(a: &Matrix, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    Ok(a.mul_vec(x)?.iter().zip(b).map(|(p, q)| p - q).collect())
}

/// `argmin Σ w_i (a_iᵀx − b_i)²`, falling back to the minimum-norm
/// solution when the weighted matrix is rank deficient.
fn weighted_ls(a: &Matrix, b: &[f64], w: Option<&[f64]>, min_norm: &mut bool) -> Result<Vec<f64>> {
    let (aw, bw) = match w {
        Some(w) => {
            let root: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
            let bw: Vec<f64> = b.iter().zip(&root).map(|(p, q)| p * q).collect();
            (a.scale_rows(&root)?, bw)
        }
        None => (a.clone(), b.to_vec()),
    };
    let rhs = Matrix::column_vector(&bw);
    match solve_least_squares(&aw, &rhs) {
        Ok(x) => Ok(x.into_data()),
        Err(Error::RankDeficient(_)) => {
            *min_norm = true;
            let p = pseudo_inverse(&aw.gram())?;
            Ok(p.matmul(&aw.t_matmul(&rhs)?)?.into_data())
        }
        Err(e) => Err(e),
    }
}

/// Starts at the vertex through the `d` smallest-residual independent rows
/// and walks edges while the objective strictly drops. Along an edge that
/// frees one interpolated row the objective is piecewise linear, so the
/// exact line minimum is a weighted median of the breakpoints.
fn vertex_polish(a: &Matrix, b: &[f64], x: &[f64]) -> Result<Option<Vec<f64>>> {
    let (n, d) = a.shape();
    let resid = residual(a, x, b)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| resid[i].abs().total_cmp(&resid[j].abs()).then(i.cmp(&j)));
    let Some(mut active) = independent_rows(a, &order) else {
        return Ok(None);
    };
    let Some(mut x) = interpolate(a, b, &active) else {
        return Ok(None);
    };
    let mut obj = l1_objective(a, &x, b)?;
    for _ in 0..MAX_VERTEX_MOVES {
        let sub = a.select_rows(&active)?;
        let r = residual(a, &x, b)?;
        let mut best: Option<(f64, usize, usize)> = None;
        for j in 0..d {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            let Some(v) = solve_square(&sub, &e) else {
                return Ok(Some(x));
            };
            let c = a.mul_vec(&v)?;
            let Some((t, enter)) = line_minimum(&r, &c) else {
                continue;
            };
            let trial: f64 = r.iter().zip(&c).map(|(ri, ci)| (ri + t * ci).abs()).sum();
            if trial < obj - 1e-14 * obj && best.is_none_or(|(o, _, _)| trial < o) {
                best = Some((trial, j, enter));
            }
        }
        let Some((_, j, enter)) = best else { break };
        let mut next = active.clone();
        next[j] = enter;
        let Some(y) = interpolate(a, b, &next) else { break };
        let y_obj = l1_objective(a, &y, b)?;
        if y_obj >= obj {
            break;
        }
        active = next;
        x = y;
        obj = y_obj;
    }
    Ok(Some(x))
}

const MAX_VERTEX_MOVES: usize = 200;

/// `argmin_t Σ |r_i + t c_i|` and the row whose residual vanishes there.
fn line_minimum(r: &[f64], c: &[f64]) -> Option<(f64, usize)> {
    let mut pts: Vec<(f64, f64, usize)> =
        r.iter().zip(c).enumerate().filter(|(_, (_, ci))| **ci != 0.0).map(|(i, (ri, ci))| (-ri / ci, ci.abs(), i)).collect();
    if pts.is_empty() {
        return None;
    }
    let half = 0.5 * pts.iter().map(|p| p.1).sum::<f64>();
    Some(weighted_median(&mut pts, half))
}

/// Smallest breakpoint whose cumulative weight reaches `target`, by
/// quickselect. Ties in `t` are broken by row id.
fn weighted_median(pts: &mut [(f64, f64, usize)], mut target: f64) -> (f64, usize) {
    let order = |p: &(f64, f64, usize), q: &(f64, f64, usize)| p.0.total_cmp(&q.0).then(p.2.cmp(&q.2));
    let mut slice = pts;
    loop {
        if slice.len() == 1 {
            return (slice[0].0, slice[0].2);
        }
        let k = slice.len() / 2;
        slice.select_nth_unstable_by(k, order);
        let left: f64 = slice[..k].iter().map(|p| p.1).sum();
        if left >= target {
            slice = &mut slice[..k];
        } else if left + slice[k].1 >= target {
            return (slice[k].0, slice[k].2);
        } else {
            target -= left + slice[k].1;
            slice = &mut slice[k + 1..];
        }
    }
}

/// First `d` rows in `order` that are linearly independent.
fn independent_rows(a: &Matrix, order: &[usize]) -> Option<Vec<usize>> {
    let d = a.cols();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut chosen = Vec::with_capacity(d);
    for &i in order {
        let row = a.row(i);
        let norm = dot(row, row).sqrt();
        if norm == 0.0 {
            continue;
        }
        let mut v: Vec<f64> = row.iter().map(|x| x / norm).collect();
        for q in &basis {
            let p = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
        }
        let left = dot(&v, &v).sqrt();
        if left > 1e-8 {
            v.iter_mut().for_each(|x| *x /= left);
            basis.push(v);
            chosen.push(i);
            if chosen.len() == d {
                return Some(chosen);
            }
        }
    }
    None
}

fn interpolate(a: &Matrix, b: &[f64], rows: &[usize]) -> Option<Vec<f64>> {
    let sub = a.select_rows(rows).ok()?;
    let rhs: Vec<f64> = rows.iter().map(|&i| b[i]).collect();
    solve_square(&sub, &rhs)
}

/// Enumerates every `d`-subset of rows, solves the interpolation system and
/// keeps the best. Limited to `n ≤ 40`, `d ≤ 3`.
pub fn l1_bruteforce_oracle(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let (n, d) = a.shape();
    if n > 40 || d > 3 || d == 0 {
        return param(format!("brute force limited to n <= 40, 1 <= d <= 3, got {n}x{d}"));
    }
    if b.len() != n || n < d {
        return dim(format!("brute force on {n}x{d} with {} rhs entries", b.len()));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let sub = a.select_rows(&idx)?;
        let rhs: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
        if let Some(x) = solve_square(&sub, &rhs) {
            let obj = l1_objective(a, &x, b)?;
            if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                best = Some((obj, x));
            }
        }
        // next combination in lexicographic order
        let mut k = d;
        while k > 0 && idx[k - 1] == n - d + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for j in k..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
    best.map(|(_, x)| x)
        .ok_or_else(|| Error::RankDeficient("no nonsingular d-subset of rows".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::{sample_gaussian, Rng};

    #[test]
    fn location_estimator_is_the_median() {
        let a = Matrix::from_vec(5, 1, vec![1.0; 5]).unwrap();
        let b = [3.0, -1.0, 10.0, 2.0, 7.0];
        let s = solve_l1_small(&a, &b).unwrap();
        assert!((s.x[0] - 3.0).abs() < 1e-6);
        let a = Matrix::from_vec(3, 1, vec![1.0; 3]).unwrap();
        assert_eq!(l1_bruteforce_oracle(&a, &[0.0, 1.0, 10.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn consistent_system_is_solved_exactly() {
        let a = Matrix::from_vec(30, 3, sample_gaussian(Rng::new(1), 90, 1.0)).unwrap();
        let x0 = [1.5, -2.0, 0.25];
        let b = a.mul_vec(&x0).unwrap();
        let s = solve_l1_small(&a, &b).unwrap();
        assert!(s.objective <= 1e-10, "objective {}", s.objective);
        for (p, q) in s.x.iter().zip(&x0) {
            assert!((p - q).abs() < 1e-10);
        }
        assert!(s.converged && !s.min_norm);
    }

    #[test]
    fn square_system_interpolates() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let b = [3.0, 0.0];
        let x = l1_bruteforce_oracle(&a, &b).unwrap();
        assert!(l1_objective(&a, &x, &b).unwrap() < 1e-14);
    }

    #[test]
    fn matches_bruteforce_oracle() {
        for seed in 0..50u64 {
            let rng = Rng::new(seed);
            let n = 10 + (seed as usize * 7) % 31;
            let d = 1 + (seed as usize) % 3;
            let a = Matrix::from_vec(n, d, sample_gaussian(rng.split(0), n * d, 1.0)).unwrap();
            let mut b = sample_gaussian(rng.split(1), n, 1.0);
            // a few gross outliers
            b[0] += 25.0;
            b[n / 2] -= 40.0;
            let s = solve_l1_small(&a, &b).unwrap();
            let opt = l1_objective(&a, &l1_bruteforce_oracle(&a, &b).unwrap(), &b).unwrap();
            assert!(s.objective >= opt - 1e-9, "seed {seed}: below the oracle");
            assert!((s.objective - opt) <= 1e-6 * opt, "seed {seed}: {} vs {opt}", s.objective);
        }
    }

    #[test]
    fn rank_deficient_uses_min_norm() {
        let a = Matrix::from_fn(6, 2, |i, _| i as f64 + 1.0);
        let b = [1.0, 2.0, 3.0, 4.0, 5.0, 7.0];
        let s = solve_l1_small(&a, &b).unwrap();
        assert!(s.min_norm);
        assert!((s.x[0] - s.x[1]).abs() < 1e-8);
    }

    #[test]
    fn weighted_median_matches_sorting() {
        let rng = Rng::new(9);
        for k in 0..200u64 {
            let n = 1 + (k as usize % 17);
            let t = sample_gaussian(rng.split(k), n, 1.0);
            let w: Vec<f64> = sample_gaussian(rng.split(k + 1000), n, 1.0).iter().map(|v| v.abs() + 0.01).collect();
            let mut pts: Vec<(f64, f64, usize)> = (0..n).map(|i| (t[i], w[i], i)).collect();
            let half = 0.5 * w.iter().sum::<f64>();
            let mut sorted = pts.clone();
            sorted.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut acc = 0.0;
            let want = sorted.iter().find(|p| {
                acc += p.1;
                acc >= half
            });
            let want = want.map(|p| (p.0, p.2)).unwrap_or((sorted[n - 1].0, sorted[n - 1].2));
            assert_eq!(weighted_median(&mut pts, half), want);
        }
    }

    #[test]
    fn oracle_budget() {
        let a = Matrix::zeros(41, 1);
        assert!(matches!(l1_bruteforce_oracle(&a, &[0.0; 41]), Err(Error::Param(_))));
        let a = Matrix::zeros(10, 4);
        assert!(matches!(l1_bruteforce_oracle(&a, &[0.0; 10]), Err(Error::Param(_))));
    }
}
