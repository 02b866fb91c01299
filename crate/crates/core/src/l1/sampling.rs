use rand::Rng as _;

use super::basis::BasisChange;
use crate::error::{dim, param, Error, Result};
use crate::linalg::Matrix;
use crate::sketch::{cauchy, open_unit, Rng};

/// Per-row scores together with the probabilities derived from them.
#[derive(Clone, Debug)]
pub struct WeightVector {
    /// Sampling probabilities `p_i`.
    pub probs: Vec<f64>,
    /// Unnormalized scores, e.g. `λ_i`.
    pub scores: Vec<f64>,
    /// `Σ scores`.
    pub total: f64,
    /// Target expected sample size `s`.
    pub s: f64,
}

impl WeightVector {
    /// Probabilities `min(s · score_i / Σ score, 1)`.
    pub fn from_scores(scores: Vec<f64>, s: f64) -> Result<Self> {
        if scores.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Numeric("scores must be finite and nonnegative".into()));
        }
        let total: f64 = scores.iter().sum();
        if total <= 0.0 {
            return Err(Error::Numeric("all scores are zero".into()));
        }
        let probs = scores.iter().map(|v| (s * v / total).min(1.0)).collect();
        Ok(WeightVector { probs, scores, total, s })
    }

    pub fn expected_size(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Expected coreset size for a `(1 ± ε)` sandwich with probability `1 − δ`,
/// `28 ε⁻² d α (ln(18/ε) + d⁻¹ ln(3/δ))`.
pub fn l1_sample_size(d: usize, alpha: f64, eps: f64, delta: f64) -> f64 {
    let d = d as f64;
    28.0 / (eps * eps) * d * alpha * ((18.0 / eps).ln() + (3.0 / delta).ln() / d)
}

/// Number of Cauchy columns `⌈15 ln(6n/δ)⌉` for the median estimator.
pub fn cauchy_columns(n: usize, delta: f64) -> usize {
    (15.0 * (6.0 * n as f64 / delta).ln()).ceil() as usize
}

/// `λ_i = median |(A R⁻¹ C)_(i)|` and `p_i = min(s λ_i / Σλ, 1)`.
pub fn l1_sampling_probs(
    a: &Matrix,
    basis: &BasisChange,
    s: f64,
    delta: f64,
    rng: Rng,
) -> Result<WeightVector> {
    if !(s > 0.0) {
        return param(format!("target size s = {s} must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta = {delta} outside (0, 1)"));
    }
    let (n, d) = a.shape();
    if basis.r_inv.rows() != d {
        return dim(format!("basis is for {} columns, input has {d}", basis.r_inv.rows()));
    }
    let k = cauchy_columns(n, delta);
    let mut g = rng.generator();
    let c = Matrix::from_fn(d, k, |_, _| cauchy(&mut g));
    // right to left: R⁻¹C is d×k, so the n-row product costs O(ndk)
    let m = a.matmul(&basis.r_inv.matmul(&c)?)?;
    let lambda: Vec<f64> = (0..n).map(|i| median_abs(m.row(i))).collect();
    WeightVector::from_scores(lambda, s)
}

fn median_abs(v: &[f64]) -> f64 {
    let mut w: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    w.sort_by(f64::total_cmp);
    let k = w.len();
    if k % 2 == 1 {
        w[k / 2]
    } else {
        0.5 * (w[k / 2 - 1] + w[k / 2])
    }
}

/// Rescaled sampled rows.
#[derive(Clone, Debug)]
pub struct CoresetSample {
    /// Row `k` is `weights[k] · A_(indices[k])`.
    pub rows: Matrix,
    pub indices: Vec<usize>,
    /// Selection probability of each sampled row.
    pub probs: Vec<f64>,
    /// Rescaling factor of each sampled row.
    pub weights: Vec<f64>,
    pub target_s: f64,
    /// Redraws forced by the size cap.
    pub redraws: usize,
}

impl CoresetSample {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Applies the same selection and rescaling to another matrix with the
    /// same rows, e.g. a right-hand side.
    pub fn apply(&self, other: &Matrix) -> Result<Matrix> {
        let sel = other.select_rows(&self.indices)?;
        sel.scale_rows(&self.weights)
    }
}

const MAX_REDRAWS: usize = 1000;

/// Independent Bernoulli(`p_i`) row selection; kept rows are scaled by
/// `1/p_i`. Draws with more than `2s` rows are redrawn on a fresh stream.
pub fn l1_coreset(a: &Matrix, probs: &WeightVector, rng: Rng) -> Result<CoresetSample> {
    let n = a.rows();
    if probs.probs.len() != n {
        return dim(format!("{} probabilities for {n} rows", probs.probs.len()));
    }
    if probs.probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return param("probabilities must lie in [0, 1]");
    }
    let cap = 2.0 * probs.s;
    for attempt in 0..MAX_REDRAWS {
        let stream = rng.split(attempt as u64);
        let picked: Vec<usize> = (0..n)
            .filter(|&i| {
                let p = probs.probs[i];
                p >= 1.0 || (p > 0.0 && open_unit(&mut stream.split(i as u64).generator()) < p)
            })
            .collect();
        if picked.len() as f64 > cap {
            continue;
        }
        let sel_probs: Vec<f64> = picked.iter().map(|&i| probs.probs[i]).collect();
        let weights: Vec<f64> = sel_probs.iter().map(|p| 1.0 / p).collect();
        let rows = a.select_rows(&picked)?.scale_rows(&weights)?;
        return Ok(CoresetSample {
            rows,
            indices: picked,
            probs: sel_probs,
            weights,
            target_s: probs.s,
            redraws: attempt,
        });
    }
    Err(Error::Numeric(format!("no draw within 2s = {cap} rows after {MAX_REDRAWS} attempts")))
}

/// `m` rows drawn uniformly without replacement, scaled by `n/m`.
pub fn uniform_coreset(a: &Matrix, m: usize, rng: Rng) -> Result<CoresetSample> {
    let n = a.rows();
    if m == 0 {
        return param("uniform coreset needs at least one row");
    }
    let m = m.min(n);
    let mut picked = crate::sketch::sample_without_replacement(n, m, rng);
    picked.sort_unstable();
    let p = m as f64 / n as f64;
    let weights = vec![1.0 / p; m];
    Ok(CoresetSample {
        rows: a.select_rows(&picked)?.scale_rows(&weights)?,
        indices: picked,
        probs: vec![p; m],
        weights,
        target_s: m as f64,
        redraws: 0,
    })
}

/// `i.i.d.` draws with replacement from `p`; each drawn row is scaled by
/// `1/(m p_i)`.
pub(crate) fn with_replacement(a: &Matrix, p: &[f64], m: usize, rng: Rng) -> Result<CoresetSample> {
    let dist = rand::distr::weighted::WeightedIndex::new(p)
        .map_err(|e| Error::Numeric(format!("invalid sampling distribution: {e}")))?;
    let mut g = rng.generator();
    let indices: Vec<usize> = (0..m).map(|_| g.sample(&dist)).collect();
    let probs: Vec<f64> = indices.iter().map(|&i| p[i]).collect();
    let weights: Vec<f64> = probs.iter().map(|q| 1.0 / (m as f64 * q)).collect();
    Ok(CoresetSample {
        rows: a.select_rows(&indices)?.scale_rows(&weights)?,
        indices,
        probs,
        weights,
        target_s: m as f64,
        redraws: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l1::basis_from_l2;
    use crate::linalg::norm1;
    use crate::sketch::{sample_gaussian, SketchSpec};

    fn random_matrix(n: usize, d: usize, seed: u64) -> Matrix {
        Matrix::from_vec(n, d, sample_gaussian(Rng::new(seed), n * d, 1.0)).unwrap()
    }

    #[test]
    fn single_row() {
        let a = Matrix::from_rows(&[vec![2.0, -1.0]]).unwrap();
        let basis = BasisChange {
            r: Matrix::identity(2),
            r_inv: Matrix::identity(2),
            alpha_bound: crate::l1::AlphaBound::Value(1.0),
        };
        for s in [0.3, 1.0, 5.0] {
            let w = l1_sampling_probs(&a, &basis, s, 0.1, Rng::new(1)).unwrap();
            assert_eq!(w.probs, vec![f64::min(s, 1.0)]);
        }
    }

    #[test]
    fn duplicate_rows_share_lambda() {
        let mut a = random_matrix(30, 3, 2);
        for j in 0..3 {
            a[(7, j)] = a[(19, j)];
        }
        let basis = basis_from_l2(&a, &SketchSpec::identity()).unwrap();
        let w = l1_sampling_probs(&a, &basis, 10.0, 0.1, Rng::new(3)).unwrap();
        assert_eq!(w.scores[7], w.scores[19]);
    }

    #[test]
    fn lambda_tracks_row_l1_norms() {
        let (n, d) = (2000, 6);
        let a = random_matrix(n, d, 4);
        let mut ok_rows = 0;
        let mut total_rows = 0;
        for seed in 0..5 {
            let basis = basis_from_l2(&a, &SketchSpec::srht(512, seed)).unwrap();
            let u = basis.materialize(&a).unwrap();
            let u_norm = norm1(u.data());
            let w = l1_sampling_probs(&a, &basis, 100.0, 0.1, Rng::new(50 + seed)).unwrap();
            for i in 0..n {
                total_rows += 1;
                if w.scores[i] / w.total >= norm1(u.row(i)) / u_norm / 3.0 {
                    ok_rows += 1;
                }
            }
        }
        assert!(ok_rows as f64 >= 0.99 * total_rows as f64, "{ok_rows}/{total_rows}");
    }

    #[test]
    fn all_ones_probabilities_keep_everything() {
        let a = random_matrix(20, 3, 5);
        let w = WeightVector { probs: vec![1.0; 20], scores: vec![1.0; 20], total: 20.0, s: 20.0 };
        let c = l1_coreset(&a, &w, Rng::new(6)).unwrap();
        assert_eq!(c.rows, a);
        assert_eq!(c.indices, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn coreset_is_unbiased() {
        let a = random_matrix(200, 3, 7);
        let x = [0.3, -1.0, 0.5];
        let target = norm1(&a.mul_vec(&x).unwrap());
        let scores: Vec<f64> = (0..200).map(|i| norm1(a.row(i))).collect();
        let w = WeightVector::from_scores(scores, 30.0).unwrap();
        let vals: Vec<f64> = (0..2000)
            .map(|s| norm1(&l1_coreset(&a, &w, Rng::new(1000 + s)).unwrap().rows.mul_vec(&x).unwrap()))
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
        let se = (var / vals.len() as f64).sqrt();
        assert!((mean - target).abs() <= 3.0 * se, "{mean} vs {target} (se {se})");
    }

    #[test]
    fn size_cap_is_enforced() {
        let a = random_matrix(100, 2, 8);
        let w = WeightVector::from_scores(vec![1.0; 100], 2.0).unwrap();
        for s in 0..200 {
            let c = l1_coreset(&a, &w, Rng::new(s)).unwrap();
            assert!(c.len() as f64 <= 4.0);
            assert!(c.weights.iter().zip(&c.probs).all(|(w, p)| *w == 1.0 / p));
        }
    }

    #[test]
    fn uniform_and_replacement_samplers() {
        let a = random_matrix(50, 2, 9);
        let u = uniform_coreset(&a, 10, Rng::new(1)).unwrap();
        assert_eq!(u.len(), 10);
        assert!(u.indices.windows(2).all(|w| w[0] < w[1]));
        let r = with_replacement(&a, &vec![1.0 / 50.0; 50], 25, Rng::new(2)).unwrap();
        assert_eq!(r.len(), 25);
        assert!(r.weights.iter().all(|w| (w - 2.0).abs() < 1e-12));
    }

    #[test]
    fn sample_size_formula() {
        let s = l1_sample_size(6, 1.0, 0.5, 0.1);
        let want = 28.0 * 4.0 * 6.0 * (36f64.ln() + 30f64.ln() / 6.0);
        assert!((s - want).abs() < 1e-9);
        assert_eq!(cauchy_columns(2000, 0.1), (15.0 * 120_000f64.ln()).ceil() as usize);
    }
}
