//! Orlicz-norm, Rademacher and Gaussian-width estimators, Gaussian order
//! statistics and the measure sanity checks.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Estimate, MeasureSpec};
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{dot, norm2, PointSet};

/// Fewest samples accepted by [`psi2_estimate`].
pub const MIN_PSI2_SAMPLES: usize = 100;
/// Fewest Monte Carlo trials accepted by the Gaussian experiments.
pub const MIN_TRIALS: usize = 100;
/// Largest dimension for exact sign enumeration.
pub const EXACT_SIGN_LIMIT: usize = 20;

/// Gray-code steps per block of the exact enumeration.
const INNER_BITS: u32 = 12;

/// `sup_{p ∈ {2, 4, …, 16}} ‖x‖_p / √p` over the empirical law, a
/// moment-method proxy for the `ψ₂` norm up to universal constants.
pub fn psi2_estimate(samples: &[f64]) -> Result<f64> {
    if samples.len() < MIN_PSI2_SAMPLES {
        return Err(Error::Domain(format!(
            "psi2_estimate needs at least {MIN_PSI2_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("samples must be finite".into()));
    }
    // Scaling by the largest magnitude keeps x^16 finite.
    let top = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if top == 0.0 {
        return Ok(0.0);
    }
    let n = samples.len() as f64;
    let best = (1..=8)
        .map(|h| {
            let p = 2 * h;
            let moment = samples.iter().map(|x| (x.abs() / top).powi(p)).sum::<f64>() / n;
            moment.powf(1.0 / p as f64) / (p as f64).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(best * top)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SignSupMode {
    /// Enumerate all sign vectors (`k ≤ 20`).
    Exact,
    MonteCarlo { trials: usize },
    /// Exact when `k ≤ 20`, otherwise Monte Carlo.
    Auto { trials: usize },
}

fn sup_abs_dot(v: &PointSet, g: &[f64]) -> f64 {
    v.iter().map(|p| dot(p, g).abs()).fold(0.0, f64::max)
}

/// `Σ_ε sup_v |Σ_i ε_i v_i|` over the sign vectors whose high bits are
/// `high` and whose last coordinate is `+1`. `cols[j][p]` is coordinate
/// `j` of point `p`.
fn block_sum(cols: &[Vec<f64>], m: usize, high: u64, inner: u32) -> f64 {
    let k = cols.len();
    let mut s = vec![0.0; m];
    for (j, c) in cols.iter().enumerate() {
        let e = if j + 1 < k && high >> j & 1 == 1 { -1.0 } else { 1.0 };
        for (x, y) in s.iter_mut().zip(c) {
            *x += e * y;
        }
    }
    let sup = |s: &[f64]| s.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut total = sup(&s);
    for step in 1u64..(1 << inner) {
        let j = step.trailing_zeros() as usize;
        let gray = step ^ (step >> 1);
        let d = if gray >> j & 1 == 1 { -2.0 } else { 2.0 };
        for (x, y) in s.iter_mut().zip(&cols[j]) {
            *x += d * y;
        }
        total += sup(&s);
    }
    total
}

fn exact_sign_sup(v: &PointSet) -> Result<Estimate> {
    let k = v.dim();
    if k > EXACT_SIGN_LIMIT {
        return Err(Error::Size {
            what: "emp_sign_sup exact dimension",
            size: k,
            limit: EXACT_SIGN_LIMIT,
            hint: "; use a Monte Carlo mode",
        });
    }
    let distinct = v.dedup();
    let cols: Vec<Vec<f64>> = (0..k).map(|j| distinct.column(j)).collect();
    // ε and −ε give the same supremum, so the last sign is fixed to +1.
    let free = (k - 1) as u32;
    let inner = free.min(INNER_BITS);
    let blocks = 1u64 << (free - inner);
    let sums: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| block_sum(&cols, distinct.len(), b << inner, inner))
        .collect();
    let total: f64 = sums.iter().sum();
    Ok(Estimate::exact(total / (1u64 << free) as f64, 1 << k))
}

/// `E_ε sup_{v∈V} |Σ_i ε_i v_i|` for Rademacher signs `ε`.
pub fn emp_sign_sup(v: &PointSet, mode: SignSupMode, seed: u64) -> Result<Estimate> {
    let trials = match mode {
        SignSupMode::Exact => return exact_sign_sup(v),
        SignSupMode::Auto { .. } if v.dim() <= EXACT_SIGN_LIMIT => return exact_sign_sup(v),
        SignSupMode::MonteCarlo { trials } | SignSupMode::Auto { trials } => trials,
    };
    if trials < 2 {
        return Err(Error::Domain("Monte Carlo mode needs at least 2 trials".into()));
    }
    let distinct = v.dedup();
    let xs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|r| {
            let e: Vec<f64> = rng::random_signs(&mut rng::stream(seed, r as u64), v.dim())
                .into_iter()
                .map(f64::from)
                .collect();
            sup_abs_dot(&distinct, &e)
        })
        .collect();
    Ok(Estimate::from_samples(&xs))
}

fn gaussian_vector(seed: u64, trial: usize, n: usize) -> Vec<f64> {
    let mut r = rng::stream(seed, trial as u64);
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// `ℓ_*(V) = E sup_{v∈V} |Σ_i g_i v_i|` by Monte Carlo.
pub fn gauss_mean_width(v: &PointSet, trials: usize, seed: u64) -> Result<Estimate> {
    if trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "gauss_mean_width needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let distinct = v.dedup();
    let xs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|r| sup_abs_dot(&distinct, &gaussian_vector(seed, r, v.dim())))
        .collect();
    Ok(Estimate::from_samples(&xs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareSumRow {
    pub m: usize,
    /// `(E Σ_{i≤m} (g_i^*)²)^{1/2}`.
    pub value: f64,
    /// `value / √(m log(en/m))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStatsReport {
    pub n: usize,
    pub trials: usize,
    /// `E g_i^*` for `i = 1..=n` (entry `i − 1`).
    pub mean: Vec<f64>,
    /// `E g_i^* / √(log(2n/i))` for `i = 1..=⌊n/2⌋`.
    pub ratio: Vec<f64>,
    pub square_sums: Vec<SquareSumRow>,
}

/// Order statistics of `|g_1|, …, |g_n|` for standard Gaussian `g`.
pub fn order_stats(n: usize, trials: usize, m_grid: &[usize], seed: u64) -> Result<OrderStatsReport> {
    if n == 0 {
        return Err(Error::Domain("order_stats needs n >= 1".into()));
    }
    if trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "order_stats needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    if let Some(&m) = m_grid.iter().find(|&&m| m == 0 || m > n) {
        return Err(Error::Domain(format!("grid value m = {m} outside 1..={n}")));
    }
    let sorted: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|r| {
            let mut g: Vec<f64> = gaussian_vector(seed, r, n).into_iter().map(f64::abs).collect();
            g.sort_by(|a, b| b.total_cmp(a));
            g
        })
        .collect();
    let mut mean = vec![0.0; n];
    for g in &sorted {
        for (a, x) in mean.iter_mut().zip(g) {
            *a += x;
        }
    }
    mean.iter_mut().for_each(|a| *a /= trials as f64);
    let ratio = (1..=n / 2)
        .map(|i| mean[i - 1] / (2.0 * n as f64 / i as f64).ln().sqrt())
        .collect();
    let square_sums = m_grid
        .iter()
        .map(|&m| {
            let total: f64 = sorted
                .iter()
                .map(|g| g[..m].iter().map(|x| x * x).sum::<f64>())
                .sum();
            let value = (total / trials as f64).sqrt();
            SquareSumRow {
                m,
                value,
                ratio: value / (m as f64 * super::log_ek_m(n, m)).sqrt(),
            }
        })
        .collect();
    Ok(OrderStatsReport {
        n,
        trials,
        mean,
        ratio,
        square_sums,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyReport {
    pub samples: usize,
    /// `E⟨X, x⟩² / |x|²` for each random direction `x`.
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

/// Empirical second moments along random Gaussian directions; `X_i` is
/// drawn from stream `(seed, i)` and direction `j` from `(seed ⊕ 1, j)`.
pub fn isotropy_check(
    measure: &MeasureSpec,
    samples: usize,
    directions: usize,
    seed: u64,
) -> Result<IsotropyReport> {
    measure.validate()?;
    if samples == 0 || directions == 0 {
        return Err(Error::Domain("isotropy_check needs samples and directions".into()));
    }
    let d = measure.dim();
    let dirs: Vec<Vec<f64>> = (0..directions)
        .map(|j| gaussian_vector(rng::derive(seed, 1), j, d))
        .collect();
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = measure.sample(&mut rng::stream(seed, i as u64));
            dirs.iter().map(|u| dot(&x, u).powi(2)).collect()
        })
        .collect();
    let ratios: Vec<f64> = dirs
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let m: f64 = per_sample.iter().map(|row| row[j]).sum::<f64>() / samples as f64;
            m / norm2(u).powi(2)
        })
        .collect();
    Ok(IsotropyReport {
        samples,
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub level: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub k: usize,
    pub trials: usize,
    pub psi2: f64,
    /// `Pr(|Σ_i f(X_i)| ≥ u √k ‖f‖_ψ₂)` on the grid.
    pub sum_tail: Vec<TailRow>,
    /// Smallest `c` with `Pr ≤ 2 exp(−u²/c)` at every grid point.
    pub fitted_c: f64,
    /// `Pr(|k^{-1} Σ_i f(X_i)² − ‖f‖²| ≥ u ‖f‖²)` on the grid.
    pub square_tail: Vec<TailRow>,
    /// `−log Pr / (k · min(u², u))` per grid point with a nonzero tail.
    pub bernstein_exponents: Vec<f64>,
}

/// Tail shapes of sums of `f_t(X_i)` and of `f_t(X_i)²` against the
/// subgaussian and Bernstein profiles.
pub fn tail_check(
    measure: &MeasureSpec,
    t: &[f64],
    k: usize,
    trials: usize,
    grid: &[f64],
    seed: u64,
) -> Result<TailReport> {
    measure.validate()?;
    if t.len() != measure.dim() {
        return Err(Error::LengthMismatch {
            expected: measure.dim(),
            got: t.len(),
        });
    }
    if trials < MIN_TRIALS || k == 0 {
        return Err(Error::Domain(format!(
            "tail_check needs k >= 1 and at least {MIN_TRIALS} trials"
        )));
    }
    let norm_sq = norm2(t).powi(2);
    let draws: Vec<(f64, f64, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|r| {
            let mut s = rng::stream(seed, r as u64);
            let vals: Vec<f64> = (0..k).map(|_| dot(t, &measure.sample(&mut s))).collect();
            let sum: f64 = vals.iter().sum();
            let sq = vals.iter().map(|v| v * v).sum::<f64>() / k as f64;
            (sum, sq, vals)
        })
        .collect();
    let pooled: Vec<f64> = draws.iter().flat_map(|d| d.2.iter().copied()).collect();
    let psi2 = psi2_estimate(&pooled)?;
    let tail = |pred: &dyn Fn(&(f64, f64, Vec<f64>)) -> bool| {
        draws.iter().filter(|d| pred(d)).count() as f64 / trials as f64
    };
    let root_k = (k as f64).sqrt();
    let sum_tail: Vec<TailRow> = grid
        .iter()
        .map(|&u| TailRow {
            level: u,
            probability: tail(&|d| d.0.abs() >= u * root_k * psi2),
        })
        .collect();
    let fitted_c = sum_tail
        .iter()
        .filter(|r| r.probability > 0.0 && r.probability < 2.0)
        .map(|r| r.level * r.level / (2.0 / r.probability).ln())
        .fold(0.0, f64::max);
    let square_tail: Vec<TailRow> = grid
        .iter()
        .map(|&u| TailRow {
            level: u,
            probability: tail(&|d| (d.1 - norm_sq).abs() >= u * norm_sq),
        })
        .collect();
    let bernstein_exponents = square_tail
        .iter()
        .filter(|r| r.probability > 0.0 && r.level > 0.0)
        .map(|r| -r.probability.ln() / (k as f64 * r.level.min(r.level * r.level)))
        .collect();
    Ok(TailReport {
        k,
        trials,
        psi2,
        sum_tail,
        fitted_c,
        square_tail,
        bernstein_exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::new(rows).unwrap()
    }

    // Average over all 2^k sign vectors.
    fn brute_sign_sup(v: &PointSet) -> f64 {
        let k = v.dim();
        let total: f64 = (0u32..1 << k)
            .map(|mask| {
                let e: Vec<f64> = (0..k).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
                sup_abs_dot(v, &e)
            })
            .sum();
        total / f64::from(1u32 << k)
    }

    #[test]
    fn psi2_examples() {
        assert_eq!(psi2_estimate(&[0.0; 100]).unwrap(), 0.0);
        assert!(psi2_estimate(&[1.0; 99]).is_err());
        let mut r = rng::stream(3, 0);
        let g: Vec<f64> = (0..100_000).map(|_| r.sample(StandardNormal)).collect();
        let est = psi2_estimate(&g).unwrap();
        assert!((0.5..=2.0).contains(&est), "{est}");
        let scaled: Vec<f64> = g.iter().map(|x| 4.0 * x).collect();
        assert_eq!(psi2_estimate(&scaled).unwrap(), 4.0 * est);
        let scaled: Vec<f64> = g.iter().map(|x| 0.3 * x).collect();
        assert!((psi2_estimate(&scaled).unwrap() - 0.3 * est).abs() < 1e-12);
    }

    #[test]
    fn sign_sup_examples_and_oracle() {
        assert_eq!(emp_sign_sup(&set(vec![vec![1.0, 1.0]]), SignSupMode::Exact, 0).unwrap().mean, 1.0);
        assert_eq!(emp_sign_sup(&set(vec![vec![1.0, 0.0]]), SignSupMode::Exact, 0).unwrap().mean, 1.0);
        assert_eq!(emp_sign_sup(&set(vec![vec![0.0; 3]]), SignSupMode::Exact, 0).unwrap().mean, 0.0);
        let mut r = rng::stream(4, 0);
        for _ in 0..10 {
            let k = r.random_range(1..=15);
            let v = set((0..3).map(|_| (0..k).map(|_| r.random_range(-1.0..1.0)).collect()).collect());
            let e = emp_sign_sup(&v, SignSupMode::Exact, 0).unwrap().mean;
            assert!((e - brute_sign_sup(&v)).abs() < 1e-9);
            let mc = emp_sign_sup(&v, SignSupMode::MonteCarlo { trials: 4000 }, 1).unwrap();
            assert!((mc.mean - e).abs() < 5.0 * mc.std_err + 1e-9);
        }
        assert!(emp_sign_sup(&set(vec![vec![0.0; 21]]), SignSupMode::Exact, 0).is_err());
        let auto = emp_sign_sup(&set(vec![vec![1.0; 21]]), SignSupMode::Auto { trials: 50 }, 0).unwrap();
        assert!(!auto.exact);
    }

    #[test]
    fn mean_width_examples() {
        let t = set(vec![vec![3.0, 4.0]]);
        let w = gauss_mean_width(&t, 20_000, 5).unwrap();
        let expect = 5.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((w.mean - expect).abs() < 4.0 * w.std_err);
        assert_eq!(gauss_mean_width(&set(vec![vec![0.0; 2]]), 100, 5).unwrap().mean, 0.0);
        let sym = gauss_mean_width(&t.symmetrized(), 500, 5).unwrap();
        assert_eq!(sym, gauss_mean_width(&t, 500, 5).unwrap());
        assert!(gauss_mean_width(&t, 99, 5).is_err());
    }

    #[test]
    fn order_stat_anchors() {
        let one = order_stats(1, 40_000, &[1], 7).unwrap();
        assert!((one.mean[0] / (2.0 / std::f64::consts::PI).sqrt() - 1.0).abs() < 0.02);
        let two = order_stats(2, 40_000, &[1, 2], 7).unwrap();
        assert!((two.mean[0] / (2.0 / std::f64::consts::PI.sqrt()) - 1.0).abs() < 0.02);
        assert!(order_stats(4, 100, &[5], 0).is_err());
        assert!(order_stats(4, 10, &[1], 0).is_err());
    }

    #[test]
    fn named_measures_are_isotropic() {
        for m in [MeasureSpec::GaussianIsotropic { dim: 5 }, MeasureSpec::CubeUniform { dim: 5 }] {
            let r = isotropy_check(&m, 100_000, 4, 11).unwrap();
            assert!(r.min >= 0.9 && r.max <= 1.1, "{r:?}");
        }
    }

    #[test]
    fn tails_are_reported() {
        let m = MeasureSpec::GaussianIsotropic { dim: 2 };
        let grid = [0.5, 1.0, 1.5, 2.0, 3.0];
        let r = tail_check(&m, &[0.6, 0.8], 32, 2000, &grid, 3).unwrap();
        assert!(r.fitted_c.is_finite());
        assert!(r.sum_tail.windows(2).all(|w| w[0].probability >= w[1].probability));
    }
}
