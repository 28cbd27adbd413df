//! Shrinking, mean-width, isometry and discrepancy-gap experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimators::{emp_sign_sup, gauss_mean_width, SignSupMode, MIN_TRIALS};
use super::{log_ek_m, Estimate, LinearClass, MeasureSpec, Quantiles, SampleWindow};
use crate::chaining::{build_admissible, gamma2, gamma2_profile, Strategy};
use crate::coloring::disc_heuristic;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{norm2, Metric, PointSet, TOL};

fn need_trials(what: &str, trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "{what} needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

/// `a / b`, with `0/0 = 0`.
fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkSingleReport {
    pub k: usize,
    pub trials: usize,
    /// Per trial, `sup_m max_{|I|=m} ‖f‖_{L₂^I} / (√(log(ek/m)) ‖f‖_{L₂})`.
    pub constants: Vec<f64>,
    pub quantiles: Quantiles,
    /// Mean over trials of `‖f‖_{L₂^k} / ‖f‖_{L₂}` (the `m = k` ratio).
    pub full_ratio: f64,
}

/// Single-function shrinking. For each `m` the worst `I` holds the `m`
/// largest `|f(X_i)|`, so the supremum over `I` is exact.
pub fn shrink_single(
    t: &[f64],
    measure: &MeasureSpec,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<ShrinkSingleReport> {
    need_trials("shrink_single", trials)?;
    measure.validate()?;
    if t.len() != measure.dim() {
        return Err(Error::LengthMismatch {
            expected: measure.dim(),
            got: t.len(),
        });
    }
    if k == 0 {
        return Err(Error::Domain("sample size k must be at least 1".into()));
    }
    let norm = norm2(t);
    let rows: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64)> {
            let win = SampleWindow::draw(measure, k, rng::derive(seed, r as u64))?;
            let mut sq: Vec<f64> = win.evaluate(t).iter().map(|v| v * v).collect();
            sq.sort_by(|a, b| b.total_cmp(a));
            let mut prefix = 0.0;
            let mut sup = 0.0f64;
            for (j, x) in sq.iter().enumerate() {
                prefix += x;
                let m = j + 1;
                sup = sup.max(ratio((prefix / m as f64).sqrt(), log_ek_m(k, m).sqrt() * norm));
            }
            Ok((sup, ratio((prefix / k as f64).sqrt(), norm)))
        })
        .collect::<Result<_>>()?;
    let constants: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(ShrinkSingleReport {
        k,
        trials,
        quantiles: Quantiles::of(&constants),
        full_ratio: rows.iter().map(|r| r.1).sum::<f64>() / trials as f64,
        constants,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanwidthRow {
    pub m: usize,
    /// `√((m/k) log(ek/m))`.
    pub scale: f64,
    /// `max_I ℓ_*(P_I V) / (scale · ℓ_*(T))` over the sampled `I`.
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// `ℓ_*(P_I {v}) / ℓ_*({t})` for the largest `t` and its worst `I`.
    pub single_ratio: f64,
    /// `single_ratio / scale`.
    pub single_over_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanwidthReport {
    pub k: usize,
    pub i_samples: usize,
    pub trials: usize,
    pub ell_t: Estimate,
    /// Index of the point used by the single-vector experiment.
    pub single_point: usize,
    pub rows: Vec<MeanwidthRow>,
}

/// Mean width of coordinate projections of `V = k^{-1/2} Γ T` against
/// `√((m/k) log(ek/m)) ℓ_*(T)`, with the single-vector lower experiment.
/// For a single vector `ℓ_*({x}) = √(2/π)|x|`, so that side is exact.
pub fn meanwidth_ratio(
    cls: &LinearClass,
    k: usize,
    m_grid: &[usize],
    i_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<MeanwidthReport> {
    need_trials("meanwidth_ratio", trials)?;
    if let Some(&m) = m_grid.iter().find(|&&m| m == 0 || m > k) {
        return Err(Error::Domain(format!("grid value m = {m} outside 1..={k}")));
    }
    let win = SampleWindow::draw(&cls.measure, k, seed)?;
    let root_k = (k as f64).sqrt();
    let v: Vec<Vec<f64>> = cls
        .index_set
        .iter()
        .map(|t| win.evaluate(t).into_iter().map(|x| x / root_k).collect())
        .collect();
    let ell_t = gauss_mean_width(&cls.index_set, trials, rng::derive(seed, 1))?;
    let single_point = cls
        .index_set
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, p)| {
            let n = norm2(p);
            if n > best.1 {
                (i, n)
            } else {
                best
            }
        })
        .0;
    let t_norm = norm2(cls.index_set.point(single_point));
    let rows = m_grid
        .iter()
        .map(|&m| -> Result<MeanwidthRow> {
            let scale = (m as f64 / k as f64 * log_ek_m(k, m)).sqrt();
            let grid_seed = rng::derive(seed, 2 + m as u64);
            let ratios: Vec<f64> = (0..i_samples)
                .into_par_iter()
                .map(|j| -> Result<f64> {
                    let idx = rng::random_subset(&mut rng::stream(grid_seed, j as u64), k, m);
                    let proj = PointSet::new(
                        v.iter().map(|row| idx.iter().map(|&i| row[i]).collect()).collect(),
                    )?;
                    let w = gauss_mean_width(&proj, trials, rng::derive(grid_seed, j as u64))?;
                    Ok(ratio(w.mean, scale * ell_t.mean))
                })
                .collect::<Result<_>>()?;
            let mut top: Vec<f64> = v[single_point].iter().map(|x| x * x).collect();
            top.sort_by(|a, b| b.total_cmp(a));
            let single_ratio = ratio(top[..m].iter().sum::<f64>().sqrt(), t_norm);
            Ok(MeanwidthRow {
                m,
                scale,
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                mean_ratio: if ratios.is_empty() {
                    0.0
                } else {
                    ratios.iter().sum::<f64>() / ratios.len() as f64
                },
                single_ratio,
                single_over_scale: single_ratio / scale,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MeanwidthReport {
        k,
        i_samples,
        trials,
        ell_t,
        single_point,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryTrial {
    /// Points with `‖f‖_{L₂} ≥ κ₇ A / √k` (and `f ≠ 0`).
    pub above: usize,
    /// Those outside `[√½ ‖f‖, √(3/2) ‖f‖]` empirically.
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub k: usize,
    pub a: f64,
    pub kappa7: f64,
    pub threshold: f64,
    pub trials: Vec<IsometryTrial>,
    pub above_total: usize,
    pub violations_total: usize,
    /// `violations_total / above_total`, 0 when nothing is above.
    pub rate: f64,
}

/// The sandwich `√½ ‖f‖_{L₂} ≤ ‖f‖_{L₂^k} ≤ √(3/2) ‖f‖_{L₂}` for every
/// `f` above the threshold `κ₇ A / √k`. `A` defaults to the greedy
/// `L·γ₂(T)` bound.
pub fn almost_isometry(
    cls: &LinearClass,
    k: usize,
    trials: usize,
    a_estimate: Option<f64>,
    kappa7: f64,
    seed: u64,
) -> Result<IsometryReport> {
    if trials == 0 || k == 0 {
        return Err(Error::Domain("almost_isometry needs k >= 1 and trials >= 1".into()));
    }
    let t = &cls.index_set;
    let a = match a_estimate {
        Some(a) => a,
        None => {
            let seq = build_admissible(t, &Metric::Euclidean, Strategy::GreedyPacking)?;
            cls.measure.l() * gamma2(t, &Metric::Euclidean, 0, &seq)?
        }
    };
    let threshold = kappa7 * a / (k as f64).sqrt();
    let norms: Vec<f64> = t.iter().map(norm2).collect();
    let (lo, hi) = (0.5f64.sqrt(), 1.5f64.sqrt());
    let rows: Vec<IsometryTrial> = (0..trials)
        .into_par_iter()
        .map(|r| -> Result<IsometryTrial> {
            let win = SampleWindow::draw(&cls.measure, k, rng::derive(seed, r as u64))?;
            let mut row = IsometryTrial {
                above: 0,
                violations: 0,
            };
            for (p, &n) in t.iter().zip(&norms) {
                if n == 0.0 || n < threshold {
                    continue;
                }
                row.above += 1;
                let emp = (win.evaluate(p).iter().map(|x| x * x).sum::<f64>() / k as f64).sqrt();
                if emp < lo * n - TOL || emp > hi * n + TOL {
                    row.violations += 1;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let above_total = rows.iter().map(|r| r.above).sum();
    let violations_total = rows.iter().map(|r| r.violations).sum();
    Ok(IsometryReport {
        k,
        a,
        kappa7,
        threshold,
        trials: rows,
        above_total,
        violations_total,
        rate: if above_total == 0 {
            0.0
        } else {
            violations_total as f64 / above_total as f64
        },
    })
}

/// `(v_β^−, v_β^+)`: the coordinatewise clamp to `[−β, β]` and the rest.
pub fn truncate_split(v: &PointSet, beta: f64) -> Result<(PointSet, PointSet)> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("truncation level must be positive, got {beta}")));
    }
    let low: Vec<f64> = v.as_flat().iter().map(|x| x.clamp(-beta, beta)).collect();
    let high: Vec<f64> = v.as_flat().iter().zip(&low).map(|(x, l)| x - l).collect();
    Ok((PointSet::from_flat(v.dim(), low)?, PointSet::from_flat(v.dim(), high)?))
}

/// Chaining level `⌊log₂ log₂(c₂ n)⌋`, 0 when `c₂ n < 4`.
pub fn a_n_level(n: usize, c2: f64) -> usize {
    let x = c2 * n as f64;
    if x < 4.0 {
        0
    } else {
        x.log2().log2().floor() as usize
    }
}

/// `c₁(γ_{2,s}·√(log(ek/n)) + diam·log(k)/n^{1/2−ρ})` with
/// `s = ⌊log₂ log₂(c₂ n)⌋`; `gamma(s)` supplies `γ_{2,s}(F, L₂)`.
pub fn eval_a_n(
    n: usize,
    k: usize,
    gamma: impl Fn(usize) -> f64,
    diam: f64,
    rho: f64,
    constants: &Constants,
) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("rho must lie in (0, 1/2), got {rho}")));
    }
    if n == 0 || n > k {
        return Err(Error::Domain(format!("a_n needs 1 <= n <= k, got n = {n}, k = {k}")));
    }
    let g = gamma(a_n_level(n, constants.c2));
    let first = g * log_ek_m(k, n).sqrt();
    let second = diam * (k as f64).ln() / (n as f64).powf(0.5 - rho);
    Ok(constants.c1 * (first + second))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapOptions {
    pub k_list: Vec<usize>,
    /// Restart budget of the discrepancy heuristic.
    pub budget: usize,
    pub trials: usize,
    pub rho: f64,
    /// Sign draws for `E_ε sup` when `k` exceeds the exact limit.
    pub sign_trials: usize,
    pub constants: Constants,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            k_list: vec![16, 64, 256],
            budget: 64,
            trials: 20,
            rho: 0.25,
            sign_trials: 2000,
            constants: Constants::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub k: usize,
    pub trial: usize,
    /// Upper bound on `disc(P_σ F)`.
    pub disc: f64,
    pub esup: Estimate,
    /// `disc / E sup`, absent when `E sup = 0`.
    pub ratio: Option<f64>,
    /// `E sup / (√k σ_F)`, absent when `σ_F = 0`.
    pub anchor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    pub k: usize,
    pub median_ratio: Option<f64>,
    pub median_anchor: Option<f64>,
    pub min_anchor: Option<f64>,
    /// `(n, a_n)` for `n = 1, 2, 4, …` up to `k`.
    pub a_n: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub sigma_f: f64,
    pub diam: f64,
    /// Greedy upper bounds on `γ_{2,s}(F, L₂)` for `s = 0..=depth`.
    pub gamma_profile: Vec<f64>,
    pub rows: Vec<GapRow>,
    pub summaries: Vec<GapSummary>,
    pub degenerate: bool,
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    Some(super::quantile(&s, 0.5))
}

/// Ratio of a discrepancy upper bound to the Rademacher mean of `P_σ F`
/// across sample sizes, alongside the evaluated `a_n` curve.
pub fn gap_experiment(cls: &LinearClass, opts: &GapOptions, seed: u64) -> Result<GapReport> {
    if opts.k_list.is_empty() || opts.k_list.contains(&0) {
        return Err(Error::Domain("k_list must hold positive sample sizes".into()));
    }
    if opts.trials == 0 {
        return Err(Error::Domain("gap_experiment needs trials >= 1".into()));
    }
    if !(opts.rho > 0.0 && opts.rho < 0.5) {
        return Err(Error::Domain(format!("rho must lie in (0, 1/2), got {}", opts.rho)));
    }
    let t = &cls.index_set;
    let l = cls.measure.l();
    let sigma_f = cls.sigma_f();
    let diam = t.diameter(&Metric::Euclidean);
    let seq = build_admissible(t, &Metric::Euclidean, Strategy::GreedyPacking)?;
    let gamma_profile = gamma2_profile(t, &Metric::Euclidean, &seq)?;
    let jobs: Vec<(usize, usize)> = opts
        .k_list
        .iter()
        .flat_map(|&k| (0..opts.trials).map(move |r| (k, r)))
        .collect();
    let rows: Vec<GapRow> = jobs
        .par_iter()
        .map(|&(k, trial)| -> Result<GapRow> {
            let trial_seed = rng::derive(rng::derive(seed, k as u64), trial as u64);
            let win = SampleWindow::draw(&cls.measure, k, trial_seed)?;
            let proj = win.project(t)?;
            let disc = disc_heuristic(&proj, opts.budget, rng::derive(trial_seed, 1))?.value;
            let esup = emp_sign_sup(
                &proj,
                SignSupMode::Auto {
                    trials: opts.sign_trials,
                },
                rng::derive(trial_seed, 2),
            )?;
            Ok(GapRow {
                k,
                trial,
                disc,
                esup,
                ratio: (esup.mean > 0.0).then(|| disc / esup.mean),
                anchor: (sigma_f > 0.0).then(|| esup.mean / ((k as f64).sqrt() * sigma_f)),
            })
        })
        .collect::<Result<_>>()?;
    let gamma_at = |s: usize| l * gamma_profile.get(s).copied().unwrap_or(0.0);
    let summaries = opts
        .k_list
        .iter()
        .map(|&k| -> Result<GapSummary> {
            let of_k: Vec<&GapRow> = rows.iter().filter(|r| r.k == k).collect();
            let ratios: Vec<f64> = of_k.iter().filter_map(|r| r.ratio).collect();
            let anchors: Vec<f64> = of_k.iter().filter_map(|r| r.anchor).collect();
            let mut a_n = Vec::new();
            let mut n = 1;
            while n <= k {
                a_n.push((n, eval_a_n(n, k, gamma_at, l * diam, opts.rho, &opts.constants)?));
                n = if n < k && n * 2 > k { k } else { n * 2 };
            }
            Ok(GapSummary {
                k,
                median_ratio: median(&ratios),
                median_anchor: median(&anchors),
                min_anchor: anchors.iter().copied().reduce(f64::min),
                a_n,
            })
        })
        .collect::<Result<_>>()?;
    Ok(GapReport {
        sigma_f,
        diam,
        gamma_profile,
        degenerate: rows.iter().all(|r| r.ratio.is_none()),
        rows,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::sphere_point;

    fn sphere_class(seed: u64, m: usize, d: usize) -> LinearClass {
        let mut r = rng::stream(seed, 91);
        let t = PointSet::new((0..m).map(|_| sphere_point(&mut r, d)).collect()).unwrap();
        LinearClass::new(t, MeasureSpec::GaussianIsotropic { dim: d }).unwrap()
    }

    #[test]
    fn truncation_examples() {
        let v = PointSet::new(vec![vec![0.5, -2.0]]).unwrap();
        let (lo, hi) = truncate_split(&v, 1.0).unwrap();
        assert_eq!(lo.point(0), &[0.5, -1.0]);
        assert_eq!(hi.point(0), &[0.0, -1.0]);
        let (lo, hi) = truncate_split(&v, 3.0).unwrap();
        assert_eq!(lo, v);
        assert!(hi.as_flat().iter().all(|&x| x == 0.0));
        let (lo, _) = truncate_split(&v, 1e-9).unwrap();
        assert!(lo.as_flat().iter().all(|x| x.abs() <= 1e-9));
        assert!(truncate_split(&v, 0.0).is_err());
    }

    #[test]
    fn a_n_examples() {
        let c = Constants::default();
        assert_eq!(eval_a_n(4, 16, |_| 0.0, 0.0, 0.25, &c).unwrap(), 0.0);
        let v = eval_a_n(256, 256, |_| 0.0, 2.0, 0.25, &c).unwrap();
        assert!((v - 2.0 * 256f64.ln() / 256f64.powf(0.25)).abs() < 1e-12);
        let v = eval_a_n(16, 256, |s| if s == 2 { 0.5 } else { f64::NAN }, 2.0, 0.25, &c).unwrap();
        let expect = 0.5 * (1.0 + 16f64.ln()).sqrt() + 2.0 * 256f64.ln() / 2.0;
        assert!((v - expect).abs() < 1e-12);
        assert!(eval_a_n(16, 256, |_| 1.0, 1.0, 0.5, &c).is_err());
        assert!(eval_a_n(300, 256, |_| 1.0, 1.0, 0.2, &c).is_err());
    }

    #[test]
    fn shrink_single_examples() {
        let m = MeasureSpec::GaussianIsotropic { dim: 3 };
        let zero = shrink_single(&[0.0; 3], &m, 32, 100, 1).unwrap();
        assert_eq!(zero.quantiles.max, 0.0);
        let r = shrink_single(&[0.6, 0.0, 0.8], &m, 4096, 100, 2).unwrap();
        assert!((r.full_ratio - 1.0).abs() < 0.05);
        assert!(shrink_single(&[1.0; 3], &m, 32, 99, 1).is_err());
    }

    #[test]
    fn isometry_anchors() {
        let e1 = PointSet::new(vec![vec![1.0, 0.0, 0.0], vec![0.0; 3]]).unwrap();
        let cls = LinearClass::new(e1, MeasureSpec::CubeUniform { dim: 3 }).unwrap();
        let r = almost_isometry(&cls, 64, 50, None, 1.0, 3).unwrap();
        assert_eq!(r.violations_total, 0);
        assert_eq!(r.above_total, 50);
    }

    #[test]
    fn meanwidth_zero_and_single() {
        let zero = LinearClass::new(PointSet::origin(3), MeasureSpec::GaussianIsotropic { dim: 3 }).unwrap();
        let r = meanwidth_ratio(&zero, 32, &[4, 32], 3, 100, 1).unwrap();
        assert!(r.rows.iter().all(|row| row.max_ratio == 0.0 && row.single_ratio == 0.0));
        let cls = sphere_class(5, 8, 3);
        let r = meanwidth_ratio(&cls, 64, &[8, 64], 5, 200, 2).unwrap();
        // With I = everything the single-vector ratio is |Γt|/(√k |t|) ≈ 1.
        assert!((r.rows[1].single_ratio - 1.0).abs() < 0.3);
        assert!(r.rows.iter().all(|row| row.max_ratio.is_finite()));
    }

    #[test]
    fn gap_on_zero_and_small_class() {
        let zero = LinearClass::new(PointSet::origin(2), MeasureSpec::GaussianIsotropic { dim: 2 }).unwrap();
        let opts = GapOptions {
            k_list: vec![4, 8],
            budget: 4,
            trials: 2,
            ..GapOptions::default()
        };
        let r = gap_experiment(&zero, &opts, 1).unwrap();
        assert!(r.degenerate);
        assert!(r.summaries.iter().all(|s| s.median_ratio.is_none()));
        let cls = sphere_class(6, 6, 2);
        let r = gap_experiment(&cls, &opts, 1).unwrap();
        assert!(r.rows.iter().all(|row| row.ratio.unwrap() <= 1.0 + 1e-9));
        assert_eq!(r.summaries[1].a_n.last().unwrap().0, 8);
        assert_eq!(r, gap_experiment(&cls, &opts, 1).unwrap());
    }
}
