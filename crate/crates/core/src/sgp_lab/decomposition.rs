//! The split `F ⊂ F₁^m + F₂^m` at level `τ_m` of a chaining net, and the
//! checks of its three conclusions on a sample window.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{log_ek_m, LinearClass, SampleWindow};
use crate::chaining::{build_admissible, gamma2, tau_m, Strategy};
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{norm2, weak_l2_radius, Metric, PointSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub k: usize,
    pub m: usize,
    pub tau_m: usize,
    /// Depth of the greedy sequence; `τ_m ≥ depth` makes the split trivial.
    pub depth: usize,
    /// Subgaussian constant scaling the chaining metric.
    pub l: f64,
    /// Upper bound on `γ_{2,τ_m}(F, ψ₂)` from the greedy sequence under
    /// `L·|·|`.
    pub gamma_tau: f64,
    /// Indices of the points forming `T_{τ_m}`.
    pub net: Vec<usize>,
    /// `π_{τ_m}(t)` for each point.
    pub pi: Vec<usize>,
    /// `t¹ = t − π_{τ_m}(t)`.
    pub f1: PointSet,
    /// `t² = π_{τ_m}(t)`.
    pub f2: PointSet,
    /// `max |t¹ + t² − t|` over all entries.
    pub reconstruction_error: f64,
}

impl Decomposition {
    /// `F₁ ≡ 0`, which happens whenever the net is all of `T`.
    pub fn is_trivial(&self) -> bool {
        self.f1.as_flat().iter().all(|&x| x == 0.0)
    }
}

/// Splits each index point at `π_{τ_m}` of a greedy admissible sequence.
/// Under an isotropic `L`-subgaussian measure `‖f_t − f_u‖_ψ₂ ≤ L|t − u|`,
/// so nets for the scaled Euclidean metric serve for `ψ₂`.
pub fn decompose(cls: &LinearClass, k: usize, m: usize) -> Result<Decomposition> {
    if m == 0 || m > k {
        return Err(Error::Domain(format!("decompose needs 1 <= m <= k, got m = {m}, k = {k}")));
    }
    let t = &cls.index_set;
    let seq = build_admissible(t, &Metric::Euclidean, Strategy::GreedyPacking)?;
    let tau = tau_m(m, k);
    let l = cls.measure.l();
    let gamma_tau = l * gamma2(t, &Metric::Euclidean, tau, &seq)?;
    let pi: Vec<usize> = (0..t.len()).map(|i| seq.pi(tau, i)).collect();
    let f2 = t.select(&pi);
    let f1 = PointSet::from_flat(
        t.dim(),
        t.as_flat().iter().zip(f2.as_flat()).map(|(a, b)| a - b).collect(),
    )?;
    let reconstruction_error = t
        .as_flat()
        .iter()
        .zip(f1.as_flat().iter().zip(f2.as_flat()))
        .map(|(x, (a, b))| (a + b - x).abs())
        .fold(0.0, f64::max);
    Ok(Decomposition {
        k,
        m,
        tau_m: tau,
        depth: seq.depth(),
        l,
        gamma_tau,
        net: seq.level(tau).to_vec(),
        pi,
        f1,
        f2,
        reconstruction_error,
    })
}

fn check_window(dec: &Decomposition, win: &SampleWindow) -> Result<()> {
    if win.k() != dec.k {
        return Err(Error::LengthMismatch {
            expected: dec.k,
            got: win.k(),
        });
    }
    if win.sigma.first().map(Vec::len) != Some(dec.f1.dim()) {
        return Err(Error::Invalid("sample window and class dimensions differ".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakL2Report {
    pub m: usize,
    /// `max_{|I|=m} r(I)`, exact: for one vector the worst `I` holds its
    /// `m` largest coordinates.
    pub worst_radius: f64,
    /// Largest `r(I)` over the sampled `I`.
    pub sampled_radius: f64,
    pub samples: usize,
    pub gamma_bound: f64,
    /// `worst_radius / gamma_bound`, taken as 0 when both vanish.
    pub c1: f64,
    /// `F₁ ≡ 0`.
    pub degenerate: bool,
}

/// Smallest `r(I)` with `P_I^σ F₁ ⊂ r(I)·W_m`, compared against
/// `γ_{2,τ_m}`.
pub fn verify_weak_l2_containment(
    dec: &Decomposition,
    win: &SampleWindow,
    i_samples: usize,
    seed: u64,
) -> Result<WeakL2Report> {
    check_window(dec, win)?;
    let (k, m) = (dec.k, dec.m);
    let proj: Vec<Vec<f64>> = dec.f1.iter().map(|p| win.evaluate(p)).collect();
    let worst_radius = proj
        .iter()
        .map(|x| top_radius(x, m))
        .fold(0.0, f64::max);
    let sampled_radius = (0..i_samples)
        .into_par_iter()
        .map(|j| {
            let idx = rng::random_subset(&mut rng::stream(seed, j as u64), k, m);
            proj.iter()
                .map(|x| weak_l2_radius(&idx.iter().map(|&i| x[i]).collect::<Vec<_>>()))
                .fold(0.0, f64::max)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    let c1 = if worst_radius == 0.0 {
        0.0
    } else {
        worst_radius / dec.gamma_tau
    };
    Ok(WeakL2Report {
        m,
        worst_radius,
        sampled_radius,
        samples: i_samples,
        gamma_bound: dec.gamma_tau,
        c1,
        degenerate: dec.is_trivial(),
    })
}

/// `max_{j≤m} x*_j √j`, the weak-ℓ₂ radius of the top `m` coordinates.
fn top_radius(x: &[f64], m: usize) -> f64 {
    crate::space::rearrange_nonincreasing(x)
        .iter()
        .take(m)
        .enumerate()
        .fold(0.0f64, |r, (j, v)| r.max(v * ((j + 1) as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkOptions {
    /// Pairs of `F₂` examined; all pairs when there are at most this many.
    pub pairs: usize,
    /// Random index sets per pair, on top of the exact worst one.
    pub i_samples: usize,
}

impl Default for ShrinkOptions {
    fn default() -> Self {
        ShrinkOptions {
            pairs: 500,
            i_samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkingReport {
    pub m: usize,
    pub pairs_used: usize,
    pub all_pairs: bool,
    /// Zero-distance pairs skipped.
    pub skipped: usize,
    /// `max ‖f−h‖_{L₂^I} / (√(log(ek/m)) ‖f−h‖_{L₂})` with the worst `I`
    /// per pair (its top `m` coordinates), the empirical `c₂`.
    pub c2: f64,
    /// The same maximum over sampled `I` only.
    pub c2_sampled: f64,
    /// `max ‖f−h‖_{L₂} / ‖f−h‖_{L₂^σ}`.
    pub norm_ratio: f64,
    /// `norm_ratio > √2`.
    pub sqrt2_violated: bool,
}

/// Pairwise shrinking within `F₂^m` and the lower isometry against `√2`.
pub fn verify_shrinking(
    dec: &Decomposition,
    win: &SampleWindow,
    opts: &ShrinkOptions,
    seed: u64,
) -> Result<ShrinkingReport> {
    check_window(dec, win)?;
    let (k, m) = (dec.k, dec.m);
    let mut net = dec.f2.distinct_indices();
    net.sort_unstable();
    let total = net.len() * net.len().saturating_sub(1) / 2;
    let all_pairs = total <= opts.pairs;
    let pairs: Vec<(usize, usize)> = if all_pairs {
        (0..net.len())
            .flat_map(|a| ((a + 1)..net.len()).map(move |b| (a, b)))
            .map(|(a, b)| (net[a], net[b]))
            .collect()
    } else {
        let mut r = rng::stream(seed, u64::MAX);
        (0..opts.pairs)
            .map(|_| {
                let ab = rng::random_subset(&mut r, net.len(), 2);
                (net[ab[0]], net[ab[1]])
            })
            .collect()
    };
    let log = log_ek_m(k, m).sqrt();
    let rows: Vec<Option<(f64, f64, f64)>> = pairs
        .par_iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let diff: Vec<f64> = dec.f2.point(a).iter().zip(dec.f2.point(b)).map(|(x, y)| x - y).collect();
            let l2 = norm2(&diff);
            if l2 == 0.0 {
                return None;
            }
            let y = win.evaluate(&diff);
            let sq: Vec<f64> = y.iter().map(|v| v * v).collect();
            let full = (sq.iter().sum::<f64>() / k as f64).sqrt();
            let mut sorted = sq.clone();
            sorted.sort_by(|p, q| q.total_cmp(p));
            let worst = (sorted[..m].iter().sum::<f64>() / m as f64).sqrt() / (log * l2);
            let mut r = rng::stream(seed, j as u64);
            let sampled = (0..opts.i_samples)
                .map(|_| {
                    let idx = rng::random_subset(&mut r, k, m);
                    (idx.iter().map(|&i| sq[i]).sum::<f64>() / m as f64).sqrt() / (log * l2)
                })
                .fold(0.0, f64::max);
            // The sampled ratio can never exceed the worst one.
            debug_assert!(sampled <= worst * (1.0 + 1e-12));
            Some((worst, sampled, if full > 0.0 { l2 / full } else { f64::INFINITY }))
        })
        .collect();
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let (c2, c2_sampled, norm_ratio) = rows
        .iter()
        .flatten()
        .fold((0.0f64, 0.0f64, 0.0f64), |acc, r| (acc.0.max(r.0), acc.1.max(r.1), acc.2.max(r.2)));
    Ok(ShrinkingReport {
        m,
        pairs_used: pairs.len(),
        all_pairs,
        skipped,
        c2,
        c2_sampled,
        norm_ratio,
        sqrt2_violated: norm_ratio > std::f64::consts::SQRT_2,
    })
}
