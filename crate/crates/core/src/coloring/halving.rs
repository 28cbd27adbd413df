//! Iterated halving: partial colorings on successive zero-index
//! projections, then an exhaustive remainder.

use serde::Serialize;

use super::exact::{mask_to_signs, min_sup, Columns};
use super::partial::{entropy_budget_check, partial_color, BudgetCheck, Method};
use super::search::best_of_restarts;
use super::DiscResult;
use crate::chaining::{
    build_capped, entropy_integral_u, schedule_entropy, schedule_gamma, Schedule,
};
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{project, sup_signed_sum, Coloring, IndexSet, Metric, PointSet, TOL};

/// Rounds stop once at most this many coordinates remain.
pub const REMAINDER: usize = 10;
/// Sign vectors sampled per round before the exhaustive or local fallback.
pub const DEFAULT_ROUND_BUDGET: usize = 4096;
/// Local-search restarts used when a round's pigeonhole fails.
pub const FALLBACK_RESTARTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingOptions {
    pub round_budget: usize,
    pub constants: Constants,
}

impl Default for HalvingOptions {
    fn default() -> Self {
        HalvingOptions {
            round_budget: DEFAULT_ROUND_BUDGET,
            constants: Constants::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundReport {
    pub round: usize,
    /// Coordinates still uncolored when the round started.
    pub active: usize,
    pub depth: usize,
    pub budget_check: BudgetCheck,
    /// `None` when the pigeonhole failed and the fallback colored the rest.
    pub method: Option<Method>,
    pub zero_count: usize,
    /// Certified bound on this round's contribution (the chain bound, or the
    /// realised sup for a fallback round).
    pub bound: f64,
    pub budget_used: usize,
    pub failure: Option<String>,
    /// `∫ u(ε) dε` of the round's projection (entropy-schedule rounds only).
    pub entropy_integral: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingResult {
    pub result: DiscResult,
    pub rounds: Vec<RoundReport>,
    /// Coordinates colored by exhaustive search at the end.
    pub remainder: usize,
    /// `sup_t |Σ_{i∈R} ε_i t_i|` over the remainder coordinates `R`.
    pub remainder_bound: f64,
    /// Sum of the per-round bounds plus the remainder bound; dominates the value.
    pub stitched_bound: f64,
    /// Some round fell back to local search.
    pub fallback: bool,
    /// Every entry lies in `[-1, 1]`.
    pub in_unit_cube: bool,
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    Gamma,
    Entropy,
}

fn round_schedule(rule: Rule, n: usize, c: Constants) -> Result<Schedule> {
    match rule {
        Rule::Gamma => schedule_gamma(n, c),
        Rule::Entropy => schedule_entropy(n, c),
    }
}

fn sup_over(cols: &Columns, signs: &[i8], coords: &[usize]) -> f64 {
    let mut s = vec![0.0; cols.m];
    for &j in coords {
        let e = f64::from(signs[j]);
        for (x, c) in s.iter_mut().zip(cols.col(j)) {
            *x += e * c;
        }
    }
    s.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn halve(t: &PointSet, seed: u64, opts: &HalvingOptions, rule: Rule) -> Result<HalvingResult> {
    let distinct = t.dedup();
    let n = t.dim();
    let cols = Columns::all(&distinct);
    let mut signs = vec![0i8; n];
    let mut acc = vec![0.0; distinct.len()];
    let mut active: Vec<usize> = (0..n).collect();
    let mut rounds = Vec::new();
    let mut fallback = false;
    let mut remainder_coords = Vec::new();

    while active.len() > REMAINDER {
        let round = rounds.len();
        let k = active.len();
        let proj = project(&distinct, &IndexSet::new(active.clone(), n)?)?;
        let (aug, origin) = proj.with_origin();
        let base = round_schedule(rule, k, opts.constants)?;
        let seq = match rule {
            Rule::Gamma => build_capped(&aug, &Metric::Euclidean, origin, |_| usize::MAX)?,
            Rule::Entropy => build_capped(&aug, &Metric::Euclidean, origin, |s| {
                base.lambda(s).map_or(usize::MAX, |l| l.floor().min(usize::MAX as f64) as usize)
            })?,
        };
        let sched = base.with_horizon(seq.depth().max(1));
        let budget_check = entropy_budget_check(&sched, k)?;
        let entropy_integral = match rule {
            Rule::Entropy => Some(entropy_integral_u(&proj).value),
            Rule::Gamma => None,
        };
        let round_seed = rng::derive(seed, round as u64);
        match partial_color(&proj, &sched, &seq, opts.round_budget, round_seed) {
            Ok(pc) => {
                let mut next = Vec::new();
                for (pos, &i) in active.iter().enumerate() {
                    let e = pc.coloring.get(pos);
                    if e == 0 {
                        next.push(i);
                    } else {
                        signs[i] = e;
                        for (x, c) in acc.iter_mut().zip(cols.col(i)) {
                            *x += f64::from(e) * c;
                        }
                    }
                }
                rounds.push(RoundReport {
                    round,
                    active: k,
                    depth: seq.depth(),
                    budget_check,
                    method: Some(pc.method),
                    zero_count: pc.zero_count,
                    bound: pc.chain_bound,
                    budget_used: pc.budget_used,
                    failure: None,
                    entropy_integral,
                });
                active = next;
            }
            Err(Error::Budget(msg)) => {
                let (_, best) =
                    best_of_restarts(&cols, &acc, &active, FALLBACK_RESTARTS, round_seed);
                for &i in &active {
                    signs[i] = best[i];
                }
                rounds.push(RoundReport {
                    round,
                    active: k,
                    depth: seq.depth(),
                    budget_check,
                    method: None,
                    zero_count: 0,
                    bound: sup_over(&cols, &signs, &active),
                    budget_used: opts.round_budget,
                    failure: Some(msg),
                    entropy_integral,
                });
                fallback = true;
                active.clear();
            }
            Err(e) => return Err(e),
        }
    }

    if !active.is_empty() {
        let rest = Columns::new(&distinct, &active);
        let (_, mask) = min_sup(&rest, &acc, false);
        for (&i, e) in active.iter().zip(mask_to_signs(mask, active.len())) {
            signs[i] = e;
        }
        remainder_coords = active;
    }
    let remainder_bound = sup_over(&cols, &signs, &remainder_coords);
    let stitched_bound = rounds.iter().map(|r| r.bound).sum::<f64>() + remainder_bound;
    let coloring = Coloring::new(signs)?;
    let value = sup_signed_sum(t, &coloring)?;
    debug_assert!(value <= stitched_bound + TOL * (1.0 + stitched_bound));
    Ok(HalvingResult {
        result: DiscResult {
            value,
            coloring,
            exact: false,
        },
        rounds,
        remainder: remainder_coords.len(),
        remainder_bound,
        stitched_bound,
        fallback,
        in_unit_cube: t.max_abs() <= 1.0 + TOL,
    })
}

/// Spencer-style halving with the three-branch `Q_s` schedule per round.
pub fn spencer_color(t: &PointSet, seed: u64) -> Result<HalvingResult> {
    spencer_color_with(t, seed, &HalvingOptions::default())
}

pub fn spencer_color_with(t: &PointSet, seed: u64, opts: &HalvingOptions) -> Result<HalvingResult> {
    halve(t, seed, opts, Rule::Gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatousekResult {
    pub halving: HalvingResult,
    pub d: usize,
    /// `n^{1/2 − 1/(2d)}`.
    pub scale: f64,
    /// `value / scale`, the implied `c(d)`.
    pub implied_constant: f64,
}

/// Halving for `{0,1}` systems with the two-branch `λ_s/Q_s` schedule;
/// level `s` of each round's chain keeps at most `λ_s` points.
pub fn matousek_color(t: &PointSet, d: usize, seed: u64) -> Result<MatousekResult> {
    matousek_color_with(t, d, seed, &HalvingOptions::default())
}

pub fn matousek_color_with(
    t: &PointSet,
    d: usize,
    seed: u64,
    opts: &HalvingOptions,
) -> Result<MatousekResult> {
    if d == 0 {
        return Err(Error::Domain("VC bound d must be at least 1".into()));
    }
    if t.as_flat().iter().any(|&x| x != 0.0 && x != 1.0) {
        return Err(Error::Domain("matousek_color needs a {0,1} system".into()));
    }
    let halving = halve(t, seed, opts, Rule::Entropy)?;
    let scale = (t.dim() as f64).powf(0.5 - 0.5 / d as f64);
    Ok(MatousekResult {
        implied_constant: halving.result.value / scale,
        d,
        scale,
        halving,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::disc_exact;
    use rand::Rng;

    fn basis(n: usize) -> PointSet {
        PointSet::new(
            (0..n)
                .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
        .unwrap()
    }

    fn random_signs(seed: u64, m: usize, n: usize) -> PointSet {
        let mut r = rng::stream(seed, 51);
        PointSet::new(rng_rows(&mut r, m, n)).unwrap()
    }

    fn rng_rows(r: &mut rng::Stream, m: usize, n: usize) -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect())
            .collect()
    }

    fn intervals(n: usize) -> PointSet {
        let mut rows = Vec::new();
        for a in 0..n {
            for b in (a + 1)..=n {
                if (b - a) % 3 == 1 || b - a == n {
                    rows.push((0..n).map(|i| if i >= a && i < b { 1.0 } else { 0.0 }).collect());
                }
            }
        }
        PointSet::new(rows).unwrap()
    }

    #[test]
    fn basis_has_value_one() {
        for n in [1, 5, 12, 30] {
            let r = spencer_color(&basis(n), 1).unwrap();
            assert_eq!(r.result.value, 1.0);
            assert!(r.result.coloring.is_full());
        }
    }

    #[test]
    fn single_unit_vector() {
        let t = PointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(spencer_color(&t, 0).unwrap().result.value, 1.0);
    }

    #[test]
    fn stitching_and_exact_comparison() {
        for seed in 0..5 {
            let t = random_signs(seed, 12, 12);
            let r = spencer_color(&t, seed).unwrap();
            assert!(r.result.value <= r.stitched_bound + 1e-9);
            assert!(r.result.value >= disc_exact(&t).unwrap().value - 1e-12);
            assert!(r.in_unit_cube);
        }
        let t = random_signs(9, 40, 40);
        let r = spencer_color(&t, 9).unwrap();
        assert!(r.result.value <= r.stitched_bound + 1e-9);
        assert!(r.result.coloring.is_full());
    }

    #[test]
    fn spencer_is_deterministic() {
        let t = random_signs(3, 30, 30);
        assert_eq!(spencer_color(&t, 4).unwrap(), spencer_color(&t, 4).unwrap());
    }

    #[test]
    fn matousek_on_intervals() {
        let t = intervals(24);
        let r = matousek_color(&t, 1, 2).unwrap();
        assert!(r.halving.result.coloring.is_full());
        assert!(r.halving.result.value <= r.halving.stitched_bound + 1e-9);
        assert_eq!(r.scale, 1.0);
        let zeros = PointSet::new(vec![vec![0.0; 16]]).unwrap();
        assert_eq!(matousek_color(&zeros, 1, 0).unwrap().halving.result.value, 0.0);
        assert!(matousek_color(&basis(4).neg(), 1, 0).is_err());
    }
}
