//! Entropy integrals over `ε`, evaluated exactly.
//!
//! `N(ε)` and `D(ε)` are piecewise constant with jumps only at pairwise
//! distances `0 = b_0 < b_1 < … < b_m = diam`. On `(b_j, b_{j+1}]` the open
//! covering number equals the closed-radius cover at `b_j`, and the packing
//! number equals the packing with separation strictly above `b_j`, so each
//! integral is a finite sum.

use serde::Serialize;

use super::covering::DistanceTable;
use crate::space::{Metric, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    /// False when some counting number came from the greedy bound.
    pub exact: bool,
}

fn integrate(
    t: &PointSet,
    metric: &Metric,
    count: impl Fn(&DistanceTable, f64) -> (usize, bool),
    integrand: impl Fn(usize) -> f64,
) -> IntegralResult {
    let table = DistanceTable::new(t, metric);
    let mut lower = 0.0;
    let mut value = 0.0;
    let mut exact = true;
    for b in table.breakpoints() {
        let (c, ex) = count(&table, lower);
        exact &= ex;
        value += (b - lower) * integrand(c);
        lower = b;
    }
    IntegralResult { value, exact }
}

/// `∫_0^{diam} √(log N(ε, T, ℓ₂)) dε`.
pub fn dudley_integral(t: &PointSet) -> IntegralResult {
    integrate(
        t,
        &Metric::Euclidean,
        |tab, r| {
            let c = tab.cover_closed(r);
            (c.value, c.exact)
        },
        |n| (n as f64).ln().sqrt(),
    )
}

/// The branch function `u(D)` with ambient dimension `n`.
pub fn u_branch(d: usize, n: usize) -> f64 {
    let (d, n) = (d as f64, n as f64);
    if d >= n {
        (std::f64::consts::E * d / n).ln().sqrt()
    } else {
        (-(n / d).sqrt() + 1.0).exp()
    }
}

/// `∫_0^{diam} u(D(ε, T, ℓ₂)) dε` with `n` the ambient dimension of `T`.
pub fn entropy_integral_u(t: &PointSet) -> IntegralResult {
    let n = t.dim();
    integrate(
        t,
        &Metric::Euclidean,
        |tab, r| {
            let c = tab.pack_above(r);
            (c.value, c.exact)
        },
        |d| u_branch(d, n),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumIntegralCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub hypotheses_hold: bool,
    pub holds: bool,
}

/// Compares `∫_{ε_m}^{ε_0} g + ε_m f(ε_m)` with `α Σ_{s≥1} f(ε_s) ε_{s−1}`
/// for step functions: `g` equals `g[s-1]` on `(ε_s, ε_{s−1}]` and
/// `f_at[s]` is `f(ε_s)`.
///
/// Hypotheses: `eps` strictly decreasing and nonnegative, `g` and `f`
/// nonincreasing and nonnegative, `g(ε_{s−1}) ≥ f(ε_s)` and
/// `f(ε_s) − f(ε_{s−1}) ≥ α f(ε_s)`.
pub fn sum_vs_integral(eps: &[f64], f_at: &[f64], g: &[f64], alpha: f64) -> SumIntegralCheck {
    assert!(eps.len() >= 2 && f_at.len() == eps.len() && g.len() + 1 == eps.len());
    let m = eps.len() - 1;
    let lhs: f64 = (1..=m).map(|s| g[s - 1] * (eps[s - 1] - eps[s])).sum::<f64>()
        + eps[m] * f_at[m];
    let rhs = alpha * (1..=m).map(|s| f_at[s] * eps[s - 1]).sum::<f64>();
    let hypotheses_hold = alpha > 0.0
        && eps.windows(2).all(|w| w[0] > w[1])
        && eps[m] >= 0.0
        && f_at.iter().chain(g).all(|&v| v >= 0.0)
        && f_at.windows(2).all(|w| w[0] <= w[1])
        && g.windows(2).all(|w| w[0] <= w[1])
        && (1..=m).all(|s| g[s - 1] >= f_at[s])
        && (1..=m).all(|s| f_at[s] - f_at[s - 1] >= alpha * f_at[s] - 1e-12);
    SumIntegralCheck {
        lhs,
        rhs,
        hypotheses_hold,
        holds: lhs >= rhs - 1e-9 * rhs.abs().max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn singleton_integrals_vanish() {
        let t = line(&[3.0]);
        assert_eq!(dudley_integral(&t).value, 0.0);
        assert_eq!(entropy_integral_u(&t).value, 0.0);
    }

    #[test]
    fn two_point_dudley() {
        let r = dudley_integral(&line(&[0.0, 1.0]));
        assert!(r.exact);
        assert!((r.value - 2f64.ln().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn u_branch_boundary() {
        assert!((u_branch(4, 4) - 1.0).abs() < 1e-15);
        assert!((u_branch(1, 4) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn separated_basis_hits_branch_boundary() {
        // n = 3 points pairwise √2 apart in ℝ³: D = 3 = n on (0, √2].
        let t = PointSet::new(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let r = entropy_integral_u(&t);
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
    }

    // Brute-force midpoint evaluation of the step integrands.
    fn dudley_by_midpoints(t: &PointSet) -> f64 {
        let tab = DistanceTable::new(t, &Metric::Euclidean);
        let mut bps = vec![0.0];
        bps.extend(tab.breakpoints());
        bps.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let n = super::super::covering::covering_number(t, mid, &Metric::Euclidean);
                (w[1] - w[0]) * (n.value as f64).ln().sqrt()
            })
            .sum()
    }

    #[test]
    fn dudley_matches_midpoint_oracle() {
        for seed in 0..10 {
            let mut r = rng::stream(seed, 3);
            let pts: Vec<Vec<f64>> = (0..8)
                .map(|_| (0..8).map(|_| r.random_range(-1.0..1.0)).collect())
                .collect();
            let t = PointSet::new(pts).unwrap();
            let d = dudley_integral(&t);
            assert!((d.value - dudley_by_midpoints(&t)).abs() < 1e-9);
            let u = entropy_integral_u(&t);
            // |T| = n keeps D ≤ n, hence u ≤ 1 on the whole range.
            assert!(u.value.is_finite() && u.value >= 0.0);
            assert!(u.value <= t.diameter(&Metric::Euclidean) + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sum_vs_integral_holds_under_hypotheses(
            steps in proptest::collection::vec(0.05f64..1.0, 2..6),
            growth in proptest::collection::vec(1.5f64..4.0, 2..6),
            slack in proptest::collection::vec(1.0f64..2.0, 2..6),
        ) {
            let m = steps.len().min(growth.len()).min(slack.len());
            let mut eps = vec![0.0];
            for s in &steps[..m] {
                let last = *eps.last().unwrap();
                eps.push(last + s);
            }
            eps.reverse();
            let mut f_at = vec![0.5];
            for gr in &growth[..m] {
                let last = *f_at.last().unwrap();
                f_at.push(last * gr);
            }
            let alpha = 1.0 - 1.0 / 1.5;
            let g: Vec<f64> = (1..=m).map(|s| f_at[s] * slack[s - 1]).collect();
            let mut g_sorted = g.clone();
            for i in 1..g_sorted.len() {
                g_sorted[i] = g_sorted[i].max(g_sorted[i - 1]);
            }
            let c = sum_vs_integral(&eps, &f_at, &g_sorted, alpha);
            prop_assert!(c.hypotheses_hold);
            prop_assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
        }
    }
}
