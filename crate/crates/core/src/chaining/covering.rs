//! Covering, packing and entropy numbers over finite point sets.
//!
//! Balls are open and centred at points of `T` (proper covers). A set is
//! `ε`-separated when every pairwise distance is at least `ε`. Both
//! predicates use the crate tolerance and are exact complements of each
//! other, which is what makes `N(ε) ≤ D(ε) ≤ N(ε/2)` hold verbatim.

use serde::Serialize;

use crate::space::{Metric, PointSet, TOL};

/// Largest deduplicated set size handled by the exhaustive searches.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub value: usize,
    pub exact: bool,
    /// The greedy count (equal to `value` when `exact` is false).
    pub greedy: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyNumber {
    pub value: f64,
    pub exact: bool,
}

/// Pairwise distances among the distinct points of a set.
#[derive(Debug, Clone)]
pub(crate) struct DistanceTable {
    pub n: usize,
    pub d: Vec<f64>,
}

impl DistanceTable {
    pub fn new(t: &PointSet, metric: &Metric) -> Self {
        let reps = t.distinct_indices();
        let n = reps.len();
        let mut d = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let v = metric.distance(t.point(reps[a]), t.point(reps[b]));
                d[a * n + b] = v;
                d[b * n + a] = v;
            }
        }
        DistanceTable { n, d }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.n + b]
    }

    /// Distinct positive pairwise distances, ascending, merged within `TOL`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n)
            .flat_map(|a| ((a + 1)..self.n).map(move |b| (a, b)))
            .map(|(a, b)| self.get(a, b))
            .filter(|&x| x > TOL)
            .collect();
        v.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::with_capacity(v.len());
        for x in v {
            match out.last() {
                Some(&last) if x - last <= TOL => {}
                _ => out.push(x),
            }
        }
        out
    }

    pub fn exact_feasible(&self) -> bool {
        self.n <= EXACT_LIMIT
    }

    /// Minimum number of centres (from the set) such that every point has a
    /// centre with `inside(d)`. Bitmask based; needs `n <= 64`.
    fn cover_count(&self, inside: impl Fn(f64) -> bool) -> CountResult {
        let n = self.n;
        let reach: Vec<u64> = (0..n)
            .map(|c| {
                (0..n)
                    .filter(|&p| p == c || inside(self.get(c, p)))
                    .fold(0u64, |m, p| m | (1 << p))
            })
            .collect();
        let greedy = greedy_cover(&reach, n);
        if !self.exact_feasible() {
            return CountResult {
                value: greedy,
                exact: false,
                greedy,
            };
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut union = vec![0u64; 1 << n];
        let mut best = n;
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            union[mask] = union[mask & (mask - 1)] | reach[low];
            if union[mask] == full {
                best = best.min(mask.count_ones() as usize);
            }
        }
        CountResult {
            value: best,
            exact: true,
            greedy,
        }
    }

    /// Cardinality of a maximal subset whose pairwise distances satisfy
    /// `separated(d)`; exact maximum when feasible. Needs `n <= 64`.
    fn pack_count(&self, separated: impl Fn(f64) -> bool) -> CountResult {
        let n = self.n;
        let conflict: Vec<u64> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a && !separated(self.get(a, b)))
                    .fold(0u64, |m, b| m | (1 << b))
            })
            .collect();
        let mut chosen = 0u64;
        let mut greedy = 0usize;
        for a in 0..n {
            if conflict[a] & chosen == 0 {
                chosen |= 1 << a;
                greedy += 1;
            }
        }
        if !self.exact_feasible() {
            return CountResult {
                value: greedy,
                exact: false,
                greedy,
            };
        }
        let mut independent = vec![false; 1 << n];
        independent[0] = true;
        let mut best = 0usize;
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            independent[mask] = independent[rest] && conflict[low] & rest as u64 == 0;
            if independent[mask] {
                best = best.max(mask.count_ones() as usize);
            }
        }
        CountResult {
            value: best,
            exact: true,
            greedy,
        }
    }
}

fn greedy_cover(reach: &[u64], n: usize) -> usize {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut covered = 0u64;
    let mut count = 0;
    while covered != full {
        let (best, _) = reach
            .iter()
            .enumerate()
            .map(|(c, r)| (c, (r & !covered).count_ones()))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        covered |= reach[best];
        count += 1;
    }
    count
}

/// Scan cover for large sets: the first uncovered point becomes a centre.
fn large_cover(table: &DistanceTable, inside: &dyn Fn(f64) -> bool) -> usize {
    let n = table.n;
    let mut covered = vec![false; n];
    let mut count = 0;
    for c in 0..n {
        if covered[c] {
            continue;
        }
        count += 1;
        for p in c..n {
            if !covered[p] && (p == c || inside(table.get(c, p))) {
                covered[p] = true;
            }
        }
    }
    count
}

fn large_pack(table: &DistanceTable, separated: &dyn Fn(f64) -> bool) -> usize {
    let mut chosen: Vec<usize> = Vec::new();
    for a in 0..table.n {
        if chosen.iter().all(|&b| separated(table.get(a, b))) {
            chosen.push(a);
        }
    }
    chosen.len()
}

impl DistanceTable {
    pub fn cover(&self, inside: impl Fn(f64) -> bool) -> CountResult {
        if self.n <= 64 {
            self.cover_count(inside)
        } else {
            let v = large_cover(self, &inside);
            CountResult {
                value: v,
                exact: false,
                greedy: v,
            }
        }
    }

    pub fn pack(&self, separated: impl Fn(f64) -> bool) -> CountResult {
        if self.n <= 64 {
            self.pack_count(separated)
        } else {
            let v = large_pack(self, &separated);
            CountResult {
                value: v,
                exact: false,
                greedy: v,
            }
        }
    }

    /// Covering number at the open radius just above `r`, i.e. closed radius `r`.
    pub fn cover_closed(&self, r: f64) -> CountResult {
        self.cover(|d| d <= r + TOL)
    }

    /// Packing number with separation strictly above `r`.
    pub fn pack_above(&self, r: f64) -> CountResult {
        self.pack(|d| d > r + TOL)
    }
}

pub(crate) fn separated(d: f64, eps: f64) -> bool {
    d >= eps - TOL
}

pub(crate) fn inside_open(d: f64, eps: f64) -> bool {
    d < eps - TOL
}

/// `D(ε, T, d)`: size of a maximal ε-separated subset. Exact (maximum) when
/// the deduplicated set has at most [`EXACT_LIMIT`] points, otherwise the
/// greedy count, which is itself a maximal separated set.
pub fn packing_number(t: &PointSet, eps: f64, metric: &Metric) -> CountResult {
    assert!(eps > 0.0, "packing radius must be positive");
    DistanceTable::new(t, metric).pack(|d| separated(d, eps))
}

/// `N(ε, T, d)` with open balls centred in `T`.
pub fn covering_number(t: &PointSet, eps: f64, metric: &Metric) -> CountResult {
    assert!(eps > 0.0, "covering radius must be positive");
    DistanceTable::new(t, metric).cover(|d| inside_open(d, eps))
}

/// `e_k = inf{ε : N(ε) ≤ 2^k}`, evaluated over the candidate radii
/// `{0} ∪ {pairwise distances}` at which `N` can change.
pub fn entropy_number(t: &PointSet, k: u32, metric: &Metric) -> EntropyNumber {
    let table = DistanceTable::new(t, metric);
    let target = if k >= 63 { usize::MAX } else { 1usize << k };
    let mut exact = true;
    let mut candidates = vec![0.0];
    candidates.extend(table.breakpoints());
    for r in candidates {
        let n = table.cover_closed(r);
        exact &= n.exact;
        if n.value <= target {
            return EntropyNumber { value: r, exact };
        }
    }
    unreachable!("a single ball of radius diam covers the set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn random_set(seed: u64, size: usize, dim: usize) -> PointSet {
        let mut r = rng::stream(seed, 0);
        PointSet::new(
            (0..size)
                .map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    // Brute force over every subset, independent of the mask DP.
    fn brute_pack(t: &PointSet, eps: f64) -> usize {
        let n = t.len();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let ok = idx.iter().all(|&a| {
                idx.iter().all(|&b| {
                    a == b || Metric::Euclidean.distance(t.point(a), t.point(b)) >= eps
                })
            });
            if ok {
                best = best.max(idx.len());
            }
        }
        best
    }

    fn brute_cover(t: &PointSet, eps: f64) -> usize {
        let n = t.len();
        let mut best = n;
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let ok = (0..n).all(|p| {
                idx.iter()
                    .any(|&c| Metric::Euclidean.distance(t.point(p), t.point(c)) < eps)
            });
            if ok {
                best = best.min(idx.len());
            }
        }
        best
    }

    #[test]
    fn small_examples() {
        let t = line(&[0.0, 1.0]);
        assert_eq!(packing_number(&t, 0.5, &Metric::Euclidean).value, 2);
        assert_eq!(covering_number(&t, 1.5, &Metric::Euclidean).value, 1);
        let single = line(&[3.0]);
        assert_eq!(packing_number(&single, 0.1, &Metric::Euclidean).value, 1);
        assert_eq!(covering_number(&single, 0.1, &Metric::Euclidean).value, 1);
    }

    #[test]
    fn entropy_numbers_on_two_points() {
        let single = line(&[3.0]);
        assert_eq!(entropy_number(&single, 0, &Metric::Euclidean).value, 0.0);
        let t = line(&[0.0, 1.0]);
        assert_eq!(entropy_number(&t, 0, &Metric::Euclidean).value, 1.0);
        assert_eq!(entropy_number(&t, 1, &Metric::Euclidean).value, 0.0);
    }

    #[test]
    fn exact_counts_match_brute_force() {
        for seed in 0..20 {
            let t = random_set(seed, 10, 3);
            for &eps in &[0.3, 0.6, 0.9, 1.4] {
                let p = packing_number(&t, eps, &Metric::Euclidean);
                let c = covering_number(&t, eps, &Metric::Euclidean);
                assert!(p.exact && c.exact);
                assert_eq!(p.value, brute_pack(&t, eps), "seed {seed} eps {eps}");
                assert_eq!(c.value, brute_cover(&t, eps), "seed {seed} eps {eps}");
                assert!(p.greedy <= p.value);
                assert!(c.greedy >= c.value);
            }
        }
    }

    #[test]
    fn sandwich_holds() {
        for seed in 100..140 {
            let t = random_set(seed, 9, 2);
            for &eps in &[0.2, 0.5, 0.8, 1.1, 2.0] {
                let n = covering_number(&t, eps, &Metric::Euclidean).value;
                let d = packing_number(&t, eps, &Metric::Euclidean).value;
                let n_half = covering_number(&t, eps / 2.0, &Metric::Euclidean).value;
                assert!(n <= d && d <= n_half, "seed {seed}: {n} {d} {n_half}");
            }
        }
    }

    #[test]
    fn large_sets_use_greedy() {
        let t = random_set(7, 80, 3);
        let p = packing_number(&t, 0.5, &Metric::Euclidean);
        let c = covering_number(&t, 0.5, &Metric::Euclidean);
        assert!(!p.exact && !c.exact);
        assert!(c.value <= p.value);
    }
}
