//! Point sets, colorings, index sets and the coordinate metrics everything
//! else is built on.
//!
//! Coordinates are 0-indexed in this crate. The CLI and the file formats
//! speak 1-indexed coordinates; conversion happens at that boundary only
//! (see [`IndexSet::from_one_based`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for floating comparisons across the crate.
pub const TOL: f64 = 1e-9;

/// A finite set of points in `R^n`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::Invalid("point set must contain at least one point".into()))?;
        if dim == 0 {
            return Err(Error::Invalid("points must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid("point entries must be finite".into()));
            }
            data.extend_from_slice(p);
        }
        Ok(PointSet { dim, data })
    }

    /// Builds from a flat row-major buffer.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.is_empty() || data.len() % dim != 0 {
            return Err(Error::Invalid(format!(
                "flat buffer of length {} is not a nonempty multiple of dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("point entries must be finite".into()));
        }
        Ok(PointSet { dim, data })
    }

    /// The single point `0 in R^dim`.
    pub fn origin(dim: usize) -> Self {
        PointSet {
            dim: dim.max(1),
            data: vec![0.0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(|p| p.to_vec()).collect()
    }

    /// Indices of the first occurrence of each distinct point, in input order.
    pub fn distinct_indices(&self) -> Vec<usize> {
        let mut keep: Vec<usize> = Vec::new();
        'outer: for i in 0..self.len() {
            for &j in &keep {
                if self.point(i) == self.point(j) {
                    continue 'outer;
                }
            }
            keep.push(i);
        }
        keep
    }

    /// Canonical deduplicated view (first occurrences, input order).
    pub fn dedup(&self) -> PointSet {
        self.select(&self.distinct_indices())
    }

    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            data,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.iter().any(|q| q == p)
    }

    /// Returns this set with the origin appended if it is not already present,
    /// together with the origin's index.
    pub fn with_origin(&self) -> (PointSet, usize) {
        if let Some(i) = self.iter().position(|p| p.iter().all(|&x| x == 0.0)) {
            return (self.clone(), i);
        }
        let mut data = self.data.clone();
        data.extend(std::iter::repeat_n(0.0, self.dim));
        let idx = self.len();
        (
            PointSet {
                dim: self.dim,
                data,
            },
            idx,
        )
    }

    /// `T ∪ -T`.
    pub fn symmetrized(&self) -> PointSet {
        let mut data = self.data.clone();
        data.extend(self.data.iter().map(|x| -x));
        PointSet {
            dim: self.dim,
            data,
        }
    }

    /// Pointwise negation.
    pub fn neg(&self) -> PointSet {
        PointSet {
            dim: self.dim,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn diameter(&self, metric: &Metric) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                d = d.max(metric.distance(self.point(i), self.point(j)));
            }
        }
        d
    }

    /// Column `i` as an owned vector.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.iter().map(|p| p[i]).collect()
    }
}

/// A sign assignment in `{-1, 0, +1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring(Vec<i8>);

impl Coloring {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|e| !(-1..=1).contains(e)) {
            return Err(Error::Invalid("coloring entries must lie in {-1,0,1}".into()));
        }
        Ok(Coloring(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Coloring(vec![0; n])
    }

    pub fn all_plus(n: usize) -> Self {
        Coloring(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: i8) {
        debug_assert!((-1..=1).contains(&v));
        self.0[i] = v;
    }

    pub fn zero_count(&self) -> usize {
        self.0.iter().filter(|&&e| e == 0).count()
    }

    pub fn is_full(&self) -> bool {
        self.zero_count() == 0
    }

    /// Indices (0-based) of the uncolored coordinates.
    pub fn zero_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == 0).collect()
    }
}

/// Sorted set of distinct 0-based coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Validates `members` against dimension `n`; sorts and rejects duplicates.
    pub fn new(mut members: Vec<usize>, n: usize) -> Result<Self> {
        members.sort_unstable();
        if let Some(&bad) = members.iter().find(|&&i| i >= n) {
            return Err(Error::Bounds { index: bad, dim: n });
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("index set has duplicate members".into()));
        }
        if members.is_empty() {
            return Err(Error::Invalid("index set must be nonempty".into()));
        }
        Ok(IndexSet(members))
    }

    pub fn from_one_based(members: &[usize], n: usize) -> Result<Self> {
        let zero: Result<Vec<usize>> = members
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or(Error::Bounds { index: 0, dim: n })
            })
            .collect();
        IndexSet::new(zero?, n)
    }

    pub fn full(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    /// The explicitly empty index set.
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        IndexSet((0..n).filter(|&i| mask >> i & 1 == 1).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// Maps indices relative to this set (positions) to absolute coordinates.
    pub fn compose(&self, relative: &IndexSet) -> Result<IndexSet> {
        let members: Result<Vec<usize>> = relative
            .members()
            .iter()
            .map(|&r| {
                self.0.get(r).copied().ok_or(Error::Bounds {
                    index: r,
                    dim: self.len(),
                })
            })
            .collect();
        Ok(IndexSet(members?))
    }
}

/// The four coordinate metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    /// Euclidean scaled by `n^{-1/2}`.
    EmpiricalL2,
    Restricted(IndexSet),
    EmpiricalRestricted(IndexSet),
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Euclidean => euclid(a, b),
            Metric::EmpiricalL2 => euclid(a, b) / (a.len() as f64).sqrt(),
            Metric::Restricted(idx) => restricted(a, b, idx),
            Metric::EmpiricalRestricted(idx) => {
                restricted(a, b, idx) / (idx.len().max(1) as f64).sqrt()
            }
        }
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        let zero = vec![0.0; a.len()];
        self.distance(a, &zero)
    }

    /// Checks that restricted index sets fit dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Metric::Restricted(idx) | Metric::EmpiricalRestricted(idx) => {
                if idx.is_empty() {
                    return Err(Error::Invalid("restricted metric needs a nonempty index set".into()));
                }
                match idx.members().last() {
                    Some(&m) if m >= n => Err(Error::Bounds { index: m, dim: n }),
                    _ => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn restricted(a: &[f64], b: &[f64], idx: &IndexSet) -> f64 {
    idx.members()
        .iter()
        .map(|&i| (a[i] - b[i]) * (a[i] - b[i]))
        .sum::<f64>()
        .sqrt()
}

pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Neumaier-compensated summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Coordinate projection `{(t_i)_{i in I} : t in T}`, input order preserved.
pub fn project(t: &PointSet, idx: &IndexSet) -> Result<PointSet> {
    if let Some(&m) = idx.members().last() {
        if m >= t.dim() {
            return Err(Error::Bounds {
                index: m,
                dim: t.dim(),
            });
        }
    }
    if idx.is_empty() {
        return Err(Error::Invalid("cannot project onto an empty index set".into()));
    }
    let mut data = Vec::with_capacity(t.len() * idx.len());
    for p in t.iter() {
        data.extend(idx.members().iter().map(|&i| p[i]));
    }
    Ok(PointSet {
        dim: idx.len(),
        data,
    })
}

/// `Σ η_i t_i`, compensated.
pub fn signed_sum(t: &[f64], eta: &Coloring) -> Result<f64> {
    if t.len() != eta.len() {
        return Err(Error::LengthMismatch {
            expected: t.len(),
            got: eta.len(),
        });
    }
    Ok(compensated_sum(
        t.iter()
            .zip(eta.entries())
            .filter(|(_, &e)| e != 0)
            .map(|(x, &e)| f64::from(e) * x),
    ))
}

/// `sup_{t in T} |Σ η_i t_i|`.
pub fn sup_signed_sum(t: &PointSet, eta: &Coloring) -> Result<f64> {
    let mut best = 0.0f64;
    for p in t.iter() {
        best = best.max(signed_sum(p, eta)?.abs());
    }
    Ok(best)
}

/// Absolute values sorted in nonincreasing order.
pub fn rearrange_nonincreasing(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|a| a.abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Smallest `r` with `x ∈ r·W_m`, i.e. `max_j x*_j √j`.
pub fn weak_l2_radius(x: &[f64]) -> f64 {
    rearrange_nonincreasing(x)
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (j, v)| m.max(v * ((j + 1) as f64).sqrt()))
}

/// Whether `x*_j <= r/√j` for every `j` (tolerance [`TOL`]).
pub fn weak_l2_membership(x: &[f64], r: f64) -> bool {
    rearrange_nonincreasing(x)
        .iter()
        .enumerate()
        .all(|(j, v)| *v <= r / ((j + 1) as f64).sqrt() + TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(rows: &[&[f64]]) -> PointSet {
        PointSet::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn project_selects_coordinates() {
        let t = ps(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let p = project(&t, &IndexSet::from_one_based(&[2], 2).unwrap()).unwrap();
        assert_eq!(p.to_rows(), vec![vec![2.0], vec![4.0]]);
        assert_eq!(project(&t, &IndexSet::full(2)).unwrap(), t);

        let s = 1.0 / 3f64.sqrt();
        let t = ps(&[&[s, s, s], &[0.0, 0.0, 0.0]]);
        let p = project(&t, &IndexSet::from_one_based(&[1, 2], 3).unwrap()).unwrap();
        assert_eq!(p.to_rows(), vec![vec![s, s], vec![0.0, 0.0]]);
    }

    #[test]
    fn project_out_of_bounds() {
        let t = ps(&[&[1.0, 2.0]]);
        assert!(matches!(
            IndexSet::new(vec![2], 2),
            Err(Error::Bounds { index: 2, dim: 2 })
        ));
        let wide = IndexSet::full(3);
        assert!(matches!(project(&t, &wide), Err(Error::Bounds { .. })));
    }

    #[test]
    fn signed_sum_examples() {
        let eta = Coloring::new(vec![1, -1, 0]).unwrap();
        assert_eq!(signed_sum(&[1.0, 2.0, 3.0], &eta).unwrap(), -1.0);
        assert_eq!(signed_sum(&[5.0, -2.0, 9.0], &Coloring::zeros(3)).unwrap(), 0.0);
        let s = 1.0 / 3f64.sqrt();
        let v = signed_sum(&[s, s, s], &Coloring::all_plus(3)).unwrap();
        assert!((v - 3f64.sqrt()).abs() < 1e-15);
        assert!(signed_sum(&[1.0], &Coloring::zeros(2)).is_err());
    }

    #[test]
    fn rearrangement_and_weak_l2() {
        assert_eq!(rearrange_nonincreasing(&[-3.0, 1.0, 2.0]), vec![3.0, 2.0, 1.0]);
        assert_eq!(rearrange_nonincreasing(&[0.0, 0.0]), vec![0.0, 0.0]);
        let h = 0.5f64.sqrt();
        let t = 1.0 / 3f64.sqrt();
        assert_eq!(rearrange_nonincreasing(&[h, 1.0, t]), vec![1.0, h, t]);

        assert!(weak_l2_membership(&[1.0, h, t], 1.0));
        assert!(!weak_l2_membership(&[2.0, 0.0, 0.0], 1.0));
        assert!(weak_l2_membership(&[0.0, 0.0, 0.0], 0.0));
        assert!((weak_l2_radius(&[0.0, 3.0, -1.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_metric_scaling() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [0.0; 4];
        let e = Metric::Euclidean.distance(&a, &b);
        assert!((Metric::EmpiricalL2.distance(&a, &b) - e / 2.0).abs() < 1e-15);
        let idx = IndexSet::new(vec![1, 3], 4).unwrap();
        let r = Metric::Restricted(idx.clone()).distance(&a, &b);
        assert!((r - 20f64.sqrt()).abs() < 1e-12);
        let er = Metric::EmpiricalRestricted(idx).distance(&a, &b);
        assert!((er - r / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coloring_validation() {
        assert!(Coloring::new(vec![2]).is_err());
        let c = Coloring::new(vec![0, 1, 0, -1]).unwrap();
        assert_eq!(c.zero_count(), 2);
        assert!(!c.is_full());
        assert_eq!(c.zero_indices(), vec![0, 2]);
    }

    #[test]
    fn dedup_keeps_first_occurrences() {
        let t = ps(&[&[1.0], &[2.0], &[1.0], &[3.0]]);
        assert_eq!(t.distinct_indices(), vec![0, 1, 3]);
        assert!(PointSet::new(vec![vec![f64::NAN]]).is_err());
        assert!(PointSet::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    proptest! {
        #[test]
        fn nested_projection_composes(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 1..5),
            outer_mask in 1u64..64,
            inner_seed in any::<u64>(),
        ) {
            let t = PointSet::new(rows).unwrap();
            let outer = IndexSet::from_mask(outer_mask, 6);
            let k = outer.len();
            let mut inner_mask = inner_seed % (1u64 << k);
            if inner_mask == 0 { inner_mask = 1; }
            let inner = IndexSet::from_mask(inner_mask, k);
            let two_step = project(&project(&t, &outer).unwrap(), &inner).unwrap();
            let one_step = project(&t, &outer.compose(&inner).unwrap()).unwrap();
            prop_assert_eq!(two_step, one_step);
        }

        #[test]
        fn signed_sum_is_linear(
            t in prop::collection::vec(-10.0f64..10.0, 8),
            u in prop::collection::vec(-10.0f64..10.0, 8),
            signs in prop::collection::vec(-1i8..=1, 8),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let eta = Coloring::new(signs).unwrap();
            let comb: Vec<f64> = t.iter().zip(&u).map(|(x, y)| a * x + b * y).collect();
            let lhs = signed_sum(&comb, &eta).unwrap();
            let rhs = a * signed_sum(&t, &eta).unwrap() + b * signed_sum(&u, &eta).unwrap();
            let scale = 1.0 + comb.iter().map(|x| x.abs()).sum::<f64>();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn weak_l2_monotone_in_radius(
            x in prop::collection::vec(-3.0f64..3.0, 1..10),
            r in 0.0f64..5.0,
            extra in 0.0f64..5.0,
        ) {
            if weak_l2_membership(&x, r) {
                prop_assert!(weak_l2_membership(&x, r + extra));
            }
        }

        #[test]
        fn rearrangement_is_sorted_permutation(x in prop::collection::vec(-3.0f64..3.0, 0..12)) {
            let r = rearrange_nonincreasing(&x);
            prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
            let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
            a.sort_by(|p, q| q.total_cmp(p));
            prop_assert_eq!(a, r);
        }
    }
}
