//! Admissible sequences and the `γ_{2,s}` functionals they certify.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Metric, PointSet};

/// Largest deduplicated set accepted by the exhaustive builder.
pub const EXHAUSTIVE_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// Farthest-point traversal; level `s` keeps the first `min(|T|, 2^{2^s})` centres.
    GreedyPacking,
    /// Minimises `γ_{2,s0}` over all nested admissible sequences.
    Exhaustive { s0: usize },
}

/// Nested levels `T_0 ⊆ T_1 ⊆ … ⊆ T_{s_max} = T` with nearest-point maps.
///
/// Levels hold indices into the source point set. `proj[s][i]` is the index
/// of the point of `T_s` closest to point `i` (ties to the lowest index).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleSequence {
    levels: Vec<Vec<usize>>,
    proj: Vec<Vec<usize>>,
    metric: Metric,
    points: usize,
}

/// `2^{2^s}` for `s >= 1`, and 1 for `s = 0`; saturates.
pub fn level_cap(s: usize) -> usize {
    if s == 0 {
        return 1;
    }
    if s >= 6 {
        return usize::MAX;
    }
    1usize << (1usize << s)
}

/// Smallest `s` with `level_cap(s) >= size`.
pub fn depth_for(size: usize) -> usize {
    (0..).find(|&s| level_cap(s) >= size).unwrap()
}

impl AdmissibleSequence {
    /// Builds from explicit nested levels; the maps are recomputed.
    pub fn from_levels(t: &PointSet, metric: &Metric, levels: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("admissible sequence needs at least one level".into()));
        }
        if levels[0].len() != 1 {
            return Err(Error::Invalid("T_0 must have exactly one point".into()));
        }
        for (s, lvl) in levels.iter().enumerate() {
            if lvl.len() > level_cap(s) {
                return Err(Error::Invalid(format!(
                    "level {s} has {} points, cap {}",
                    lvl.len(),
                    level_cap(s)
                )));
            }
            if let Some(&bad) = lvl.iter().find(|&&i| i >= t.len()) {
                return Err(Error::Bounds {
                    index: bad,
                    dim: t.len(),
                });
            }
            if s > 0 && !levels[s - 1].iter().all(|i| lvl.contains(i)) {
                return Err(Error::Invalid(format!("level {s} does not contain level {}", s - 1)));
            }
        }
        let last = levels.last().unwrap();
        if last.len() != t.len() {
            return Err(Error::Invalid("final level must be the whole set".into()));
        }
        let proj = levels
            .iter()
            .map(|lvl| nearest_map(t, metric, lvl))
            .collect();
        Ok(AdmissibleSequence {
            levels,
            proj,
            metric: metric.clone(),
            points: t.len(),
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, s: usize) -> &[usize] {
        &self.levels[s.min(self.depth())]
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// `π_s(i)`; levels beyond the depth are the identity.
    pub fn pi(&self, s: usize, i: usize) -> usize {
        if s >= self.depth() {
            i
        } else {
            self.proj[s][i]
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    /// The point forming `T_0`.
    pub fn root(&self) -> usize {
        self.levels[0][0]
    }
}

fn nearest_map(t: &PointSet, metric: &Metric, level: &[usize]) -> Vec<usize> {
    let mut sorted = level.to_vec();
    sorted.sort_unstable();
    (0..t.len())
        .map(|i| {
            let mut best = sorted[0];
            let mut bd = f64::INFINITY;
            for &j in &sorted {
                let d = metric.distance(t.point(i), t.point(j));
                if d < bd {
                    bd = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Farthest-point order starting at `seed`; ties go to the lowest index.
fn farthest_point_order(t: &PointSet, metric: &Metric, seed: usize) -> Vec<usize> {
    let n = t.len();
    let mut order = vec![seed];
    let mut gap: Vec<f64> = (0..n)
        .map(|i| metric.distance(t.point(i), t.point(seed)))
        .collect();
    let mut used = vec![false; n];
    used[seed] = true;
    while order.len() < n {
        let mut next = usize::MAX;
        let mut far = -1.0;
        for i in 0..n {
            if !used[i] && gap[i] > far {
                far = gap[i];
                next = i;
            }
        }
        used[next] = true;
        order.push(next);
        for i in 0..n {
            let d = metric.distance(t.point(i), t.point(next));
            if d < gap[i] {
                gap[i] = d;
            }
        }
    }
    order
}

/// The point minimising its largest distance to the rest (lowest index on ties).
fn one_center(t: &PointSet, metric: &Metric) -> usize {
    let mut best = 0;
    let mut radius = f64::INFINITY;
    for i in 0..t.len() {
        let r = t
            .iter()
            .map(|q| metric.distance(t.point(i), q))
            .fold(0.0, f64::max);
        if r < radius {
            radius = r;
            best = i;
        }
    }
    best
}

fn levels_from_order(order: &[usize]) -> Vec<Vec<usize>> {
    let depth = depth_for(order.len());
    (0..=depth)
        .map(|s| order[..level_cap(s).min(order.len())].to_vec())
        .collect()
}

/// Greedy sequence whose traversal starts at `root` instead of the 1-centre.
pub fn build_rooted(t: &PointSet, metric: &Metric, root: usize) -> Result<AdmissibleSequence> {
    if root >= t.len() {
        return Err(Error::Bounds {
            index: root,
            dim: t.len(),
        });
    }
    metric.validate(t.dim())?;
    let order = farthest_point_order(t, metric, root);
    AdmissibleSequence::from_levels(t, metric, levels_from_order(&order))
}

/// Greedy sequence rooted at `root` whose level `s` keeps at most
/// `min(cap(s), 2^{2^s})` points; `cap` must be nondecreasing and positive.
pub fn build_capped(
    t: &PointSet,
    metric: &Metric,
    root: usize,
    cap: impl Fn(usize) -> usize,
) -> Result<AdmissibleSequence> {
    if root >= t.len() {
        return Err(Error::Bounds {
            index: root,
            dim: t.len(),
        });
    }
    metric.validate(t.dim())?;
    let order = farthest_point_order(t, metric, root);
    let mut levels = vec![vec![root]];
    while levels.last().unwrap().len() < order.len() {
        let s = levels.len();
        let size = cap(s).max(1).min(level_cap(s)).min(order.len());
        levels.push(order[..size].to_vec());
    }
    AdmissibleSequence::from_levels(t, metric, levels)
}

pub fn build_admissible(
    t: &PointSet,
    metric: &Metric,
    strategy: Strategy,
) -> Result<AdmissibleSequence> {
    metric.validate(t.dim())?;
    match strategy {
        Strategy::GreedyPacking => build_rooted(t, metric, one_center(t, metric)),
        Strategy::Exhaustive { s0 } => build_exhaustive(t, metric, s0),
    }
}

fn build_exhaustive(t: &PointSet, metric: &Metric, s0: usize) -> Result<AdmissibleSequence> {
    let reps = t.distinct_indices();
    let m = reps.len();
    if m > EXHAUSTIVE_LIMIT {
        return Err(Error::size("exhaustive admissible search", m, EXHAUSTIVE_LIMIT));
    }
    let all: Vec<usize> = (0..t.len()).collect();
    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
    let mut consider = |levels: Vec<Vec<usize>>| -> Result<()> {
        let seq = AdmissibleSequence::from_levels(t, metric, levels)?;
        let cost = gamma2(t, metric, s0, &seq)?;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, seq.levels));
        }
        Ok(())
    };
    // Once every distinct point is present, pad with copies until the cap
    // admits the full (possibly duplicated) index list.
    let finish = |mut levels: Vec<Vec<usize>>| {
        if levels.last().map(Vec::len) != Some(all.len()) {
            while level_cap(levels.len()) < all.len() {
                let last = levels.last().unwrap().clone();
                levels.push(last);
            }
            levels.push(all.clone());
        }
        levels
    };
    for &root in &reps {
        if m <= 4 {
            let mut lvl1 = vec![root];
            lvl1.extend(reps.iter().copied().filter(|&r| r != root));
            let levels = if m == 1 { vec![vec![root]] } else { vec![vec![root], lvl1] };
            consider(finish(levels))?;
            continue;
        }
        // |T_1| ≤ 4 must contain the root; T_2 holds every distinct point.
        let others: Vec<usize> = reps.iter().copied().filter(|&r| r != root).collect();
        for mask in 0u32..(1 << others.len()) {
            if mask.count_ones() != 3 {
                continue;
            }
            let mut lvl1 = vec![root];
            lvl1.extend((0..others.len()).filter(|i| mask >> i & 1 == 1).map(|i| others[i]));
            let mut lvl2 = lvl1.clone();
            lvl2.extend(reps.iter().copied().filter(|r| !lvl1.contains(r)));
            consider(finish(vec![vec![root], lvl1, lvl2]))?;
        }
    }
    let (_, levels) = best.expect("at least one candidate");
    AdmissibleSequence::from_levels(t, metric, levels)
}

/// `sup_{t∈T} Σ_{s=s0}^{s_max} 2^{s/2} d(t, T_s)` for the given sequence:
/// an upper bound on `γ_{2,s0}(T, d)`, exact over the searched family when
/// the sequence came from the exhaustive builder.
pub fn gamma2(t: &PointSet, metric: &Metric, s0: usize, seq: &AdmissibleSequence) -> Result<f64> {
    if seq.num_points() != t.len() {
        return Err(Error::LengthMismatch {
            expected: t.len(),
            got: seq.num_points(),
        });
    }
    let mut sup = 0.0f64;
    for i in 0..t.len() {
        let mut acc = 0.0;
        for s in s0..seq.depth() {
            let d = seq
                .level(s)
                .iter()
                .map(|&j| metric.distance(t.point(i), t.point(j)))
                .fold(f64::INFINITY, f64::min);
            acc += 2f64.powf(s as f64 / 2.0) * d;
        }
        sup = sup.max(acc);
    }
    Ok(sup)
}

/// Upper bound on `γ_{2,s}` for every `s` in `0..=depth`.
pub fn gamma2_profile(t: &PointSet, metric: &Metric, seq: &AdmissibleSequence) -> Result<Vec<f64>> {
    (0..=seq.depth()).map(|s| gamma2(t, metric, s, seq)).collect()
}

/// Minkowski sum `A + B` (point `i*|B| + j` is `a_i + b_j`) with the product
/// sequence `(A+B)_0 = {a_0 + b_0}`, `(A+B)_{r} = A_{r-1} + B_{r-1}`.
pub fn minkowski_product(
    a: &PointSet,
    seq_a: &AdmissibleSequence,
    b: &PointSet,
    seq_b: &AdmissibleSequence,
) -> Result<(PointSet, AdmissibleSequence)> {
    if a.dim() != b.dim() {
        return Err(Error::LengthMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let nb = b.len();
    let mut rows = Vec::with_capacity(a.len() * nb);
    for p in a.iter() {
        for q in b.iter() {
            rows.push(p.iter().zip(q).map(|(x, y)| x + y).collect());
        }
    }
    let sum = PointSet::new(rows)?;
    let top = seq_a.depth().max(seq_b.depth()) + 1;
    let mut levels = vec![vec![seq_a.root() * nb + seq_b.root()]];
    for r in 1..=top {
        let mut lvl: Vec<usize> = Vec::new();
        for &i in seq_a.level(r - 1) {
            for &j in seq_b.level(r - 1) {
                lvl.push(i * nb + j);
            }
        }
        // Keep T_{r-1} first so nesting is visible in the order too.
        let prev = levels.last().unwrap().clone();
        let mut ordered = prev.clone();
        ordered.extend(lvl.into_iter().filter(|x| !prev.contains(x)));
        levels.push(ordered);
    }
    while levels.len() >= 2 && levels[levels.len() - 2].len() == sum.len() {
        levels.pop();
    }
    let seq = AdmissibleSequence::from_levels(&sum, seq_a.metric(), levels)?;
    Ok((sum, seq))
}
