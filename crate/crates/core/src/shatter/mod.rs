//! Combinatorial dimension at scale `ε` for finite classes and their
//! absolute convex hulls, the packing-bound check for `{0,1}` systems and
//! the hereditary-discrepancy lower bound.
//!
//! A point set `T ⊂ ℝ^n` is read as a class of functions on `{0, …, n−1}`:
//! point `t` is the function `i ↦ t_i`.

mod lp;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chaining::packing_number;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{project, IndexSet, Metric, PointSet, TOL};

/// Largest index set accepted by [`is_shattered`] and dimension accepted by
/// [`vc_dim`].
pub const SHATTER_LIMIT: usize = 16;
/// Limits of [`hdisc_vc_lower`]: dimension and number of distinct points.
pub const HULL_DIM_LIMIT: usize = 8;
pub const HULL_POINT_LIMIT: usize = 6;
/// Default number of `δ` values in [`hdisc_vc_lower`].
pub const DELTA_GRID: usize = 20;

/// One term `sign · weight · t_point` of a convex combination over `T ∪ −T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullTerm {
    pub point: usize,
    pub sign: i8,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realizer {
    /// Index of a point of `T`.
    Point(usize),
    /// Convex weights over `T ∪ −T`.
    Hull(Vec<HullTerm>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternWitness {
    /// Bit `k` set means `indices[k]` lies in the pattern (above its level).
    pub pattern: u32,
    pub realizer: Realizer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShatterWitness {
    pub indices: IndexSet,
    pub eps: f64,
    /// Level `s_i` for each member of `indices`, in order.
    pub levels: Vec<f64>,
    /// One entry per pattern, ordered by `pattern`.
    pub assignment: Vec<PatternWitness>,
}

fn above(v: f64, s: f64, eps: f64) -> bool {
    v >= s + eps - TOL
}

fn below(v: f64, s: f64, eps: f64) -> bool {
    v <= s - eps + TOL
}

impl ShatterWitness {
    /// Values of the realizing function on `indices`, or `None` when the
    /// realizer is malformed (bad index, negative weight, weights not
    /// summing to one).
    fn realized(&self, t: &PointSet, r: &Realizer) -> Option<Vec<f64>> {
        let idx = self.indices.members();
        match r {
            Realizer::Point(p) => (*p < t.len()).then(|| idx.iter().map(|&i| t.point(*p)[i]).collect()),
            Realizer::Hull(terms) => {
                let mut f = vec![0.0; idx.len()];
                let mut total = 0.0;
                for term in terms {
                    if term.point >= t.len() || term.weight < 0.0 || term.sign.abs() != 1 {
                        return None;
                    }
                    total += term.weight;
                    let c = f64::from(term.sign) * term.weight;
                    for (x, &i) in f.iter_mut().zip(idx) {
                        *x += c * t.point(term.point)[i];
                    }
                }
                ((total - 1.0).abs() <= TOL).then_some(f)
            }
        }
    }

    /// Replays every pattern against the defining inequalities.
    pub fn validate(&self, t: &PointSet) -> bool {
        let k = self.indices.len();
        if self.levels.len() != k
            || self.assignment.len() != 1usize << k
            || self.indices.members().iter().any(|&i| i >= t.dim())
        {
            return false;
        }
        self.assignment.iter().enumerate().all(|(p, w)| {
            w.pattern as usize == p
                && self.realized(t, &w.realizer).is_some_and(|f| {
                    f.iter().zip(&self.levels).enumerate().all(|(b, (&v, &s))| {
                        if p >> b & 1 == 1 {
                            above(v, s, self.eps)
                        } else {
                            below(v, s, self.eps)
                        }
                    })
                })
        })
    }
}

fn sorted_distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Candidate levels for one coordinate: `v ± ε` and midpoints of
/// consecutive values, keeping only levels with some value on each side.
fn level_candidates(values: &[f64], eps: f64) -> Vec<f64> {
    let v = sorted_distinct(values.to_vec());
    let mut c: Vec<f64> = v.iter().flat_map(|&x| [x - eps, x + eps]).collect();
    c.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    sorted_distinct(c)
        .into_iter()
        .filter(|&s| v.iter().any(|&x| above(x, s, eps)) && v.iter().any(|&x| below(x, s, eps)))
        .collect()
}

/// Depth-first search over levels, one coordinate at a time. `codes[p]`
/// is the pattern point `p` realizes on the coordinates fixed so far, or
/// `None` once it falls inside some margin band. A branch survives only
/// while all `2^depth` prefix patterns are realized.
fn search_levels(
    cols: &[Vec<f64>],
    cands: &[Vec<f64>],
    eps: f64,
    depth: usize,
    codes: &[Option<u32>],
    levels: &mut Vec<f64>,
) -> Option<Vec<Option<u32>>> {
    if depth == cols.len() {
        return Some(codes.to_vec());
    }
    let want = 1usize << (depth + 1);
    let mut seen = vec![false; want];
    for &s in &cands[depth] {
        seen.iter_mut().for_each(|x| *x = false);
        let next: Vec<Option<u32>> = codes
            .iter()
            .zip(&cols[depth])
            .map(|(c, &v)| {
                let c = (*c)?;
                if above(v, s, eps) {
                    Some(c | 1 << depth)
                } else if below(v, s, eps) {
                    Some(c)
                } else {
                    None
                }
            })
            .collect();
        let mut count = 0;
        for c in next.iter().flatten() {
            if !seen[*c as usize] {
                seen[*c as usize] = true;
                count += 1;
            }
        }
        if count < want {
            continue;
        }
        levels.push(s);
        if let Some(done) = search_levels(cols, cands, eps, depth + 1, &next, levels) {
            return Some(done);
        }
        levels.pop();
    }
    None
}

fn finite_witness(t: &PointSet, idx: &IndexSet, eps: f64) -> Option<ShatterWitness> {
    let k = idx.len();
    let keep = project(t, idx).ok()?.distinct_indices();
    if keep.len() < 1usize << k {
        return None;
    }
    let cols: Vec<Vec<f64>> = idx
        .members()
        .iter()
        .map(|&i| keep.iter().map(|&p| t.point(p)[i]).collect())
        .collect();
    let cands: Vec<Vec<f64>> = cols.iter().map(|c| level_candidates(c, eps)).collect();
    let mut levels = Vec::with_capacity(k);
    let codes = search_levels(&cols, &cands, eps, 0, &vec![Some(0); keep.len()], &mut levels)?;
    let mut first = vec![usize::MAX; 1 << k];
    for (c, &p) in codes.iter().zip(&keep) {
        if let Some(c) = c {
            first[*c as usize] = first[*c as usize].min(p);
        }
    }
    let assignment = first
        .into_iter()
        .enumerate()
        .map(|(pattern, p)| PatternWitness {
            pattern: pattern as u32,
            realizer: Realizer::Point(p),
        })
        .collect();
    Some(ShatterWitness {
        indices: idx.clone(),
        eps,
        levels,
        assignment,
    })
}

/// Convex weights over `T ∪ −T` whose combination `f` satisfies
/// `±f_i ≥ ε` on `indices` with signs given by `pattern`.
fn hull_pattern(
    pts: &[(usize, i8, Vec<f64>)],
    k: usize,
    pattern: u32,
    eps: f64,
) -> Option<Vec<HullTerm>> {
    let cols = pts.len() + k;
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|b| {
            let sigma = if pattern >> b & 1 == 1 { 1.0 } else { -1.0 };
            let mut row: Vec<f64> = pts.iter().map(|(_, _, f)| sigma * f[b]).collect();
            row.resize(cols, 0.0);
            row[pts.len() + b] = -1.0;
            row
        })
        .collect();
    let mut simplex_row = vec![1.0; pts.len()];
    simplex_row.resize(cols, 0.0);
    a.push(simplex_row);
    let mut b = vec![eps; k];
    b.push(1.0);
    let x = lp::feasible_point(&a, &b, cols)?;
    let total: f64 = x[..pts.len()].iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(
        pts.iter()
            .zip(&x)
            .filter(|(_, &w)| w > 0.0)
            .map(|((p, sign, _), &w)| HullTerm {
                point: *p,
                sign: *sign,
                weight: w / total,
            })
            .collect(),
    )
}

/// By symmetry of `absconv(T)` the levels may be taken to be zero: if
/// `f_P` realizes `P` around `s` then `(f_P − f_{P^c})/2` realizes `P`
/// around `0`. Negating a witness for `P` gives one for `P^c`, so only
/// patterns with the top bit clear are solved.
fn hull_witness(t: &PointSet, idx: &IndexSet, eps: f64) -> Option<ShatterWitness> {
    let k = idx.len();
    let proj = project(t, idx).ok()?;
    let mut pts: Vec<(usize, i8, Vec<f64>)> = Vec::new();
    for p in proj.distinct_indices() {
        for sign in [1i8, -1] {
            let f: Vec<f64> = proj.point(p).iter().map(|&x| f64::from(sign) * x).collect();
            if !pts.iter().any(|(_, _, g)| *g == f) {
                pts.push((p, sign, f));
            }
        }
    }
    let half = 1u32 << (k - 1);
    let solved: Option<Vec<Vec<HullTerm>>> = (0..half)
        .into_par_iter()
        .map(|pattern| hull_pattern(&pts, k, pattern, eps))
        .collect();
    let mask = (1u32 << k) - 1;
    let mut assignment: Vec<Option<PatternWitness>> = vec![None; 1 << k];
    for (p, terms) in solved?.into_iter().enumerate() {
        let p = p as u32;
        let negated = terms.iter().map(|h| HullTerm { sign: -h.sign, ..h.clone() }).collect();
        assignment[(p ^ mask) as usize] = Some(PatternWitness {
            pattern: p ^ mask,
            realizer: Realizer::Hull(negated),
        });
        assignment[p as usize] = Some(PatternWitness {
            pattern: p,
            realizer: Realizer::Hull(terms),
        });
    }
    Some(ShatterWitness {
        indices: idx.clone(),
        eps,
        levels: vec![0.0; k],
        assignment: assignment.into_iter().collect::<Option<Vec<_>>>()?,
    })
}

/// A witness that `indices` is `ε`-shattered by `T` (or by `absconv(T)`
/// when `hull`), if one exists. Every returned witness has been replayed.
pub fn is_shattered(
    t: &PointSet,
    indices: &IndexSet,
    eps: f64,
    hull: bool,
) -> Result<Option<ShatterWitness>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("shattering scale must be positive, got {eps}")));
    }
    if indices.is_empty() {
        return Err(Error::Invalid("index set must be nonempty".into()));
    }
    if indices.len() > SHATTER_LIMIT {
        return Err(Error::size("is_shattered index set", indices.len(), SHATTER_LIMIT));
    }
    if let Some(&bad) = indices.members().iter().find(|&&i| i >= t.dim()) {
        return Err(Error::Bounds { index: bad, dim: t.dim() });
    }
    let w = if hull {
        hull_witness(t, indices, eps)
    } else {
        finite_witness(t, indices, eps)
    };
    // A witness that fails replay is numerically marginal; report none.
    Ok(w.filter(|w| w.validate(t)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VcResult {
    pub dim: usize,
    /// Witness for a largest shattered set (`None` when `dim = 0`).
    pub witness: Option<ShatterWitness>,
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..items.len() {
            if items.len() - j < k - cur.len() {
                break;
            }
            cur.push(items[j]);
            go(items, k, j + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

/// `VC(T, ε)`, or `VC(absconv(T), ε)` when `hull`: the largest shattered
/// index set, searched largest-first. Only coordinates that can be
/// shattered alone are considered, and in finite mode `2^k ≤ |T|`.
pub fn vc_dim(t: &PointSet, eps: f64, hull: bool) -> Result<VcResult> {
    let n = t.dim();
    if n > SHATTER_LIMIT {
        return Err(Error::size("vc_dim dimension", n, SHATTER_LIMIT));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("shattering scale must be positive, got {eps}")));
    }
    let eligible: Vec<usize> = (0..n)
        .filter(|&i| {
            let col = t.column(i);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            if hull {
                hi.max(-lo) >= eps - TOL
            } else {
                hi - lo >= 2.0 * eps - 2.0 * TOL
            }
        })
        .collect();
    let mut top = eligible.len();
    if !hull {
        let distinct = t.distinct_indices().len();
        top = top.min(distinct.ilog2() as usize);
    }
    for k in (1..=top).rev() {
        let found = combinations(&eligible, k).into_par_iter().find_map_first(|c| {
            let idx = IndexSet::new(c, n).ok()?;
            is_shattered(t, &idx, eps, hull).ok().flatten()
        });
        if let Some(w) = found {
            return Ok(VcResult {
                dim: k,
                witness: Some(w),
            });
        }
    }
    Ok(VcResult {
        dim: 0,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausslerRow {
    pub indices: IndexSet,
    pub eps: f64,
    pub packing: usize,
    pub exact: bool,
    /// `D · (ε / √|I|)^{2d}`.
    pub implied: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausslerReport {
    pub d: usize,
    /// `VC(T, 1/2)` when the dimension allows computing it.
    pub vc_measured: Option<usize>,
    /// The measured dimension exceeds the declared `d`.
    pub violation: bool,
    /// Largest implied constant over all rows.
    pub implied_constant: f64,
    pub rows: Vec<HausslerRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausslerOptions {
    /// Random index sets sampled in addition to the full set.
    pub subsets: usize,
    /// `ε` runs over `j/steps · √|I|` for `j = 1..=steps`.
    pub steps: usize,
    pub seed: u64,
}

impl Default for HausslerOptions {
    fn default() -> Self {
        HausslerOptions {
            subsets: 32,
            steps: 10,
            seed: 0,
        }
    }
}

/// Packing numbers of coordinate projections of a `{0,1}` system against
/// the bound `c(d) (√|I|/ε)^{2d}`, reporting the implied `c(d)`.
pub fn haussler_check(t: &PointSet, d: usize, opts: &HausslerOptions) -> Result<HausslerReport> {
    if t.as_flat().iter().any(|&x| x != 0.0 && x != 1.0) {
        return Err(Error::Domain("haussler_check needs a {0,1} system".into()));
    }
    if opts.steps == 0 {
        return Err(Error::Domain("haussler_check needs at least one eps step".into()));
    }
    let n = t.dim();
    let vc_measured = if n <= SHATTER_LIMIT {
        Some(vc_dim(t, 0.5, false)?.dim)
    } else {
        None
    };
    let mut sets = vec![IndexSet::full(n)];
    for j in 0..opts.subsets {
        let mut r = rng::stream(opts.seed, j as u64);
        let size = r.random_range(1..=n);
        sets.push(IndexSet::new(rng::random_subset(&mut r, n, size), n)?);
    }
    let rows: Vec<HausslerRow> = sets
        .par_iter()
        .map(|idx| -> Result<Vec<HausslerRow>> {
            let proj = project(t, idx)?;
            let root = (idx.len() as f64).sqrt();
            Ok((1..=opts.steps)
                .map(|j| {
                    let eps = j as f64 / opts.steps as f64 * root;
                    let c = packing_number(&proj, eps, &Metric::Euclidean);
                    HausslerRow {
                        indices: idx.clone(),
                        eps,
                        packing: c.value,
                        exact: c.exact,
                        implied: c.value as f64 * (eps / root).powi(2 * d as i32),
                    }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let implied_constant = rows.iter().map(|r| r.implied).fold(0.0, f64::max);
    Ok(HausslerReport {
        d,
        vc_measured,
        violation: vc_measured.is_some_and(|v| v > d),
        implied_constant,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VcLowerBound {
    /// `max_δ δ · VC(absconv(T), δ)` over the grid.
    pub value: f64,
    /// The maximising `δ` and dimension (`None` when every dimension is 0).
    pub delta: Option<f64>,
    pub vc: usize,
    /// `(δ, VC(absconv(T), δ))` for every grid point.
    pub profile: Vec<(f64, usize)>,
}

/// `sup_δ δ · VC(absconv(T), δ)` over `grid`, a lower bound on `Hdisc(T)`.
/// The default grid is `j/20 · max_{t,i} |t_i|` for `j = 1..=20`.
pub fn hdisc_vc_lower(t: &PointSet, grid: Option<&[f64]>) -> Result<VcLowerBound> {
    if t.dim() > HULL_DIM_LIMIT {
        return Err(Error::size("hdisc_vc_lower dimension", t.dim(), HULL_DIM_LIMIT));
    }
    let distinct = t.dedup();
    if distinct.len() > HULL_POINT_LIMIT {
        return Err(Error::size("hdisc_vc_lower point count", distinct.len(), HULL_POINT_LIMIT));
    }
    let top = t.max_abs();
    let grid: Vec<f64> = match grid {
        Some(g) => {
            if let Some(bad) = g.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::Domain(format!("grid values must be positive, got {bad}")));
            }
            g.to_vec()
        }
        None if top == 0.0 => Vec::new(),
        None => (1..=DELTA_GRID).map(|j| j as f64 / DELTA_GRID as f64 * top).collect(),
    };
    let mut profile = Vec::with_capacity(grid.len());
    let mut best = VcLowerBound {
        value: 0.0,
        delta: None,
        vc: 0,
        profile: Vec::new(),
    };
    for &delta in &grid {
        let vc = vc_dim(&distinct, delta, true)?.dim;
        profile.push((delta, vc));
        let v = delta * vc as f64;
        if v > best.value {
            best.value = v;
            best.delta = Some(delta);
            best.vc = vc;
        }
    }
    best.profile = profile;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::hdisc_exact;

    fn set(rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::new(rows).unwrap()
    }

    fn cube(n: usize) -> PointSet {
        set((0..1u32 << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { 1.0 } else { -1.0 }).collect())
            .collect())
    }

    fn random_box(seed: u64, m: usize, n: usize) -> PointSet {
        let mut r = rng::stream(seed, 61);
        set((0..m)
            .map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect())
            .collect())
    }

    fn random_binary(seed: u64, m: usize, n: usize) -> PointSet {
        let mut r = rng::stream(seed, 62);
        set((0..m)
            .map(|_| (0..n).map(|_| if r.random::<bool>() { 1.0 } else { 0.0 }).collect())
            .collect())
    }

    // Classical VC dimension by counting traces on every subset.
    fn vc_by_traces(t: &PointSet) -> usize {
        let n = t.dim();
        (0u32..1 << n)
            .filter(|&mask| {
                let mut traces: Vec<u32> = t
                    .iter()
                    .map(|p| (0..n).filter(|&i| mask >> i & 1 == 1 && p[i] == 1.0).fold(0, |a, i| a | 1 << i))
                    .collect();
                traces.sort_unstable();
                traces.dedup();
                traces.len() == 1 << mask.count_ones()
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn examples() {
        for n in 1..=4 {
            let c = cube(n);
            let w = is_shattered(&c, &IndexSet::full(n), 1.0, false).unwrap().unwrap();
            assert!(w.levels.iter().all(|&s| s.abs() < 1e-12));
            assert_eq!(vc_dim(&c, 1.0, false).unwrap().dim, n);
        }
        let t = set(vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
        let w = is_shattered(&t, &IndexSet::new(vec![0], 2).unwrap(), 1.0, false).unwrap().unwrap();
        assert!((w.levels[0] - 1.0).abs() < 1e-12);
        assert!(is_shattered(&t, &IndexSet::full(2), 1.0, false).unwrap().is_none());
        assert_eq!(vc_dim(&t, 1.0, false).unwrap().dim, 1);
        assert_eq!(vc_dim(&t, 1.01, false).unwrap().dim, 0);
    }

    #[test]
    fn errors() {
        let t = set(vec![vec![0.0; 17]]);
        assert!(matches!(vc_dim(&t, 1.0, false), Err(Error::Size { .. })));
        assert!(matches!(
            is_shattered(&t, &IndexSet::full(17), 1.0, false),
            Err(Error::Size { .. })
        ));
        assert!(vc_dim(&set(vec![vec![0.0]]), 0.0, false).is_err());
        assert!(hdisc_vc_lower(&set(vec![vec![0.0; 9]]), None).is_err());
    }

    #[test]
    fn witnesses_replay_and_tampering_fails() {
        let c = cube(3);
        for hull in [false, true] {
            let w = is_shattered(&c, &IndexSet::full(3), 0.5, hull).unwrap().unwrap();
            assert!(w.validate(&c));
            let mut bad = w.clone();
            bad.levels[0] += 2.0;
            assert!(!bad.validate(&c));
        }
    }

    #[test]
    fn hull_shatters_more_than_finite_class() {
        // {e_1, e_2}: the class cannot realise (+,+) but the hull of ±e_i
        // realises all four patterns at scale 1/2 and none at scale 0.51.
        let t = set(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(vc_dim(&t, 0.5, false).unwrap().dim, 1);
        assert_eq!(vc_dim(&t, 0.5, true).unwrap().dim, 2);
        assert_eq!(vc_dim(&t, 0.51, true).unwrap().dim, 1);
    }

    #[test]
    fn binary_classes_match_trace_counting() {
        for seed in 0..25 {
            let n = 2 + seed as usize % 5;
            let t = random_binary(seed, 3 + seed as usize % 8, n);
            assert_eq!(vc_dim(&t, 0.5, false).unwrap().dim, vc_by_traces(&t), "seed {seed}");
        }
    }

    #[test]
    fn monotone_in_eps_and_hull_dominates() {
        for seed in 0..10 {
            let t = random_box(seed, 6, 4);
            let mut last = usize::MAX;
            for j in 1..=8 {
                let eps = j as f64 * 0.12;
                let f = vc_dim(&t, eps, false).unwrap().dim;
                let h = vc_dim(&t, eps, true).unwrap().dim;
                assert!(f <= last);
                assert!(h >= f);
                last = f;
            }
        }
    }

    #[test]
    fn hdisc_dominates_vc_lower_bound() {
        let sq = cube(2);
        let lb = hdisc_vc_lower(&sq, None).unwrap();
        assert_eq!(lb.value, 2.0);
        assert_eq!(hdisc_exact(&sq).unwrap().value, 2.0);
        assert_eq!(hdisc_vc_lower(&set(vec![vec![0.0; 3]]), None).unwrap().value, 0.0);
        for seed in 0..8 {
            let t = random_box(seed + 70, 4, 4);
            let lb = hdisc_vc_lower(&t, None).unwrap();
            assert!(hdisc_exact(&t).unwrap().value >= lb.value, "seed {seed}");
        }
    }

    #[test]
    fn haussler_reports() {
        let single = set(vec![vec![1.0, 0.0, 1.0]]);
        let r = haussler_check(&single, 1, &HausslerOptions::default()).unwrap();
        assert!(r.rows.iter().all(|row| row.packing == 1));
        assert!(r.implied_constant <= 1.0);
        let c = set((0..8u32)
            .map(|m| (0..3).map(|i| f64::from(m >> i & 1)).collect())
            .collect());
        let r = haussler_check(&c, 1, &HausslerOptions::default()).unwrap();
        assert_eq!(r.vc_measured, Some(3));
        assert!(r.violation);
        assert!(haussler_check(&cube(2), 1, &HausslerOptions::default()).is_err());
    }
}
