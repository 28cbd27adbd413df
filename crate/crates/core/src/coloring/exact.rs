//! Exhaustive discrepancy and hereditary discrepancy.

use rayon::prelude::*;
use serde::Serialize;

use super::DiscResult;
use crate::error::{Error, Result};
use crate::space::{project, sup_signed_sum, Coloring, IndexSet, PointSet};

/// Largest dimension accepted by [`disc_exact`].
pub const DISC_LIMIT: usize = 24;
/// Largest dimension accepted by [`hdisc_exact`].
pub const HDISC_LIMIT: usize = 16;

/// Gray-code steps run between exact recomputations of the partial sums.
const INNER_BITS: u32 = 12;

/// Column-major view: `col(j)[p]` is coordinate `j` of point `p`.
#[derive(Debug, Clone)]
pub(crate) struct Columns {
    pub m: usize,
    data: Vec<f64>,
}

impl Columns {
    pub fn new(t: &PointSet, coords: &[usize]) -> Self {
        let m = t.len();
        let mut data = Vec::with_capacity(m * coords.len());
        for &j in coords {
            data.extend(t.iter().map(|p| p[j]));
        }
        Columns { m, data }
    }

    pub fn all(t: &PointSet) -> Self {
        Columns::new(t, &(0..t.dim()).collect::<Vec<_>>())
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn len(&self) -> usize {
        if self.m == 0 {
            0
        } else {
            self.data.len() / self.m
        }
    }
}

fn sup_abs(s: &[f64]) -> f64 {
    s.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Best sign pattern over the `inner` low bits with the high bits fixed.
/// Bit `j` set means `ε_j = −1`.
fn scan_block(cols: &Columns, acc: &[f64], high: u64, inner: u32) -> (f64, u64) {
    let mut s = acc.to_vec();
    for j in 0..cols.len() {
        let sign = if high >> j & 1 == 1 { -1.0 } else { 1.0 };
        for (x, c) in s.iter_mut().zip(cols.col(j)) {
            *x += sign * c;
        }
    }
    let mut best = sup_abs(&s);
    let mut best_mask = high;
    for k in 1u64..(1u64 << inner) {
        let j = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let step = if gray >> j & 1 == 1 { -2.0 } else { 2.0 };
        for (x, c) in s.iter_mut().zip(cols.col(j)) {
            *x += step * c;
        }
        if s.iter().all(|x| x.abs() < best) {
            best = sup_abs(&s);
            best_mask = high | gray;
        }
    }
    (best, best_mask)
}

/// `min_ε sup_p |acc_p + Σ_j ε_j col_j[p]|` by enumeration. With
/// `symmetric` the last column is fixed to `+1`, which is lossless when
/// `acc = 0`. Ties resolve to the smallest mask among block winners.
pub(crate) fn min_sup(cols: &Columns, acc: &[f64], symmetric: bool) -> (f64, u64) {
    let free = (cols.len() - usize::from(symmetric && cols.len() > 0)) as u32;
    let inner = free.min(INNER_BITS);
    let blocks = 1u64 << (free - inner);
    let pick = |a: (f64, u64), b: (f64, u64)| {
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    if blocks == 1 {
        return scan_block(cols, acc, 0, inner);
    }
    (0..blocks)
        .into_par_iter()
        .map(|b| scan_block(cols, acc, b << inner, inner))
        .reduce(|| (f64::INFINITY, u64::MAX), pick)
}

pub(crate) fn mask_to_signs(mask: u64, len: usize) -> Vec<i8> {
    (0..len).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect()
}

/// `disc(T)` by enumerating `2^{n−1}` sign vectors.
pub fn disc_exact(t: &PointSet) -> Result<DiscResult> {
    let n = t.dim();
    if n > DISC_LIMIT {
        return Err(Error::Size {
            what: "disc_exact dimension",
            size: n,
            limit: DISC_LIMIT,
            hint: "; use disc_heuristic",
        });
    }
    let distinct = t.dedup();
    let cols = Columns::all(&distinct);
    let (_, mask) = min_sup(&cols, &vec![0.0; distinct.len()], true);
    let coloring = Coloring::new(mask_to_signs(mask, n))?;
    let value = sup_signed_sum(t, &coloring)?;
    Ok(DiscResult {
        value,
        coloring,
        exact: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HdiscResult {
    pub value: f64,
    /// A maximising coordinate subset.
    pub subset: IndexSet,
    /// An optimal coloring of that projection.
    pub coloring: Coloring,
}

/// `max_{I ≠ ∅} disc(P_I T)` over all `2^n − 1` subsets.
pub fn hdisc_exact(t: &PointSet) -> Result<HdiscResult> {
    let n = t.dim();
    if n > HDISC_LIMIT {
        return Err(Error::size("hdisc_exact dimension", n, HDISC_LIMIT));
    }
    let distinct = t.dedup();
    let zeros = vec![0.0; distinct.len()];
    let (value, mask) = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| {
            let coords: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let (v, _) = min_sup(&Columns::new(&distinct, &coords), &zeros, true);
            (v, mask)
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    debug_assert!(value.is_finite());
    let subset = IndexSet::from_mask(mask, n);
    let best = disc_exact(&project(t, &subset)?)?;
    Ok(HdiscResult {
        value: best.value,
        subset,
        coloring: best.coloring,
    })
}
