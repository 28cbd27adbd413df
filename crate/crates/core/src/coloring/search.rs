//! Random restarts and flip-based local search.

use rayon::prelude::*;

use super::exact::Columns;
use super::halving::spencer_color;
use super::DiscResult;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{sup_signed_sum, Coloring, PointSet};

#[inline]
fn pow8(x: f64) -> f64 {
    let x2 = x * x;
    let x4 = x2 * x2;
    x4 * x4
}

fn key(s: &[f64], scale: f64) -> (f64, f64) {
    s.iter().fold((0.0f64, 0.0f64), |(m, p), &x| {
        (m.max(x.abs()), p + pow8(x / scale))
    })
}

/// Coordinates `free[k]` and `free[k + d]` for `1 ≤ d ≤ PAIR_WINDOW` are
/// tried as simultaneous flips once single flips stall.
const PAIR_WINDOW: usize = 8;

struct Descent<'a> {
    cols: &'a Columns,
    scale: f64,
    max: f64,
    pow: f64,
}

impl Descent<'_> {
    /// Applies the move if it improves `(max_p |s_p|, Σ_p s_p^8)` lexicographically.
    fn try_move(&mut self, s: &mut [f64], signs: &mut [i8], moves: &[usize]) -> bool {
        let mut new_max = 0.0f64;
        let mut new_pow = 0.0;
        for p in 0..s.len() {
            let mut y = s[p];
            for &j in moves {
                y -= 2.0 * f64::from(signs[j]) * self.cols.col(j)[p];
            }
            new_max = new_max.max(y.abs());
            new_pow += pow8(y / self.scale);
        }
        if !(new_max < self.max || (new_max == self.max && new_pow < self.pow)) {
            return false;
        }
        for &j in moves {
            let step = -2.0 * f64::from(signs[j]);
            for (x, c) in s.iter_mut().zip(self.cols.col(j)) {
                *x += step * c;
            }
            signs[j] = -signs[j];
        }
        self.max = new_max;
        self.pow = new_pow;
        true
    }
}

/// First-improvement descent over single flips of the coordinates in
/// `free`, then over nearby pairs, minimising `(max_p |s_p|, Σ_p s_p^8)`
/// lexicographically. `s` holds the current sums and stays in sync with
/// `signs`.
pub(crate) fn polish(cols: &Columns, s: &mut [f64], signs: &mut [i8], free: &[usize]) {
    if free.is_empty() || s.is_empty() {
        return;
    }
    let scale = s.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let (max, pow) = key(s, scale);
    let mut d = Descent { cols, scale, max, pow };
    loop {
        let mut stale = 0;
        let mut pos = 0;
        while stale < free.len() {
            if d.try_move(s, signs, &[free[pos]]) {
                stale = 0;
            } else {
                stale += 1;
            }
            pos = (pos + 1) % free.len();
        }
        let mut improved = false;
        for k in 0..free.len() {
            for j in free.iter().skip(k + 1).take(PAIR_WINDOW) {
                if signs[free[k]] != signs[*j] {
                    improved |= d.try_move(s, signs, &[free[k], *j]);
                }
            }
        }
        if !improved {
            return;
        }
    }
}

pub(crate) fn sums(cols: &Columns, acc: &[f64], signs: &[i8], coords: &[usize]) -> Vec<f64> {
    let mut s = acc.to_vec();
    for &j in coords {
        let e = f64::from(signs[j]);
        for (x, c) in s.iter_mut().zip(cols.col(j)) {
            *x += e * c;
        }
    }
    s
}

/// Best of `restarts` polished random colorings of the coordinates in
/// `free`, on top of the partial sums `acc`. Restart `r` draws from
/// stream `(seed, r)`; ties go to the lowest restart.
pub(crate) fn best_of_restarts(
    cols: &Columns,
    acc: &[f64],
    free: &[usize],
    restarts: usize,
    seed: u64,
) -> (f64, Vec<i8>) {
    let n = cols.len();
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut stream = rng::stream(seed, r as u64);
            let draw = rng::random_signs(&mut stream, free.len());
            let mut signs = vec![0i8; n];
            for (&j, &e) in free.iter().zip(&draw) {
                signs[j] = e;
            }
            let mut s = sums(cols, acc, &signs, free);
            polish(cols, &mut s, &mut signs, free);
            let v = sums(cols, acc, &signs, free)
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            (v, r, signs)
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .map(|(v, _, s)| (v, s))
        .unwrap_or((f64::INFINITY, vec![0; n]))
}

/// Upper bound on `disc(T)`: the best of `budget` polished random restarts
/// and the polished output of [`spencer_color`].
pub fn disc_heuristic(t: &PointSet, budget: usize, seed: u64) -> Result<DiscResult> {
    if budget == 0 {
        return Err(Error::Domain("disc_heuristic needs budget >= 1".into()));
    }
    let distinct = t.dedup();
    let n = t.dim();
    let cols = Columns::all(&distinct);
    let zeros = vec![0.0; distinct.len()];
    let all: Vec<usize> = (0..n).collect();
    let (_, restart) = best_of_restarts(&cols, &zeros, &all, budget, seed);
    let mut best = Coloring::new(restart)?;
    let mut best_value = sup_signed_sum(&distinct, &best)?;

    let spencer = spencer_color(&distinct, seed)?;
    let mut signs = spencer.result.coloring.entries().to_vec();
    let mut s = sums(&cols, &zeros, &signs, &all);
    polish(&cols, &mut s, &mut signs, &all);
    let polished = Coloring::new(signs)?;
    let v = sup_signed_sum(&distinct, &polished)?;
    if v < best_value {
        best = polished;
        best_value = v;
    }
    let value = sup_signed_sum(t, &best)?;
    debug_assert!((value - best_value).abs() < 1e-9);
    Ok(DiscResult {
        value,
        coloring: best,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::disc_exact;
    use rand::Rng;

    fn random_box(seed: u64, m: usize, n: usize) -> PointSet {
        let mut r = rng::stream(seed, 31);
        PointSet::new(
            (0..m)
                .map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn polish_never_worsens() {
        for seed in 0..10 {
            let t = random_box(seed, 20, 30);
            let cols = Columns::all(&t);
            let all: Vec<usize> = (0..30).collect();
            let mut signs = rng::random_signs(&mut rng::stream(seed, 1), 30);
            let before = sup_signed_sum(&t, &Coloring::new(signs.clone()).unwrap()).unwrap();
            let mut s = sums(&cols, &vec![0.0; 20], &signs, &all);
            polish(&cols, &mut s, &mut signs, &all);
            let after = sup_signed_sum(&t, &Coloring::new(signs).unwrap()).unwrap();
            assert!(after <= before + 1e-12);
            let drift = s.iter().fold(0.0f64, |m, x| m.max(x.abs())) - after;
            assert!(drift.abs() < 1e-9);
        }
    }

    #[test]
    fn heuristic_is_an_upper_bound_and_deterministic() {
        for seed in 0..5 {
            let t = random_box(seed + 10, 8, 10);
            let h = disc_heuristic(&t, 64, seed).unwrap();
            let e = disc_exact(&t).unwrap();
            assert!(h.value >= e.value - 1e-12);
            assert!(!h.exact);
            assert!(h.coloring.is_full());
            assert_eq!(h, disc_heuristic(&t, 64, seed).unwrap());
        }
    }

    #[test]
    fn zero_set_has_zero_discrepancy() {
        let t = PointSet::new(vec![vec![0.0; 5]]).unwrap();
        assert_eq!(disc_heuristic(&t, 3, 1).unwrap().value, 0.0);
        assert!(disc_heuristic(&t, 0, 1).is_err());
    }
}
