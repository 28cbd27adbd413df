//! Exact laws of Rademacher sums and the entropy of their quantization.
//!
//! `Z_a = Σ ε_i a_i` under uniform signs has a law with at most `2^n` atoms,
//! each with probability `count / 2^n`. Counts are carried as integers so
//! probabilities stay exactly dyadic. `W_a = sgn(Z_a)·⌊|Z_a|⌋`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{norm2, TOL};

/// Longest coefficient vector whose law is computed.
pub const LAW_LIMIT: usize = 24;

/// Atoms closer than this are merged.
const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Natural,
    Two,
}

impl Base {
    fn log(self, x: f64) -> f64 {
        match self {
            Base::Natural => x.ln(),
            Base::Two => x.log2(),
        }
    }
}

/// `Φ(t) = log(e/t)` on `(0, 1]` and `t·e^{1−t}` above 1.
pub fn phi(t: f64) -> Result<f64> {
    if !(t > 0.0) || t.is_nan() {
        return Err(Error::Domain(format!("phi needs t > 0, got {t}")));
    }
    Ok(if t <= 1.0 {
        1.0 - t.ln()
    } else {
        t * (1.0 - t).exp()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedSumLaw {
    /// Atoms in increasing order.
    pub values: Vec<f64>,
    /// Number of sign vectors landing on each atom.
    pub counts: Vec<u64>,
    /// `n`; the probabilities are `counts / 2^n`.
    pub log2_denominator: u32,
}

impl SignedSumLaw {
    pub fn probability(&self, i: usize) -> f64 {
        self.counts[i] as f64 / 2f64.powi(self.log2_denominator as i32)
    }

    pub fn support(&self) -> Vec<(f64, f64)> {
        (0..self.values.len())
            .map(|i| (self.values[i], self.probability(i)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Shannon entropy of `Z_a` itself.
    pub fn entropy(&self, base: Base) -> f64 {
        entropy_of_counts(&self.counts, self.log2_denominator, base)
    }

    /// Law of `sgn(Z)·⌊|Z|⌋`, with `TOL` slack against rounding just below an integer.
    pub fn quantized(&self) -> SignedSumLaw {
        let mut atoms: Vec<(f64, u64)> = self
            .values
            .iter()
            .zip(&self.counts)
            .map(|(&v, &c)| (v.signum() * (v.abs() + TOL).floor(), c))
            .map(|(v, c)| (if v == 0.0 { 0.0 } else { v }, c))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (values, counts) = merge(atoms);
        SignedSumLaw {
            values,
            counts,
            log2_denominator: self.log2_denominator,
        }
    }
}

fn entropy_of_counts(counts: &[u64], log2_den: u32, base: Base) -> f64 {
    let den = 2f64.powi(log2_den as i32);
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / den;
            p * base.log(p)
        })
        .sum::<f64>()
}

fn merge(sorted: Vec<(f64, u64)>) -> (Vec<f64>, Vec<u64>) {
    let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
    let mut counts: Vec<u64> = Vec::with_capacity(sorted.len());
    for (v, c) in sorted {
        match values.last() {
            Some(&last) if v - last <= MERGE_TOL => *counts.last_mut().unwrap() += c,
            _ => {
                values.push(v);
                counts.push(c);
            }
        }
    }
    (values, counts)
}

/// Exact law of `Z_a` by repeated two-point convolution.
pub fn signed_sum_law(a: &[f64]) -> Result<SignedSumLaw> {
    if a.len() > LAW_LIMIT {
        return Err(Error::size("signed-sum law", a.len(), LAW_LIMIT));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("coefficients must be finite".into()));
    }
    let mut values = vec![0.0];
    let mut counts = vec![1u64];
    for &x in a {
        let mut next: Vec<(f64, u64)> = Vec::with_capacity(values.len() * 2);
        // Both shifted copies are sorted; a two-way merge keeps the order.
        let (lo, hi) = (-x.abs(), x.abs());
        let (mut i, mut j) = (0, 0);
        while i < values.len() || j < values.len() {
            let take_lo = j >= values.len() || (i < values.len() && values[i] + lo <= values[j] + hi);
            if take_lo {
                next.push((values[i] + lo, counts[i]));
                i += 1;
            } else {
                next.push((values[j] + hi, counts[j]));
                j += 1;
            }
        }
        (values, counts) = merge(next);
    }
    Ok(SignedSumLaw {
        values,
        counts,
        log2_denominator: a.len() as u32,
    })
}

/// `H(W_a)` in the requested base.
pub fn w_entropy(a: &[f64], base: Base) -> Result<f64> {
    Ok(signed_sum_law(a)?.quantized().entropy(base))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub h: f64,
    /// `Φ(1/(2|a|²))`; absent for `a = 0`.
    pub phi: Option<f64>,
    /// `H / Φ`; absent for `a = 0`.
    pub ratio: Option<f64>,
    pub base: Base,
}

pub fn entropic_estimate(a: &[f64], base: Base) -> Result<EntropyEstimate> {
    let h = w_entropy(a, base)?;
    let r2 = norm2(a).powi(2);
    let phi = if r2 > 0.0 { Some(phi(1.0 / (2.0 * r2))?) } else { None };
    Ok(EntropyEstimate {
        h,
        phi,
        ratio: phi.map(|p| h / p),
        base,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropicReport {
    pub max_ratio: Option<f64>,
    pub argmax: Option<Vec<f64>>,
    pub rows: Vec<EntropyEstimate>,
}

/// Largest `H(W_a)/Φ(1/(2|a|²))` over the grid; zero vectors carry no ratio.
pub fn verify_entropic_estimate(grid: &[Vec<f64>], base: Base) -> Result<EntropicReport> {
    let rows: Vec<EntropyEstimate> = grid
        .par_iter()
        .map(|a| entropic_estimate(a, base))
        .collect::<Result<_>>()?;
    let mut max_ratio: Option<f64> = None;
    let mut argmax = None;
    for (a, row) in grid.iter().zip(&rows) {
        if let Some(r) = row.ratio {
            if max_ratio.is_none_or(|m| r > m) {
                max_ratio = Some(r);
                argmax = Some(a.clone());
            }
        }
    }
    Ok(EntropicReport {
        max_ratio,
        argmax,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn phi_values() {
        assert!((phi(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi((-1f64).exp()).unwrap() - 2.0).abs() < 1e-12);
        assert!((phi(2.0).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(phi(0.0).is_err());
        assert!(phi(-1.0).is_err());
    }

    #[test]
    fn small_laws() {
        let l = signed_sum_law(&[1.0]).unwrap();
        assert_eq!(l.support(), vec![(-1.0, 0.5), (1.0, 0.5)]);
        let l = signed_sum_law(&[1.0, 1.0]).unwrap();
        assert_eq!(l.support(), vec![(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]);
        let l = signed_sum_law(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(l.support(), vec![(0.0, 1.0)]);
        assert!(signed_sum_law(&[1.0; 25]).is_err());
    }

    // Direct enumeration of all 2^n sign vectors.
    fn brute_law(a: &[f64]) -> Vec<(f64, u64)> {
        let n = a.len();
        let mut v: Vec<f64> = (0..1u64 << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { a[i] } else { -a[i] })
                    .sum()
            })
            .collect();
        v.sort_by(f64::total_cmp);
        let (values, counts) = merge(v.into_iter().map(|x| (x, 1)).collect());
        values.into_iter().zip(counts).collect()
    }

    #[test]
    fn law_matches_enumeration() {
        for seed in 0..20 {
            let mut r = rng::stream(seed, 11);
            let n = r.random_range(1..=10);
            // Integer entries keep brute-force sums exact.
            let a: Vec<f64> = (0..n).map(|_| r.random_range(-3i32..=3) as f64).collect();
            let law = signed_sum_law(&a).unwrap();
            let got: Vec<(f64, u64)> = law.values.iter().copied().zip(law.counts.iter().copied()).collect();
            assert_eq!(got, brute_law(&a));
        }
    }

    #[test]
    fn unit_anchor() {
        let est = entropic_estimate(&[1.0], Base::Natural).unwrap();
        assert!((est.h - 2f64.ln()).abs() < 1e-12);
        let want = 2f64.ln() / (1.0 + 2f64.ln());
        assert!((est.ratio.unwrap() - want).abs() < 1e-9);
        let zero = entropic_estimate(&[0.0, 0.0], Base::Natural).unwrap();
        assert_eq!(zero.h, 0.0);
        assert_eq!(zero.ratio, None);
    }

    #[test]
    fn grid_report_picks_maximum() {
        let grid = vec![vec![0.0], vec![1.0], vec![0.5, 0.5]];
        let rep = verify_entropic_estimate(&grid, Base::Natural).unwrap();
        let best = rep
            .rows
            .iter()
            .filter_map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(rep.max_ratio, Some(best));
    }

    fn coeffs() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-2.0f64..2.0, 1..12)
    }

    proptest! {
        #[test]
        fn law_is_symmetric_and_dyadic(a in coeffs()) {
            let law = signed_sum_law(&a).unwrap();
            let total: u64 = law.counts.iter().sum();
            prop_assert_eq!(total, 1u64 << a.len());
            let k = law.len();
            for i in 0..k {
                prop_assert!((law.values[i] + law.values[k - 1 - i]).abs() < 1e-9);
                prop_assert_eq!(law.counts[i], law.counts[k - 1 - i]);
            }
        }

        #[test]
        fn entropy_bounded_by_log_support(a in coeffs()) {
            let w = signed_sum_law(&a).unwrap().quantized();
            prop_assert!(w.entropy(Base::Two) <= (w.len() as f64).log2() + 1e-12);
        }

        #[test]
        fn quantized_entropy_subadditive_over_blocks(a in coeffs(), b in coeffs()) {
            // W_{(a,b)} is a function of (Z_a, Z_b), which are independent.
            let joint: Vec<f64> = a.iter().chain(&b).copied().collect();
            let h = w_entropy(&joint, Base::Natural).unwrap();
            let ha = signed_sum_law(&a).unwrap().entropy(Base::Natural);
            let hb = signed_sum_law(&b).unwrap().entropy(Base::Natural);
            prop_assert!(h <= ha + hb + 1e-9);
        }
    }
}
