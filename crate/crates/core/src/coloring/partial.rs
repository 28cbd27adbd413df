//! Partial coloring by pigeonhole over quantized chain increments.
//!
//! The chain runs over `T ∪ {0}` along an admissible sequence rooted at the
//! origin, so `t = Σ_{s≥1} (π_s(t) − π_{s−1}(t))`. Each distinct link `u`
//! at level `s` is quantized as `W_{u,s} = sgn(x)·⌊|x|⌋` with
//! `x = ⟨ε, u⟩ / (|u| Q_s)`. Two sign vectors with equal fingerprints have
//! `|⟨ε − ε′, u⟩| < 2|u|Q_s` on every link, so `η = (ε − ε′)/2` satisfies
//! `|⟨η, t⟩| ≤ Σ_s Q_s |π_s(t) − π_{s−1}(t)|`.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chaining::{build_rooted, AdmissibleSequence, Schedule};
use crate::entropy_oracle::phi;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{signed_sum, Coloring, Metric, PointSet, TOL};

/// Stored sign vectors per bucket while sampling.
pub const BUCKET_CAP: usize = 32;
/// Largest dimension for which the exhaustive pigeonhole runs.
pub const EXHAUSTIVE_LIMIT: usize = 20;

const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pigeonhole,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialColorResult {
    pub coloring: Coloring,
    /// `max_t Σ_s Q_s |π_s(t) − π_{s−1}(t)|`.
    pub chain_bound: f64,
    pub zero_count: usize,
    pub method: Method,
    /// Sign vectors drawn (or enumerated) before the accepted pair.
    pub budget_used: usize,
    /// Distinct nonzero links quantized.
    pub links: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
    pub pass: bool,
}

/// `κ1 Σ_{s=1}^{horizon} λ_s Φ((κ2 Q_s)²)` against `n/100`.
pub fn entropy_budget_check(sched: &Schedule, n: usize) -> Result<BudgetCheck> {
    let c = &sched.constants;
    let mut lhs = 0.0;
    for (_, lambda, q) in sched.terms() {
        lhs += lambda * phi((c.k2 * q).powi(2))?;
    }
    let lhs = c.k1 * lhs;
    let rhs = n as f64 / 100.0;
    Ok(BudgetCheck {
        lhs,
        rhs,
        ratio: lhs / rhs,
        pass: lhs <= rhs,
    })
}

/// `T ∪ {0}` with a greedy admissible sequence rooted at the origin.
pub fn origin_sequence(t: &PointSet) -> Result<(PointSet, AdmissibleSequence)> {
    let (aug, origin) = t.with_origin();
    let seq = build_rooted(&aug, &Metric::Euclidean, origin)?;
    Ok((aug, seq))
}

#[derive(Debug, Clone, Copy)]
struct Link {
    from: usize,
    to: usize,
    scale: f64,
}

struct Chain {
    links: Vec<Link>,
    /// Certified bound per point of the augmented set.
    bounds: Vec<f64>,
    /// Augmented points that appear in some link.
    active: Vec<usize>,
}

fn build_chain(aug: &PointSet, sched: &Schedule, seq: &AdmissibleSequence) -> Result<Chain> {
    if seq.num_points() != aug.len() {
        return Err(Error::LengthMismatch {
            expected: aug.len(),
            got: seq.num_points(),
        });
    }
    if *seq.metric() != Metric::Euclidean {
        return Err(Error::Invalid("partial coloring needs a Euclidean sequence".into()));
    }
    if aug.point(seq.root()).iter().any(|&x| x != 0.0) {
        return Err(Error::Invalid("the sequence must be rooted at the origin".into()));
    }
    let mut keys = BTreeSet::new();
    let mut bounds = vec![0.0; aug.len()];
    let mut q_at = Vec::new();
    for s in 1..=seq.depth() {
        let q = sched
            .q(s)
            .ok_or_else(|| Error::Invalid(format!("schedule has no Q_{s}")))?;
        q_at.push(q);
        for (i, bound) in bounds.iter_mut().enumerate() {
            let (from, to) = (seq.pi(s - 1, i), seq.pi(s, i));
            let norm = Metric::Euclidean.distance(aug.point(from), aug.point(to));
            if norm > 0.0 {
                *bound += q * norm;
                keys.insert((s, from, to));
            }
        }
    }
    let links: Vec<Link> = keys
        .iter()
        .map(|&(s, from, to)| Link {
            from,
            to,
            scale: Metric::Euclidean.distance(aug.point(from), aug.point(to)) * q_at[s - 1],
        })
        .collect();
    let active: BTreeSet<usize> = links.iter().flat_map(|l| [l.from, l.to]).collect();
    Ok(Chain {
        links,
        bounds,
        active: active.into_iter().collect(),
    })
}

type Bits = Vec<u64>;

fn sign(bits: &[u64], i: usize) -> f64 {
    if bits[i / 64] >> (i % 64) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
}

fn in_window(h: usize, n: usize) -> bool {
    4 * h >= n && 4 * h <= 3 * n
}

fn fingerprint(aug: &PointSet, chain: &Chain, bits: &[u64]) -> Vec<i64> {
    let n = aug.dim();
    let mut z = vec![0.0; aug.len()];
    for &p in &chain.active {
        let row = aug.point(p);
        z[p] = (0..n).map(|i| sign(bits, i) * row[i]).sum();
    }
    chain
        .links
        .iter()
        .map(|l| {
            let x = (z[l.to] - z[l.from]) / l.scale;
            (x.signum() * x.abs().floor()) as i64
        })
        .collect()
}

fn eta_from_pair(a: &[u64], b: &[u64], n: usize) -> Coloring {
    let entries = (0..n)
        .map(|i| {
            if (a[i / 64] ^ b[i / 64]) >> (i % 64) & 1 == 1 {
                sign(a, i) as i8
            } else {
                0
            }
        })
        .collect();
    Coloring::new(entries).expect("entries are signs")
}

fn certified(aug: &PointSet, chain: &Chain, eta: &Coloring) -> bool {
    (0..aug.len()).all(|p| {
        signed_sum(aug.point(p), eta).is_ok_and(|v| v.abs() <= chain.bounds[p] + TOL)
    })
}

fn result(
    aug: &PointSet,
    chain: &Chain,
    coloring: Coloring,
    method: Method,
    budget_used: usize,
) -> PartialColorResult {
    debug_assert!(certified(aug, chain, &coloring));
    PartialColorResult {
        zero_count: coloring.zero_count(),
        coloring,
        chain_bound: chain.bounds.iter().fold(0.0f64, |m, &b| m.max(b)),
        method,
        budget_used,
        links: chain.links.len(),
    }
}

struct Buckets {
    map: HashMap<Vec<i64>, Vec<usize>>,
    stored: Vec<Bits>,
    cap: usize,
}

impl Buckets {
    fn new(cap: usize) -> Self {
        Buckets {
            map: HashMap::new(),
            stored: Vec::new(),
            cap,
        }
    }

    /// Returns the first stored partner in the Hamming window that passes
    /// the certificate; otherwise stores `bits` if the bucket has room.
    fn offer(
        &mut self,
        key: Vec<i64>,
        bits: Bits,
        accept: impl Fn(&Bits, &Bits) -> Option<Coloring>,
    ) -> Option<Coloring> {
        let slot = self.map.entry(key).or_default();
        for &k in slot.iter() {
            if let Some(eta) = accept(&self.stored[k], &bits) {
                return Some(eta);
            }
        }
        if slot.len() < self.cap {
            slot.push(self.stored.len());
            self.stored.push(bits);
        }
        None
    }

    fn stats(&self) -> String {
        let largest = self.map.values().map(Vec::len).max().unwrap_or(0);
        format!(
            "{} buckets, {} stored sign vectors, largest bucket {}",
            self.map.len(),
            self.stored.len(),
            largest
        )
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(
            "partial coloring needs n >= 2 (no zero count lies in [n/4, 3n/4])".into(),
        ));
    }
    Ok(())
}

/// Half the coordinates zeroed, the rest `+1`; valid whenever there is
/// nothing to quantize.
fn trivial(aug: &PointSet, chain: &Chain) -> PartialColorResult {
    let n = aug.dim();
    let zeros = n.div_ceil(2);
    let entries = (0..n).map(|i| if i < zeros { 0 } else { 1 }).collect();
    result(aug, chain, Coloring::new(entries).unwrap(), Method::Pigeonhole, 0)
}

/// Sampling pigeonhole: draws up to `budget` uniform sign vectors (draw `j`
/// from stream `(seed, j)`), buckets them by fingerprint and returns the
/// first pair whose Hamming distance lies in `[n/4, 3n/4]`.
///
/// `seq` must be a Euclidean sequence over `T ∪ {0}` rooted at the origin,
/// with the origin appended as by [`PointSet::with_origin`].
pub fn pigeonhole_sample(
    t: &PointSet,
    sched: &Schedule,
    seq: &AdmissibleSequence,
    budget: usize,
    seed: u64,
) -> Result<PartialColorResult> {
    let n = t.dim();
    check_dim(n)?;
    let (aug, _) = t.with_origin();
    let chain = build_chain(&aug, sched, seq)?;
    if chain.links.is_empty() {
        return Ok(trivial(&aug, &chain));
    }
    let words = n.div_ceil(64);
    let tail = if n % 64 == 0 { u64::MAX } else { (1u64 << (n % 64)) - 1 };
    let mut buckets = Buckets::new(BUCKET_CAP);
    let accept = |a: &Bits, b: &Bits| {
        if !in_window(hamming(a, b), n) {
            return None;
        }
        let eta = eta_from_pair(a, b, n);
        certified(&aug, &chain, &eta).then_some(eta)
    };
    let mut start = 0;
    while start < budget {
        let end = (start + CHUNK).min(budget);
        let batch: Vec<(Bits, Vec<i64>)> = (start..end)
            .into_par_iter()
            .map(|j| {
                let mut r = rng::stream(seed, j as u64);
                let mut bits: Bits = (0..words).map(|_| r.random::<u64>()).collect();
                *bits.last_mut().unwrap() &= tail;
                let key = fingerprint(&aug, &chain, &bits);
                (bits, key)
            })
            .collect();
        for (offset, (bits, key)) in batch.into_iter().enumerate() {
            if let Some(eta) = buckets.offer(key, bits, accept) {
                return Ok(result(&aug, &chain, eta, Method::Pigeonhole, start + offset + 1));
            }
        }
        start = end;
    }
    Err(Error::Budget(format!(
        "no admissible pair among {budget} samples over {} links; {}",
        chain.links.len(),
        buckets.stats()
    )))
}

/// Exhaustive pigeonhole over all `2^n` sign vectors in mask order. An
/// error here means no valid pair exists for this chain and schedule.
pub fn pigeonhole_exhaustive(
    t: &PointSet,
    sched: &Schedule,
    seq: &AdmissibleSequence,
) -> Result<PartialColorResult> {
    let n = t.dim();
    check_dim(n)?;
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::size("exhaustive partial coloring", n, EXHAUSTIVE_LIMIT));
    }
    let (aug, _) = t.with_origin();
    let chain = build_chain(&aug, sched, seq)?;
    if chain.links.is_empty() {
        return Ok(trivial(&aug, &chain));
    }
    let mut buckets = Buckets::new(usize::MAX);
    let accept = |a: &Bits, b: &Bits| {
        if !in_window(hamming(a, b), n) {
            return None;
        }
        let eta = eta_from_pair(a, b, n);
        certified(&aug, &chain, &eta).then_some(eta)
    };
    let total = 1usize << n;
    let mut start = 0;
    while start < total {
        let end = (start + 16 * CHUNK).min(total);
        let batch: Vec<Vec<i64>> = (start..end)
            .into_par_iter()
            .map(|mask| fingerprint(&aug, &chain, &[mask as u64]))
            .collect();
        for (offset, key) in batch.into_iter().enumerate() {
            let bits = vec![(start + offset) as u64];
            if let Some(eta) = buckets.offer(key, bits, accept) {
                return Ok(result(&aug, &chain, eta, Method::Exhaustive, start + offset + 1));
            }
        }
        start = end;
    }
    Err(Error::Budget(format!(
        "no admissible pair exists among all {total} sign vectors; {}",
        buckets.stats()
    )))
}

/// Sampling pigeonhole with the exhaustive search as fallback for `n ≤ 20`.
pub fn partial_color(
    t: &PointSet,
    sched: &Schedule,
    seq: &AdmissibleSequence,
    budget: usize,
    seed: u64,
) -> Result<PartialColorResult> {
    match pigeonhole_sample(t, sched, seq, budget, seed) {
        Err(Error::Budget(msg)) if t.dim() <= EXHAUSTIVE_LIMIT => {
            pigeonhole_exhaustive(t, sched, seq).map_err(|e| match e {
                Error::Budget(m) => Error::Budget(format!("{msg}; {m}")),
                other => other,
            })
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaining::{schedule_gamma, Schedule};
    use crate::constants::Constants;

    fn random_box(seed: u64, m: usize, n: usize) -> PointSet {
        let mut r = rng::stream(seed, 41);
        PointSet::new(
            (0..m)
                .map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn run(t: &PointSet, budget: usize, seed: u64) -> Result<PartialColorResult> {
        let (_, seq) = origin_sequence(t)?;
        let sched = schedule_gamma(t.dim(), Constants::default())?;
        partial_color(t, &sched, &seq, budget, seed)
    }

    fn validate(t: &PointSet, r: &PartialColorResult) {
        let n = t.dim();
        assert!(4 * r.zero_count >= n && 4 * r.zero_count <= 3 * n);
        assert_eq!(r.zero_count, r.coloring.zero_count());
        for p in t.iter() {
            assert!(signed_sum(p, &r.coloring).unwrap().abs() <= r.chain_bound + TOL);
        }
    }

    #[test]
    fn budget_check_examples() {
        let flat = Schedule::custom(1, vec![1.0; 10], vec![1.0; 10]).unwrap();
        let c = entropy_budget_check(&flat, 1).unwrap();
        assert!(!c.pass);
        assert!((c.lhs - 10.0).abs() < 1e-12);
        let huge = Schedule::custom(4, vec![1.0; 3], vec![1e3; 3]).unwrap();
        assert!(entropy_budget_check(&huge, 4).unwrap().pass);
        let g = schedule_gamma(256, Constants::default()).unwrap();
        let c = entropy_budget_check(&g, 256).unwrap();
        assert!(c.lhs.is_finite() && c.rhs == 2.56);
    }

    #[test]
    fn zero_set_gives_half_zeros() {
        let t = PointSet::new(vec![vec![0.0; 7]]).unwrap();
        let r = run(&t, 10, 0).unwrap();
        assert_eq!(r.zero_count, 4);
        assert_eq!(r.chain_bound, 0.0);
        assert!(run(&PointSet::new(vec![vec![0.0]]).unwrap(), 10, 0).is_err());
    }

    #[test]
    fn basis_vectors_certify_one() {
        let n = 12;
        let rows = (0..n)
            .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let t = PointSet::new(rows).unwrap();
        let r = run(&t, 100_000, 3).unwrap();
        validate(&t, &r);
        for p in t.iter() {
            assert!(signed_sum(p, &r.coloring).unwrap().abs() <= 1.0);
        }
    }

    #[test]
    fn random_sets_succeed_by_sampling() {
        for seed in 0..10 {
            let t = random_box(seed, 4, 12);
            let (_, seq) = origin_sequence(&t).unwrap();
            let sched = schedule_gamma(12, Constants::default()).unwrap();
            let r = pigeonhole_sample(&t, &sched, &seq, 100_000, seed).unwrap();
            assert_eq!(r.method, Method::Pigeonhole);
            validate(&t, &r);
            let e = pigeonhole_exhaustive(&t, &sched, &seq).unwrap();
            validate(&t, &e);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let t = random_box(77, 6, 40);
        let go = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run(&t, 3000, 5))
        };
        assert_eq!(go(1), go(8));
    }

    #[test]
    fn sequence_must_be_rooted_at_origin() {
        let t = random_box(1, 3, 4);
        let seq = build_rooted(&t, &Metric::Euclidean, 0).unwrap();
        let sched = schedule_gamma(4, Constants::default()).unwrap();
        assert!(partial_color(&t, &sched, &seq, 10, 0).is_err());
    }
}
