//! `(λ_s, Q_s)` schedules governing the partial-coloring entropy budget.
//!
//! Two closed-form families are provided: the three-branch `Q_s` built
//! around `s_n = max{s : 2^{2^{s+1}} ≤ κ3·n}` (used with admissible
//! sequences), and the two-branch `λ_s/Q_s` pair built around
//! `ν_n = max{s : 2^s ≤ c1·n}` (used with separated-set chains). Custom
//! finite schedules are accepted as well.

use serde::Serialize;

use crate::constants::Constants;
use crate::error::{Error, Result};

/// Number of terms summed by the budget check unless overridden.
pub const DEFAULT_HORIZON: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    Gamma { s_n: Option<usize> },
    Entropy { nu_n: usize },
    Custom { lambda: Vec<f64>, q: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub n: usize,
    pub kind: ScheduleKind,
    pub constants: Constants,
    /// Terms `s = 1..=horizon` enter the budget sum.
    pub horizon: usize,
    /// Set when the defining maximum was empty and a branch was collapsed.
    pub degenerate: bool,
}

/// `s_n = max{s ≥ 0 : 2^{2^{s+1}} ≤ κ3·n}`, `None` when no `s` qualifies.
pub fn s_n(n: usize, k3: f64) -> Option<usize> {
    let budget = k3 * n as f64;
    (0..16usize)
        .take_while(|&s| 2f64.powf(2f64.powi(s as i32 + 1)) <= budget)
        .last()
}

/// `ν_n = max{s ≥ 0 : 2^s ≤ c1·n}`, `None` when `c1·n < 1`.
pub fn nu_n(n: usize, c1: f64) -> Option<usize> {
    let budget = c1 * n as f64;
    (0..128usize)
        .take_while(|&s| 2f64.powi(s as i32) <= budget)
        .last()
}

/// `τ_m`: smallest `s` with `2^{2^s} ≥ exp(m·log(ek/m))`.
pub fn tau_m(m: usize, k: usize) -> usize {
    assert!(m >= 1 && m <= k, "tau_m needs 1 <= m <= k");
    let target_bits = m as f64 * (std::f64::consts::E * k as f64 / m as f64).ln()
        / std::f64::consts::LN_2;
    // 2^{2^s} ≥ 2^{bits}  ⇔  2^s ≥ bits
    (0..).find(|&s| 2f64.powi(s) >= target_bits).unwrap() as usize
}

/// The three-branch schedule
/// `Q_s = κ4·{exp(−κ5·√n) if s < s_n; 1 if s = s_n; 2^{s/2} if s > s_n}`.
///
/// `λ_s` is the link-count bound `|T_s|·|T_{s−1}| ≤ 2^{2^s + 2^{s−1}}`
/// for nested levels with `|T_s| ≤ 2^{2^s}`. When no `s_n` exists the whole
/// schedule uses the `s > s_n` branch and `degenerate` is set.
pub fn schedule_gamma(n: usize, constants: Constants) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::Domain("schedule needs n >= 1".into()));
    }
    let sn = s_n(n, constants.k3);
    Ok(Schedule {
        n,
        kind: ScheduleKind::Gamma { s_n: sn },
        constants,
        horizon: DEFAULT_HORIZON,
        degenerate: sn.is_none(),
    })
}

/// `λ_s = c2·2^s (s ≤ ν_n), c3·n·2^{2^{s−ν_n}−1} (s > ν_n)`;
/// `Q_s = c4·exp(−2·2^{(s−ν_n)/2}) (s ≤ ν_n), c4·2^{(s−ν_n)/2} (s > ν_n)`.
pub fn schedule_entropy(n: usize, constants: Constants) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::Domain("schedule needs n >= 1".into()));
    }
    let nu = nu_n(n, constants.c1);
    Ok(Schedule {
        n,
        kind: ScheduleKind::Entropy {
            nu_n: nu.unwrap_or(0),
        },
        constants,
        horizon: DEFAULT_HORIZON.max(nu.unwrap_or(0) + 2),
        degenerate: nu.is_none(),
    })
}

impl Schedule {
    /// A finite schedule given term by term (`lambda[0]` is `λ_1`).
    pub fn custom(n: usize, lambda: Vec<f64>, q: Vec<f64>) -> Result<Schedule> {
        if lambda.len() != q.len() || lambda.is_empty() {
            return Err(Error::Invalid("custom schedule needs equal, nonempty λ and Q".into()));
        }
        if lambda.iter().chain(&q).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("schedule terms must be positive".into()));
        }
        Ok(Schedule {
            n,
            horizon: lambda.len(),
            kind: ScheduleKind::Custom { lambda, q },
            constants: Constants::default(),
            degenerate: false,
        })
    }

    pub fn with_horizon(mut self, horizon: usize) -> Schedule {
        if !matches!(self.kind, ScheduleKind::Custom { .. }) {
            self.horizon = horizon;
        }
        self
    }

    /// `Q_s` for `s ≥ 1`. Custom schedules are undefined past their length.
    pub fn q(&self, s: usize) -> Option<f64> {
        if s == 0 {
            return None;
        }
        let c = &self.constants;
        match &self.kind {
            ScheduleKind::Gamma { s_n } => {
                let v = match s_n {
                    Some(sn) if s < *sn => (-c.k5 * (self.n as f64).sqrt()).exp(),
                    Some(sn) if s == *sn => 1.0,
                    _ => 2f64.powf(s as f64 / 2.0),
                };
                Some(c.k4 * v)
            }
            ScheduleKind::Entropy { nu_n } => {
                let e = (s as f64 - *nu_n as f64) / 2.0;
                let v = if s <= *nu_n {
                    (-2.0 * 2f64.powf(e)).exp()
                } else {
                    2f64.powf(e)
                };
                Some(c.c4 * v)
            }
            ScheduleKind::Custom { q, .. } => q.get(s - 1).copied(),
        }
    }

    pub fn lambda(&self, s: usize) -> Option<f64> {
        if s == 0 {
            return None;
        }
        let c = &self.constants;
        match &self.kind {
            ScheduleKind::Gamma { .. } => {
                Some(2f64.powf(2f64.powi(s as i32) + 2f64.powi(s as i32 - 1)))
            }
            ScheduleKind::Entropy { nu_n } => {
                if s <= *nu_n {
                    Some(c.c2 * 2f64.powi(s as i32))
                } else {
                    let e = 2f64.powi((s - nu_n) as i32) - 1.0;
                    Some(c.c3 * self.n as f64 * 2f64.powf(e))
                }
            }
            ScheduleKind::Custom { lambda, .. } => lambda.get(s - 1).copied(),
        }
    }

    /// `(s, λ_s, Q_s)` for `s = 1..=horizon`.
    pub fn terms(&self) -> Vec<(usize, f64, f64)> {
        (1..=self.horizon)
            .map(|s| (s, self.lambda(s).unwrap(), self.q(s).unwrap()))
            .collect()
    }

    pub fn s_n(&self) -> Option<usize> {
        match self.kind {
            ScheduleKind::Gamma { s_n } => s_n,
            _ => None,
        }
    }

    pub fn nu_n(&self) -> Option<usize> {
        match self.kind {
            ScheduleKind::Entropy { nu_n } => Some(nu_n),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_schedule_at_256() {
        let s = schedule_gamma(256, Constants::default()).unwrap();
        assert_eq!(s.s_n(), Some(2));
        assert!(!s.degenerate);
        assert_eq!(s.q(2), Some(1.0));
        assert!((s.q(1).unwrap() - (-16f64).exp()).abs() < 1e-22);
        assert!((s.q(3).unwrap() - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn gamma_schedule_degenerates_at_one() {
        let s = schedule_gamma(1, Constants::default()).unwrap();
        assert_eq!(s.s_n(), None);
        assert!(s.degenerate);
        for k in 1..6 {
            assert!((s.q(k).unwrap() - 2f64.powf(k as f64 / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_q_nondecreasing_past_s_n() {
        for n in [16, 100, 256, 5000, 70000] {
            let s = schedule_gamma(n, Constants::default()).unwrap();
            let sn = s.s_n().unwrap();
            for k in sn.max(1)..10 {
                assert!(s.q(k + 1).unwrap() >= s.q(k).unwrap());
            }
        }
    }

    #[test]
    fn entropy_schedule_at_16() {
        let s = schedule_entropy(16, Constants::default()).unwrap();
        assert_eq!(s.nu_n(), Some(4));
        assert_eq!(s.lambda(4), Some(16.0));
        assert!((s.q(4).unwrap() - (-2f64).exp()).abs() < 1e-15);
        assert!((s.q(5).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn entropy_lambda_increasing_across_branch() {
        for n in [1, 2, 16, 100, 1000] {
            let s = schedule_entropy(n, Constants::default()).unwrap();
            let nu = s.nu_n().unwrap();
            for k in 1..(nu + 4) {
                assert!(s.lambda(k + 1).unwrap() > s.lambda(k).unwrap(), "n={n} s={k}");
            }
        }
        let one = schedule_entropy(1, Constants::default()).unwrap();
        assert_eq!(one.nu_n(), Some(0));
        assert!((one.q(1).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tau_examples() {
        // exp(8·log(8e)) ≈ 2^35.5 → 2^{2^6} is the first level large enough.
        assert_eq!(tau_m(8, 64), 6);
        assert_eq!(tau_m(1, 1), 1);
    }
}
