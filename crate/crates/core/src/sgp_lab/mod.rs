//! Monte Carlo laboratory for random coordinate projections of linear
//! classes `F = {⟨t, ·⟩ : t ∈ T}` under isotropic subgaussian measures.
//!
//! Every trial draws from its own stream derived from `(seed, trial)` and
//! results are gathered in trial order, so reports do not depend on the
//! number of worker threads.

mod decomposition;
mod estimators;
mod experiments;

pub use decomposition::{
    decompose, verify_shrinking, verify_weak_l2_containment, Decomposition, ShrinkOptions,
    ShrinkingReport, WeakL2Report,
};
pub use estimators::{
    emp_sign_sup, gauss_mean_width, isotropy_check, order_stats, psi2_estimate, tail_check,
    IsotropyReport, OrderStatsReport, SignSupMode, SquareSumRow, TailReport, TailRow,
    EXACT_SIGN_LIMIT, MIN_PSI2_SAMPLES, MIN_TRIALS,
};
pub use experiments::{
    a_n_level, almost_isometry, eval_a_n, gap_experiment, meanwidth_ratio, shrink_single, truncate_split,
    GapOptions, GapReport, GapRow, GapSummary, IsometryReport, IsometryTrial, MeanwidthReport,
    MeanwidthRow, ShrinkSingleReport,
};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::space::{dot, norm2, PointSet};

/// Tolerance for the declared mean and variance of custom measures.
const MOMENT_TOL: f64 = 1e-9;

/// Law of `X ∈ ℝ^dim`, with i.i.d. coordinates in every case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum MeasureSpec {
    GaussianIsotropic { dim: usize },
    /// Uniform on the vertices `{-1, 1}^dim`.
    CubeUniform { dim: usize },
    /// Coordinates drawn from the finite law `values`/`probabilities`, which
    /// must have mean 0 and variance 1; `l` is the declared subgaussian
    /// constant.
    CustomBounded {
        dim: usize,
        values: Vec<f64>,
        probabilities: Vec<f64>,
        l: f64,
    },
}

impl MeasureSpec {
    pub fn dim(&self) -> usize {
        match *self {
            MeasureSpec::GaussianIsotropic { dim }
            | MeasureSpec::CubeUniform { dim }
            | MeasureSpec::CustomBounded { dim, .. } => dim,
        }
    }

    /// The subgaussian constant `L`; the named measures use 1.
    pub fn l(&self) -> f64 {
        match self {
            MeasureSpec::CustomBounded { l, .. } => *l,
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::Invalid("measure dimension must be positive".into()));
        }
        if let MeasureSpec::CustomBounded {
            values,
            probabilities,
            l,
            ..
        } = self
        {
            if values.is_empty() || values.len() != probabilities.len() {
                return Err(Error::Invalid(
                    "custom measure needs equally many values and probabilities".into(),
                ));
            }
            if values.iter().chain(probabilities).any(|x| !x.is_finite())
                || probabilities.iter().any(|&p| p < 0.0)
            {
                return Err(Error::Invalid("custom measure has a bad value or probability".into()));
            }
            let total: f64 = probabilities.iter().sum();
            let mean: f64 = values.iter().zip(probabilities).map(|(v, p)| v * p).sum();
            let second: f64 = values.iter().zip(probabilities).map(|(v, p)| v * v * p).sum();
            if (total - 1.0).abs() > MOMENT_TOL {
                return Err(Error::Invalid(format!("custom probabilities sum to {total}")));
            }
            if mean.abs() > MOMENT_TOL || (second - 1.0).abs() > MOMENT_TOL {
                return Err(Error::Invalid(format!(
                    "custom marginal must have mean 0 and variance 1, got {mean} and {second}"
                )));
            }
            if !(*l > 0.0 && l.is_finite()) {
                return Err(Error::Invalid("custom measure needs a positive L".into()));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng>(&self, r: &mut R) -> Vec<f64> {
        match self {
            MeasureSpec::GaussianIsotropic { dim } => {
                (0..*dim).map(|_| r.sample::<f64, _>(StandardNormal)).collect()
            }
            MeasureSpec::CubeUniform { dim } => (0..*dim)
                .map(|_| if r.random::<bool>() { 1.0 } else { -1.0 })
                .collect(),
            MeasureSpec::CustomBounded {
                dim,
                values,
                probabilities,
                ..
            } => (0..*dim)
                .map(|_| {
                    let u: f64 = r.random();
                    let mut acc = 0.0;
                    for (v, p) in values.iter().zip(probabilities) {
                        acc += p;
                        if u < acc {
                            return *v;
                        }
                    }
                    *values.last().expect("validated nonempty")
                })
                .collect(),
        }
    }
}

/// The class `{⟨t, ·⟩ : t ∈ T}` over a measure on `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearClass {
    pub index_set: PointSet,
    pub measure: MeasureSpec,
}

impl LinearClass {
    pub fn new(index_set: PointSet, measure: MeasureSpec) -> Result<Self> {
        measure.validate()?;
        if index_set.dim() != measure.dim() {
            return Err(Error::LengthMismatch {
                expected: measure.dim(),
                got: index_set.dim(),
            });
        }
        Ok(LinearClass { index_set, measure })
    }

    /// `σ_F = sup_t |t|`, the largest `L₂` norm under isotropy.
    pub fn sigma_f(&self) -> f64 {
        self.index_set.iter().map(norm2).fold(0.0, f64::max)
    }
}

/// The sample `σ = (X_1, …, X_k)`; `X_i` comes from stream `(seed, i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleWindow {
    pub sigma: Vec<Vec<f64>>,
    pub seed: u64,
}

impl SampleWindow {
    pub fn draw(measure: &MeasureSpec, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("sample size k must be at least 1".into()));
        }
        measure.validate()?;
        let sigma = (0..k)
            .into_par_iter()
            .map(|i| measure.sample(&mut rng::stream(seed, i as u64)))
            .collect();
        Ok(SampleWindow { sigma, seed })
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// `(⟨t, X_i⟩)_{i=1}^k`.
    pub fn evaluate(&self, t: &[f64]) -> Vec<f64> {
        self.sigma.iter().map(|x| dot(t, x)).collect()
    }

    /// `P_σ T`, one row per point of `t`.
    pub fn project(&self, t: &PointSet) -> Result<PointSet> {
        PointSet::new(t.iter().map(|p| self.evaluate(p)).collect())
    }
}

/// Draws `σ` and returns it with `P_σ F = {(⟨t, X_i⟩)_{i≤k} : t ∈ T}`.
pub fn sample_projection(cls: &LinearClass, k: usize, seed: u64) -> Result<(SampleWindow, PointSet)> {
    let win = SampleWindow::draw(&cls.measure, k, seed)?;
    let proj = win.project(&cls.index_set)?;
    Ok((win, proj))
}

/// Mean with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    /// Computed by exact enumeration (zero-width interval).
    pub exact: bool,
}

impl Estimate {
    pub fn exact(value: f64, samples: usize) -> Self {
        Estimate {
            mean: value,
            std_err: 0.0,
            ci_low: value,
            ci_high: value,
            samples,
            exact: true,
        }
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let std_err = (var / n).sqrt();
        Estimate {
            mean,
            std_err,
            ci_low: mean - 1.96 * std_err,
            ci_high: mean + 1.96 * std_err,
            samples: xs.len(),
            exact: false,
        }
    }
}

/// Summary quantiles of a sample (linear interpolation between order
/// statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub median: f64,
    pub q90: f64,
    pub q95: f64,
    pub q99: f64,
    pub max: f64,
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Quantiles {
    pub fn of(xs: &[f64]) -> Self {
        let mut s = xs.to_vec();
        s.sort_by(f64::total_cmp);
        Quantiles {
            min: quantile(&s, 0.0),
            median: quantile(&s, 0.5),
            q90: quantile(&s, 0.9),
            q95: quantile(&s, 0.95),
            q99: quantile(&s, 0.99),
            max: quantile(&s, 1.0),
        }
    }
}

/// `log(e·k/m)`.
pub(crate) fn log_ek_m(k: usize, m: usize) -> f64 {
    1.0 + (k as f64 / m as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections() {
        let zero = LinearClass::new(PointSet::origin(3), MeasureSpec::GaussianIsotropic { dim: 3 }).unwrap();
        let (_, p) = sample_projection(&zero, 5, 1).unwrap();
        assert!(p.as_flat().iter().all(|&x| x == 0.0));
        let e1 = PointSet::new(vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let cube = LinearClass::new(e1, MeasureSpec::CubeUniform { dim: 3 }).unwrap();
        let (w, p) = sample_projection(&cube, 50, 2).unwrap();
        assert!(p.as_flat().iter().all(|&x| x.abs() == 1.0));
        let (w2, p2) = sample_projection(&cube, 50, 2).unwrap();
        assert_eq!((w, p), (w2, p2));
        assert!(sample_projection(&cube, 0, 2).is_err());
    }

    #[test]
    fn custom_measures_are_validated() {
        let ok = MeasureSpec::CustomBounded {
            dim: 2,
            values: vec![-1.0, 1.0],
            probabilities: vec![0.5, 0.5],
            l: 1.0,
        };
        assert!(ok.validate().is_ok());
        let x = ok.sample(&mut rng::stream(0, 0));
        assert!(x.iter().all(|v| v.abs() == 1.0));
        let biased = MeasureSpec::CustomBounded {
            dim: 2,
            values: vec![0.0, 2.0],
            probabilities: vec![0.5, 0.5],
            l: 1.0,
        };
        assert!(biased.validate().is_err());
        let bad_l = MeasureSpec::CustomBounded {
            dim: 2,
            values: vec![-1.0, 1.0],
            probabilities: vec![0.5, 0.5],
            l: 0.0,
        };
        assert!(bad_l.validate().is_err());
        let class = LinearClass::new(PointSet::origin(3), MeasureSpec::CubeUniform { dim: 2 });
        assert!(class.is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.5), 2.0);
        assert_eq!(quantile(&s, 0.125), 0.5);
        let q = Quantiles::of(&[3.0, 1.0, 2.0]);
        assert_eq!((q.min, q.median, q.max), (1.0, 2.0, 3.0));
    }
}
