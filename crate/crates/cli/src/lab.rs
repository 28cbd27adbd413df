//! `chaindisc lab <experiment>`: JSON-configured Monte Carlo experiments.
//!
//! Precedence for shared settings is command-line flag, then config file,
//! then the experiment default. The report echoes the fully resolved config.

use chaindisc::gen::{generate, GenSpec};
use chaindisc::io::read_point_set;
use chaindisc::rng;
use chaindisc::sgp_lab::{
    almost_isometry, decompose, gap_experiment, meanwidth_ratio, order_stats, shrink_single,
    verify_shrinking, verify_weak_l2_containment, GapOptions, LinearClass, MeasureSpec,
    SampleWindow, ShrinkOptions,
};
use chaindisc::space::PointSet;
use chaindisc::Constants;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{to_value, CliError, CliResult};
use crate::{csv_table, Global, Outcome};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Gap,
    Shrink,
    Meanwidth,
    Orderstats,
    Isometry,
    Decompose,
}

/// A point set given inline, or as a string naming a generator spec
/// (`random-sphere:64,8`) or else a `.csv`/`.json` path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexSource {
    Inline(Vec<Vec<f64>>),
    Named(String),
}

/// `"gaussian"` or `"cube"` (dimension from `dim` or the index set), or a
/// full measure object such as `{"kind": "custom-bounded", ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureConfig {
    Named(String),
    Spec(MeasureSpec),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_set: Option<IndexSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// The single index vector of the shrink experiment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa7: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<Constants>,
}

fn load_index_set(src: &IndexSource, seed: u64) -> CliResult<PointSet> {
    match src {
        IndexSource::Inline(rows) => Ok(PointSet::new(rows.clone())?),
        IndexSource::Named(s) => match s.parse::<GenSpec>() {
            Ok(spec) => Ok(generate(&spec, seed)?),
            Err(_) => Ok(read_point_set(std::path::Path::new(s))?.0),
        },
    }
}

fn measure_for(cfg: &LabConfig, dim: Option<usize>) -> CliResult<MeasureSpec> {
    let need_dim = || {
        dim.ok_or_else(|| CliError::Config("measure needs a dimension: set dim or index_set".into()))
    };
    let m = match &cfg.measure {
        None => MeasureSpec::GaussianIsotropic { dim: need_dim()? },
        Some(MeasureConfig::Named(name)) => match name.as_str() {
            "gaussian" | "gaussian-isotropic" => MeasureSpec::GaussianIsotropic { dim: need_dim()? },
            "cube" | "cube-uniform" => MeasureSpec::CubeUniform { dim: need_dim()? },
            other => return Err(CliError::Config(format!("unknown measure {other:?}"))),
        },
        Some(MeasureConfig::Spec(s)) => s.clone(),
    };
    m.validate()?;
    Ok(m)
}

fn class(cfg: &LabConfig, seed: u64) -> CliResult<LinearClass> {
    let t = match &cfg.index_set {
        Some(src) => load_index_set(src, seed)?,
        None => {
            return Err(CliError::Config(
                "experiment needs an index set: config index_set, --input or --gen".into(),
            ))
        }
    };
    let measure = measure_for(cfg, Some(cfg.dim.unwrap_or(t.dim())))?;
    Ok(LinearClass::new(t, measure)?)
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

pub fn run(
    exp: Experiment,
    file: Option<String>,
    source: Option<IndexSource>,
    g: &Global,
    cli_constants: Constants,
) -> CliResult<Outcome> {
    let mut cfg: LabConfig = match file {
        Some(text) => serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("lab config: {e}")))?,
        None => LabConfig::default(),
    };
    if source.is_some() {
        cfg.index_set = source;
    }
    let constants = match (&g.constants, cfg.constants) {
        (Some(spec), Some(base)) => base.parse_overrides(spec)?,
        (_, Some(base)) => base,
        (_, None) => cli_constants,
    };
    cfg.constants = Some(constants);
    let seed = g.seed;
    let trials = |cfg: &mut LabConfig, default: usize| {
        let v = g.trials.or(cfg.trials).unwrap_or(default);
        cfg.trials = Some(v);
        v
    };
    fn pick<T: Clone>(slot: &mut Option<T>, default: T) -> T {
        slot.get_or_insert(default).clone()
    }

    let (exact, result, csv) = match exp {
        Experiment::Gap => {
            let cls = class(&cfg, seed)?;
            let d = GapOptions::default();
            let opts = GapOptions {
                k_list: pick(&mut cfg.k_list, d.k_list),
                budget: g.budget.or(cfg.budget).unwrap_or(d.budget),
                trials: trials(&mut cfg, d.trials),
                rho: pick(&mut cfg.rho, d.rho),
                sign_trials: pick(&mut cfg.sign_trials, d.sign_trials),
                constants,
            };
            cfg.budget = Some(opts.budget);
            let r = gap_experiment(&cls, &opts, seed)?;
            let csv = csv_table(
                &["k", "median_ratio", "median_anchor", "min_anchor"],
                r.summaries.iter().map(|s| {
                    vec![
                        s.k.to_string(),
                        opt(s.median_ratio),
                        opt(s.median_anchor),
                        opt(s.min_anchor),
                    ]
                }),
            );
            (false, to_value(&r), csv)
        }
        Experiment::Shrink => {
            let vector = match (&cfg.t, &cfg.index_set) {
                (Some(v), _) => v.clone(),
                (None, Some(src)) => load_index_set(src, seed)?.point(0).to_vec(),
                (None, None) => {
                    return Err(CliError::Config(
                        "shrink needs t, index_set, --input or --gen".into(),
                    ))
                }
            };
            cfg.t = Some(vector.clone());
            let measure = measure_for(&cfg, Some(cfg.dim.unwrap_or(vector.len())))?;
            let k = pick(&mut cfg.k, 256);
            let n = trials(&mut cfg, 1000);
            let r = shrink_single(&vector, &measure, k, n, seed)?;
            let csv = csv_table(
                &["trial", "constant"],
                r.constants
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| vec![i.to_string(), f(c)]),
            );
            (true, to_value(&r), csv)
        }
        Experiment::Meanwidth => {
            let cls = class(&cfg, seed)?;
            let k = pick(&mut cfg.k, 128);
            let grid = pick(&mut cfg.m_grid, vec![8, 16, 32, 64]);
            let i_samples = pick(&mut cfg.i_samples, 50);
            let width = g.trials.or(cfg.width_trials).unwrap_or(400);
            cfg.width_trials = Some(width);
            let r = meanwidth_ratio(&cls, k, &grid, i_samples, width, seed)?;
            let csv = csv_table(
                &["m", "scale", "max_ratio", "mean_ratio", "single_ratio", "single_over_scale"],
                r.rows.iter().map(|row| {
                    vec![
                        row.m.to_string(),
                        f(row.scale),
                        f(row.max_ratio),
                        f(row.mean_ratio),
                        f(row.single_ratio),
                        f(row.single_over_scale),
                    ]
                }),
            );
            (false, to_value(&r), csv)
        }
        Experiment::Orderstats => {
            let n = pick(&mut cfg.n, 1024);
            let grid = pick(&mut cfg.m_grid, vec![1, 4, 16, 64, 256]);
            let tr = trials(&mut cfg, 2000);
            let r = order_stats(n, tr, &grid, seed)?;
            let csv = csv_table(
                &["i", "mean", "ratio"],
                r.mean.iter().enumerate().map(|(i, &m)| {
                    vec![(i + 1).to_string(), f(m), opt(r.ratio.get(i).copied())]
                }),
            );
            (false, to_value(&r), csv)
        }
        Experiment::Isometry => {
            let cls = class(&cfg, seed)?;
            let k = pick(&mut cfg.k, 512);
            let tr = trials(&mut cfg, 200);
            let kappa7 = pick(&mut cfg.kappa7, constants.k7);
            let r = almost_isometry(&cls, k, tr, cfg.a_estimate, kappa7, seed)?;
            let csv = csv_table(
                &["trial", "above", "violations"],
                r.trials.iter().enumerate().map(|(i, row)| {
                    vec![i.to_string(), row.above.to_string(), row.violations.to_string()]
                }),
            );
            (false, to_value(&r), csv)
        }
        Experiment::Decompose => {
            let cls = class(&cfg, seed)?;
            let k = pick(&mut cfg.k, 64);
            let m = pick(&mut cfg.m, 8);
            let windows = trials(&mut cfg, 50);
            let d = ShrinkOptions::default();
            let opts = ShrinkOptions {
                pairs: pick(&mut cfg.pairs, d.pairs),
                i_samples: pick(&mut cfg.i_samples, d.i_samples),
            };
            let dec = decompose(&cls, k, m)?;
            let mut rows = Vec::with_capacity(windows);
            let mut csv_rows = Vec::with_capacity(windows);
            let (mut c1, mut c2, mut violations) = (Vec::new(), Vec::new(), 0usize);
            for w in 0..windows {
                let wseed = rng::derive(seed, w as u64);
                let win = SampleWindow::draw(&cls.measure, k, wseed)?;
                let weak = verify_weak_l2_containment(&dec, &win, opts.i_samples, wseed)?;
                let shrink = verify_shrinking(&dec, &win, &opts, wseed)?;
                c1.push(weak.c1);
                c2.push(shrink.c2);
                violations += usize::from(shrink.sqrt2_violated);
                csv_rows.push(vec![
                    w.to_string(),
                    f(weak.c1),
                    f(shrink.c2),
                    f(shrink.norm_ratio),
                    shrink.sqrt2_violated.to_string(),
                ]);
                rows.push(json!({ "window": w, "seed": wseed, "weak_l2": weak, "shrinking": shrink }));
            }
            let range = |v: &[f64]| {
                json!({
                    "min": v.iter().copied().fold(f64::INFINITY, f64::min),
                    "max": v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                })
            };
            let result = json!({
                "decomposition": {
                    "k": dec.k,
                    "m": dec.m,
                    "tau_m": dec.tau_m,
                    "depth": dec.depth,
                    "l": dec.l,
                    "gamma_tau": dec.gamma_tau,
                    "net": dec.net,
                    "pi": dec.pi,
                    "reconstruction_error": dec.reconstruction_error,
                    "trivial": dec.is_trivial(),
                },
                "summary": { "c1": range(&c1), "c2": range(&c2), "sqrt2_violations": violations },
                "rows": rows,
            });
            let csv = csv_table(&["window", "c1", "c2", "norm_ratio", "sqrt2_violated"], csv_rows);
            (false, result, csv)
        }
    };
    let mut echo = to_value(&cfg);
    if let serde_json::Value::Object(o) = &mut echo {
        o.insert("command".into(), json!("lab"));
        o.insert("experiment".into(), to_value(&exp));
        o.insert("seed".into(), json!(seed));
        if let Some(spec) = &g.constants {
            o.insert("constant_overrides".into(), json!(spec));
        }
    }
    Ok(Outcome {
        exact: Some(exact),
        result,
        csv,
        config: Some(echo),
        constants: Some(constants),
    })
}
