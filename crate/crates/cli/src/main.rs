//! `chaindisc`: one subcommand per operation, JSON reports by default and
//! CSV tables for plotting pipelines. Coordinate sets are 1-based on this
//! surface; point (row) indices are 0-based.

mod lab;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaindisc::chaining::{
    build_admissible, covering_number, entropy_number, gamma2, gamma2_profile, packing_number,
    schedule_entropy, schedule_gamma, Strategy,
};
use chaindisc::coloring::{
    disc_exact, disc_heuristic, hdisc_exact, matousek_color_with, partial_color,
    spencer_color_with, HalvingOptions, HalvingResult,
};
use chaindisc::entropy_oracle::{entropic_estimate, Base};
use chaindisc::gen::{generate, GenSpec};
use chaindisc::io::{coloring_to_csv, read_point_set, to_csv};
use chaindisc::shatter::{haussler_check, hdisc_vc_lower, vc_dim, HausslerOptions};
use chaindisc::space::{Coloring, IndexSet, Metric, PointSet};
use chaindisc::Constants;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{to_value, CliError, CliResult, Report};

#[derive(Parser, Debug)]
#[command(
    name = "chaindisc",
    version,
    about = "Discrepancy, generic chaining and coordinate-projection experiments"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Seed for generators and randomized algorithms.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget (restarts, samples or per-round budget).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Monte Carlo trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Constant overrides such as `k1=2,c3=0.5`.
    #[arg(long, global = true)]
    constants: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutFormat,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Source {
    /// Point set file, one point per row (`.csv`) or a JSON array of rows.
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator: random-box:m,n | random-signs:m,n | random-sphere:m,d |
    /// basis:n | cube:n | intervals:n,m | csv:path.
    #[arg(long)]
    gen: Option<String>,
}

impl Source {
    fn as_index_source(&self) -> Option<lab::IndexSource> {
        self.input
            .as_ref()
            .map(|p| p.display().to_string())
            .or_else(|| self.gen.clone())
            .map(lab::IndexSource::Named)
    }

    fn load(&self, seed: u64) -> CliResult<PointSet> {
        match (&self.input, &self.gen) {
            (Some(path), _) => Ok(read_point_set(path)?.0),
            (None, Some(spec)) => Ok(generate(&spec.parse::<GenSpec>()?, seed)?),
            (None, None) => Err(CliError::Config(
                "a point set is required: pass --input or --gen".into(),
            )),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MetricKind {
    L2,
    #[value(alias = "empirical-l2")]
    Empirical,
}

#[derive(Args, Debug, Clone, Serialize)]
struct MetricArgs {
    #[arg(long, value_enum, default_value = "l2")]
    metric: MetricKind,
    /// Restrict the metric to these 1-based coordinates.
    #[arg(long, value_delimiter = ',')]
    indices: Option<Vec<usize>>,
}

impl MetricArgs {
    fn build(&self, n: usize) -> CliResult<Metric> {
        let m = match (&self.indices, self.metric) {
            (None, MetricKind::L2) => Metric::Euclidean,
            (None, MetricKind::Empirical) => Metric::EmpiricalL2,
            (Some(i), MetricKind::L2) => Metric::Restricted(IndexSet::from_one_based(i, n)?),
            (Some(i), MetricKind::Empirical) => {
                Metric::EmpiricalRestricted(IndexSet::from_one_based(i, n)?)
            }
        };
        m.validate(n)?;
        Ok(m)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DiscMode {
    Exact,
    Heuristic,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyKind {
    Greedy,
    Exhaustive,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScheduleArg {
    Gamma,
    Entropy,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BaseArg {
    Nat,
    Bit,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Emit a generated or loaded point set.
    Generate {
        #[command(flatten)]
        source: Source,
    },
    /// Discrepancy, exhaustive or by restarted local search.
    Disc {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "heuristic")]
        mode: DiscMode,
    },
    /// Hereditary discrepancy, exhaustive.
    Hdisc {
        #[command(flatten)]
        source: Source,
    },
    /// Spencer-type coloring by iterated partial coloring.
    Spencer {
        #[command(flatten)]
        source: Source,
    },
    /// Iterated partial coloring for sets of VC dimension d.
    Matousek {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// One partial coloring certified by the chain bound.
    Partial {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "gamma")]
        schedule: ScheduleArg,
    },
    /// γ₂ functional of an admissible sequence.
    Gamma2 {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value_t = 0)]
        s0: usize,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: StrategyKind,
    },
    /// Covering number with open balls centred in the set.
    Cover {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
    },
    /// Packing number.
    Pack {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
    },
    /// Entropy number e_k.
    EntropyNumber {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        k: u32,
    },
    /// Entropy of the quantized signed sum against its Φ estimate.
    Entropy {
        /// Coefficients, comma separated.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        a: Vec<f64>,
        #[arg(long, value_enum, default_value = "nat")]
        base: BaseArg,
    },
    /// Combinatorial dimension at scale eps.
    Vc {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        eps: f64,
        /// Use the absolute convex hull of the set.
        #[arg(long)]
        hull: bool,
    },
    /// Lower bound on hereditary discrepancy from the hull dimension.
    VcLower {
        #[command(flatten)]
        source: Source,
    },
    /// Packing numbers of projections of a {0,1} system against the VC bound.
    Haussler {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 32)]
        subsets: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Monte Carlo experiments on random coordinate projections.
    Lab {
        #[arg(value_enum)]
        experiment: lab::Experiment,
        /// JSON experiment config; unknown keys are rejected.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Disc { .. } => "disc",
            Command::Hdisc { .. } => "hdisc",
            Command::Spencer { .. } => "spencer",
            Command::Matousek { .. } => "matousek",
            Command::Partial { .. } => "partial",
            Command::Gamma2 { .. } => "gamma2",
            Command::Cover { .. } => "cover",
            Command::Pack { .. } => "pack",
            Command::EntropyNumber { .. } => "entropy-number",
            Command::Entropy { .. } => "entropy",
            Command::Vc { .. } => "vc",
            Command::VcLower { .. } => "vc-lower",
            Command::Haussler { .. } => "haussler",
            Command::Lab { .. } => "lab",
        }
    }
}

/// What a command hands back before it is wrapped in a report.
pub struct Outcome {
    pub exact: Option<bool>,
    pub result: Value,
    pub csv: String,
    /// Replaces the default config echo (lab commands echo the parsed file).
    pub config: Option<Value>,
    /// Replaces the command-line constants (lab configs may carry their own).
    pub constants: Option<Constants>,
}

impl Outcome {
    fn new(exact: Option<bool>, result: Value, csv: String) -> Self {
        Outcome {
            exact,
            result,
            csv,
            config: None,
            constants: None,
        }
    }
}

/// The resolved run configuration echoed into every report.
#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    #[serde(flatten)]
    command: &'a Command,
    #[serde(flatten)]
    global: &'a Global,
}

pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

/// Rewrites a serialized 0-based index set as 1-based.
fn rebase(v: &mut Value) {
    if let Value::Array(items) = v {
        for x in items {
            if let Some(i) = x.as_u64() {
                *x = json!(i + 1);
            }
        }
    }
}

fn positive_eps(eps: f64) -> CliResult<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("--eps must be positive and finite, got {eps}")))
    }
}

fn coloring_outcome(value: f64, coloring: &Coloring, exact: bool, extra: Value) -> Outcome {
    let mut result = json!({ "value": value, "exact": exact, "coloring": coloring.entries() });
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    Outcome::new(Some(exact), result, coloring_to_csv(coloring))
}

fn halving_outcome(h: &HalvingResult, extra: Value) -> Outcome {
    let mut o = coloring_outcome(h.result.value, &h.result.coloring, h.result.exact, extra);
    if let Value::Object(r) = &mut o.result {
        r.insert("rounds".into(), to_value(&h.rounds));
        r.insert("remainder".into(), json!(h.remainder));
        r.insert("remainder_bound".into(), json!(h.remainder_bound));
        r.insert("stitched_bound".into(), json!(h.stitched_bound));
        r.insert("fallback".into(), json!(h.fallback));
    }
    o
}

fn execute(cmd: &Command, g: &Global, constants: Constants) -> CliResult<Outcome> {
    let seed = g.seed;
    let halving = || HalvingOptions {
        round_budget: g.budget.unwrap_or(HalvingOptions::default().round_budget),
        constants,
    };
    let out = match cmd {
        Command::Generate { source } => {
            let t = source.load(seed)?;
            Outcome::new(
                None,
                json!({ "dim": t.dim(), "len": t.len(), "points": t.to_rows() }),
                to_csv(&t),
            )
        }
        Command::Disc { source, mode } => {
            let t = source.load(seed)?;
            let r = match mode {
                DiscMode::Exact => disc_exact(&t)?,
                DiscMode::Heuristic => disc_heuristic(&t, g.budget.unwrap_or(4096), seed)?,
            };
            coloring_outcome(r.value, &r.coloring, r.exact, json!({}))
        }
        Command::Hdisc { source } => {
            let t = source.load(seed)?;
            let r = hdisc_exact(&t)?;
            coloring_outcome(
                r.value,
                &r.coloring,
                true,
                json!({ "subset": r.subset.to_one_based() }),
            )
        }
        Command::Spencer { source } => {
            let t = source.load(seed)?;
            halving_outcome(&spencer_color_with(&t, seed, &halving())?, json!({}))
        }
        Command::Matousek { source, d } => {
            let t = source.load(seed)?;
            let r = matousek_color_with(&t, *d, seed, &halving())?;
            halving_outcome(
                &r.halving,
                json!({ "d": r.d, "scale": r.scale, "implied_constant": r.implied_constant }),
            )
        }
        Command::Partial { source, schedule } => {
            let t = source.load(seed)?;
            let (_, seq) = chaindisc::coloring::origin_sequence(&t)?;
            let sched = match schedule {
                ScheduleArg::Gamma => schedule_gamma(t.dim(), constants)?,
                ScheduleArg::Entropy => schedule_entropy(t.dim(), constants)?,
            };
            let r = partial_color(&t, &sched, &seq, g.budget.unwrap_or(100_000), seed)?;
            let mut o = coloring_outcome(
                r.chain_bound,
                &r.coloring,
                false,
                json!({
                    "chain_bound": r.chain_bound,
                    "zero_count": r.zero_count,
                    "method": r.method,
                    "budget_used": r.budget_used,
                    "links": r.links,
                    "schedule": sched,
                }),
            );
            o.exact = None;
            o
        }
        Command::Gamma2 {
            source,
            metric,
            s0,
            strategy,
        } => {
            let t = source.load(seed)?;
            let metric = metric.build(t.dim())?;
            let strat = match strategy {
                StrategyKind::Greedy => Strategy::GreedyPacking,
                StrategyKind::Exhaustive => Strategy::Exhaustive { s0: *s0 },
            };
            let seq = build_admissible(&t, &metric, strat)?;
            let value = gamma2(&t, &metric, *s0, &seq)?;
            let profile = gamma2_profile(&t, &metric, &seq)?;
            let exact = matches!(strategy, StrategyKind::Exhaustive);
            Outcome::new(
                Some(exact),
                json!({ "value": value, "exact": exact, "s0": s0, "depth": seq.depth(), "profile": profile }),
                csv_table(
                    &["s", "gamma2"],
                    profile
                        .iter()
                        .enumerate()
                        .map(|(s, v)| vec![s.to_string(), format!("{v:?}")]),
                ),
            )
        }
        Command::Cover { source, metric, eps } | Command::Pack { source, metric, eps } => {
            positive_eps(*eps)?;
            let t = source.load(seed)?;
            let metric = metric.build(t.dim())?;
            let r = if matches!(cmd, Command::Cover { .. }) {
                covering_number(&t, *eps, &metric)
            } else {
                packing_number(&t, *eps, &metric)
            };
            Outcome::new(
                Some(r.exact),
                to_value(&r),
                csv_table(
                    &["eps", "value", "exact"],
                    [vec![format!("{eps:?}"), r.value.to_string(), r.exact.to_string()]],
                ),
            )
        }
        Command::EntropyNumber { source, metric, k } => {
            let t = source.load(seed)?;
            let metric = metric.build(t.dim())?;
            let r = entropy_number(&t, *k, &metric);
            Outcome::new(
                Some(r.exact),
                to_value(&r),
                csv_table(
                    &["k", "value", "exact"],
                    [vec![k.to_string(), format!("{:?}", r.value), r.exact.to_string()]],
                ),
            )
        }
        Command::Entropy { a, base } => {
            let b = match base {
                BaseArg::Nat => Base::Natural,
                BaseArg::Bit => Base::Two,
            };
            let r = entropic_estimate(a, b)?;
            Outcome::new(
                Some(true),
                json!({ "H": r.h, "Phi": r.phi, "ratio": r.ratio, "base": r.base }),
                csv_table(
                    &["H", "Phi", "ratio"],
                    [vec![format!("{:?}", r.h), opt(r.phi), opt(r.ratio)]],
                ),
            )
        }
        Command::Vc { source, eps, hull } => {
            positive_eps(*eps)?;
            let t = source.load(seed)?;
            let r = vc_dim(&t, *eps, *hull)?;
            let mut result = to_value(&r);
            if let Some(idx) = result.pointer_mut("/witness/indices") {
                rebase(idx);
            }
            let rows = r
                .witness
                .iter()
                .flat_map(|w| w.indices.to_one_based().into_iter().zip(w.levels.clone()))
                .map(|(i, s)| vec![i.to_string(), format!("{s:?}")]);
            Outcome::new(Some(true), result, csv_table(&["coordinate", "level"], rows))
        }
        Command::VcLower { source } => {
            let t = source.load(seed)?;
            let r = hdisc_vc_lower(&t, None)?;
            let csv = csv_table(
                &["delta", "vc"],
                r.profile
                    .iter()
                    .map(|(d, v)| vec![format!("{d:?}"), v.to_string()]),
            );
            Outcome::new(Some(true), to_value(&r), csv)
        }
        Command::Haussler {
            source,
            d,
            subsets,
            steps,
        } => {
            let t = source.load(seed)?;
            let opts = HausslerOptions {
                subsets: *subsets,
                steps: *steps,
                seed,
            };
            let r = haussler_check(&t, *d, &opts)?;
            let mut result = to_value(&r);
            if let Some(Value::Array(rows)) = result.get_mut("rows") {
                for row in rows {
                    if let Some(idx) = row.get_mut("indices") {
                        rebase(idx);
                    }
                }
            }
            let exact = r.rows.iter().all(|row| row.exact);
            let csv = csv_table(
                &["size", "eps", "packing", "exact", "implied"],
                r.rows.iter().map(|row| {
                    vec![
                        row.indices.len().to_string(),
                        format!("{:?}", row.eps),
                        row.packing.to_string(),
                        row.exact.to_string(),
                        format!("{:?}", row.implied),
                    ]
                }),
            );
            Outcome::new(Some(exact), result, csv)
        }
        Command::Lab {
            experiment,
            config,
            source,
        } => {
            let file = config.as_deref().map(read_config).transpose()?;
            lab::run(*experiment, file, source.as_index_source(), g, constants)?
        }
    };
    Ok(out)
}

fn read_config(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    let constants = match &g.constants {
        Some(spec) => Constants::default().parse_overrides(spec)?,
        None => Constants::default(),
    };
    let outcome = execute(&cli.command, g, constants)?;
    if g.format == OutFormat::Csv {
        return Ok(outcome.csv);
    }
    let config = outcome.config.unwrap_or_else(|| {
        to_value(&RunConfig {
            command: &cli.command,
            global: g,
        })
    });
    let report = Report::new(
        cli.command.name(),
        config,
        g.seed,
        outcome.constants.unwrap_or(constants),
        outcome.exact,
        outcome.result,
    );
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(text)
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        let text = pool.install(|| run(&cli))?;
        emit(&text, cli.global.out.as_deref())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
