//! Subcommand implementations. Each takes parsed arguments and returns the
//! paths it wrote.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netscreen_core::classify::{self, ClassifierKind, ClassifierSpec, Evaluation};
use netscreen_core::dataset::{Feature, FeatureSet, NodeDataset};
use netscreen_core::screening::{
    self, Cutoff, HardMode, Interactions, PairCoding, Ranking, ScreenOptions, ScreeningResult, SearchCap,
};
use netscreen_core::simgen::{self, Model, SimulationConfig};
use serde::{Deserialize, Serialize};

use crate::experiment::{self, ExperimentConfig, ExperimentReport};
use crate::formats::{self, DataPaths, Meta};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "netscreen", version, about = "Feature screening and classification on network data")]
pub struct Cli {
    /// Worker thread cap. Results do not depend on it.
    #[arg(long, global = true, env = "NETSCREEN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic dataset.
    Simulate(SimulateArgs),
    /// Rank features and pick a support.
    Screen(ScreenArgs),
    /// Fit and evaluate a classifier.
    Classify(ClassifyArgs),
    /// Run a Monte Carlo experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Nnb,
    Nlr,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Nnb => Model::Nnb,
            ModelArg::Nlr => Model::Nlr,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Reference example 1 to 9, or `null`.
    #[arg(long, conflicts_with = "config")]
    pub example: Option<String>,
    /// JSON simulation configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "nnb")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub p: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Plr,
    Pc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RankingArg {
    Auto,
    Statistic,
    Permutation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CodingArg {
    Composite,
    Product,
}

/// Options shared by `screen` and `experiment`.
#[derive(Debug, Args)]
pub struct ScreenFlagsArgs {
    /// maxratio, maxratio:off, maxratio:<cap>, hard:<d>, hard:nlogn,
    /// hard:n-1 or pvalue:<alpha>
    #[arg(long, default_value = "maxratio")]
    pub cutoff: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub ranking: RankingArg,
    /// Permutations per feature for p-value ranking.
    #[arg(long, default_value_t = 199)]
    pub perms: usize,
    /// none, top, top:<m> or all
    #[arg(long, default_value = "none")]
    pub interactions: String,
    #[arg(long, value_enum, default_value = "composite")]
    pub coding: CodingArg,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory holding nodes.csv, edges.csv and meta.json.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, conflicts_with = "data")]
    pub nodes: Option<PathBuf>,
    #[arg(long, conflicts_with = "data")]
    pub edges: Option<PathBuf>,
    #[arg(long, conflicts_with = "data")]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "plr")]
    pub method: MethodArg,
    #[command(flatten)]
    pub flags: ScreenFlagsArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// 1, 2 or 3
    #[arg(long = "type", default_value_t = 3)]
    pub kind: u8,
    /// Screening result whose selection feeds both feature roles.
    #[arg(long)]
    pub selected: Option<PathBuf>,
    /// Comma-separated self-related features (names, 1-based numbers, `a&b`).
    #[arg(long)]
    pub sy: Option<String>,
    /// Comma-separated network-related features.
    #[arg(long)]
    pub sa: Option<String>,
    /// Training fraction; transductive evaluation when absent.
    #[arg(long)]
    pub split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub smoothing: f64,
    #[arg(long, value_enum, default_value = "composite")]
    pub coding: CodingArg,
    /// Require an AUC (binary responses only).
    #[arg(long)]
    pub auc: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// 1 to 9, or `null` for the calibration study.
    #[arg(long)]
    pub example: String,
    #[arg(long, value_enum, default_value = "nnb")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub p: usize,
    #[arg(long = "M", alias = "replications", default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub flags: ScreenFlagsArgs,
    #[arg(long, default_value_t = 0.5)]
    pub smoothing: f64,
    /// Skip the classifiers.
    #[arg(long)]
    pub no_classify: bool,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_cutoff(s: &str) -> Result<Cutoff, CliError> {
    let bad = || CliError::Usage(format!("invalid cutoff '{s}'"));
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    match (head, arg) {
        ("maxratio", None) => Ok(Cutoff::MaxRatio { cap: SearchCap::Auto }),
        ("maxratio", Some("off")) => Ok(Cutoff::MaxRatio { cap: SearchCap::Off }),
        ("maxratio", Some("auto")) => Ok(Cutoff::MaxRatio { cap: SearchCap::Auto }),
        ("maxratio", Some(c)) => Ok(Cutoff::MaxRatio {
            cap: SearchCap::Fixed(c.parse().map_err(|_| bad())?),
        }),
        ("hard", Some("nlogn")) => Ok(Cutoff::HardMode(HardMode::NOverLogN)),
        ("hard", Some("n-1")) => Ok(Cutoff::HardMode(HardMode::NMinusOne)),
        ("hard", Some(d)) => Ok(Cutoff::Hard(d.parse().map_err(|_| bad())?)),
        ("pvalue", Some(a)) => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            if !(a > 0.0 && a < 1.0) {
                return Err(bad());
            }
            Ok(Cutoff::PValue(a))
        }
        _ => Err(bad()),
    }
}

pub fn parse_interactions(s: &str, n: usize) -> Result<Interactions, CliError> {
    match s.split_once(':') {
        None if s == "none" => Ok(Interactions::None),
        None if s == "all" => Ok(Interactions::All),
        None if s == "top" => Ok(Interactions::Top(
            screening::hard_cutoff(n.max(2), HardMode::NOverLogN).map_err(CliError::from_screening)?,
        )),
        Some(("top", m)) => Ok(Interactions::Top(
            m.parse().map_err(|_| CliError::Usage(format!("invalid interactions '{s}'")))?,
        )),
        _ => Err(CliError::Usage(format!("invalid interactions '{s}'"))),
    }
}

fn coding(c: CodingArg) -> PairCoding {
    match c {
        CodingArg::Composite => PairCoding::Composite,
        CodingArg::Product => PairCoding::Product,
    }
}

pub fn screen_options(flags: &ScreenFlagsArgs, n: usize, seed: u64) -> Result<ScreenOptions, CliError> {
    Ok(ScreenOptions {
        cutoff: parse_cutoff(&flags.cutoff)?,
        ranking: match flags.ranking {
            RankingArg::Auto => Ranking::Auto,
            RankingArg::Statistic => Ranking::Statistic,
            RankingArg::Permutation => Ranking::Permutation,
        },
        permutations: flags.perms,
        seed,
        interactions: parse_interactions(&flags.interactions, n)?,
        coding: coding(flags.coding),
    })
}

fn data_paths(d: &DataArgs) -> Result<DataPaths, CliError> {
    if let Some(dir) = &d.data {
        return Ok(DataPaths::in_dir(dir));
    }
    let nodes = d
        .nodes
        .clone()
        .ok_or_else(|| CliError::Usage("pass --data <dir> or --nodes <file>".into()))?;
    let dir = nodes.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(DataPaths {
        edges: d.edges.clone().unwrap_or_else(|| dir.join(formats::EDGES_FILE)),
        meta: d.meta.clone().unwrap_or_else(|| dir.join(formats::META_FILE)),
        nodes,
    })
}

pub fn simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg: SimulationConfig = match (&args.config, &args.example) {
        (Some(path), None) => formats::read_json(path)?,
        (None, Some(ex)) if ex == "null" => simgen::null_config(args.n, args.p, 0),
        (None, Some(ex)) => {
            let id: u8 = ex.parse().map_err(|_| CliError::Usage(format!("unknown example '{ex}'")))?;
            simgen::example_config(id, args.model.into(), args.n, args.p, 0).map_err(CliError::from_sim)?
        }
        _ => return Err(CliError::Usage("pass exactly one of --example or --config".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let sim = simgen::generate(&cfg).map_err(CliError::from_sim)?;
    formats::write_dataset(&args.out, &sim.dataset, Some(&cfg))?;
    let p = DataPaths::in_dir(&args.out);
    Ok(vec![p.nodes, p.edges, p.meta])
}

/// JSON written by `screen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenOutput {
    pub selected_names: Vec<String>,
    pub d_hat: usize,
    pub c_star_hat: Option<f64>,
    pub options: ScreenOptions,
    pub result: ScreeningResult,
}

pub fn screen(args: &ScreenArgs) -> Result<ScreenOutput, CliError> {
    // reject bad flags before touching the filesystem
    parse_cutoff(&args.flags.cutoff)?;
    parse_interactions(&args.flags.interactions, 2)?;
    let (ds, _meta) = formats::read_dataset(&data_paths(&args.data)?)?;
    let opts = screen_options(&args.flags, ds.n(), args.seed)?;
    let result = match args.method {
        MethodArg::Plr => screening::plr_sis(&ds, &opts),
        MethodArg::Pc => screening::pc_sis(&ds, &opts),
    }
    .map_err(CliError::from_screening)?;
    let out = ScreenOutput {
        selected_names: result.selected_names(),
        d_hat: result.d_hat,
        c_star_hat: result.c_star_hat,
        options: opts,
        result,
    };
    formats::write_json(&args.out, &out)?;
    Ok(out)
}

/// Parses `x1,3,x2&x4` against the dataset's names; numbers are 1-based.
pub fn parse_features(spec: &str, ds: &NodeDataset) -> Result<FeatureSet, CliError> {
    let names = ds.feature_names();
    let one = |tok: &str| -> Result<usize, CliError> {
        let tok = tok.trim();
        if let Some(j) = names.iter().position(|n| n == tok) {
            return Ok(j);
        }
        match tok.parse::<usize>() {
            Ok(j) if j >= 1 && j <= ds.p() => Ok(j - 1),
            _ => Err(CliError::Usage(format!("unknown feature '{tok}'"))),
        }
    };
    let mut set = FeatureSet::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let f = match tok.split_once('&') {
            None => Feature::Main(one(tok)?),
            Some((a, b)) => {
                let (a, b) = (one(a)?, one(b)?);
                Feature::pair(a.min(b), a.max(b)).ok_or_else(|| CliError::Usage(format!("invalid pair '{tok}'")))?
            }
        };
        set.insert(f);
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub kind: ClassifierKind,
    pub s_y: Vec<String>,
    pub s_a: Vec<String>,
    /// `transductive` or `split:<fraction>`
    pub mode: String,
    pub evaluation: Evaluation,
}

pub fn classify(args: &ClassifyArgs) -> Result<ClassifyOutput, CliError> {
    let kind = match args.kind {
        1 => ClassifierKind::Type1,
        2 => ClassifierKind::Type2,
        3 => ClassifierKind::Type3,
        k => return Err(CliError::Usage(format!("classifier type must be 1, 2 or 3, got {k}"))),
    };
    let (ds, _meta): (NodeDataset, Meta) = formats::read_dataset(&data_paths(&args.data)?)?;
    let mut coding_used = coding(args.coding);
    let from_result = match &args.selected {
        Some(path) => {
            let out: ScreenOutput = formats::read_json(path)?;
            coding_used = out.options.coding;
            Some(out.result.selected)
        }
        None => None,
    };
    let s_y = match (&args.sy, &from_result) {
        (Some(s), _) => parse_features(s, &ds)?,
        (None, Some(sel)) => sel.clone(),
        (None, None) => FeatureSet::new(),
    };
    let s_a = match (&args.sa, &from_result) {
        (Some(s), _) => parse_features(s, &ds)?,
        (None, Some(sel)) => sel.clone(),
        (None, None) => FeatureSet::new(),
    };
    if args.auc && ds.r_levels() != 2 {
        return Err(CliError::from_classify(classify::ClassifyError::AucNeedsBinary(ds.r_levels())));
    }
    let spec = ClassifierSpec {
        kind,
        s_y: s_y.clone(),
        s_a: s_a.clone(),
        smoothing: args.smoothing,
        coding: coding_used,
    };
    let (evaluation, mode) = match args.split {
        Some(frac) => (
            classify::evaluate_split(&spec, &ds, frac, args.seed).map_err(CliError::from_classify)?,
            format!("split:{frac}"),
        ),
        None => {
            let clf = classify::fit(&spec, &ds).map_err(CliError::from_classify)?;
            (
                classify::evaluate(&clf, &ds).map_err(CliError::from_classify)?,
                "transductive".to_string(),
            )
        }
    };
    let label = |s: &FeatureSet| s.iter().map(|f| f.label(ds.feature_names())).collect();
    let out = ClassifyOutput {
        kind,
        s_y: label(&s_y),
        s_a: label(&s_a),
        mode,
        evaluation,
    };
    formats::write_json(&args.out, &out)?;
    Ok(out)
}

pub fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::new(&args.example, args.model.into(), args.n, args.p, args.m, args.seed);
    cfg.screen = screen_options(&args.flags, args.n, args.seed)?;
    cfg.smoothing = args.smoothing;
    cfg.classify = !args.no_classify;
    Ok(cfg)
}

/// Writes `report.json`, `table.txt` and `long.csv` under `dir`.
pub fn write_experiment(dir: &Path, report: &ExperimentReport) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let json = dir.join("report.json");
    formats::write_json(&json, report)?;
    let table = dir.join("table.txt");
    std::fs::write(&table, experiment::render_table(report)).map_err(|e| CliError::io(table.display(), e))?;
    let long = dir.join("long.csv");
    let mut w = csv::Writer::from_path(&long).map_err(|e| CliError::io(long.display(), e))?;
    w.write_record(["replication", "method", "metric", "value"])
        .map_err(|e| CliError::io(long.display(), e))?;
    for (rep, method, metric, value) in experiment::long_rows(report) {
        w.write_record([rep.to_string(), method, metric, value.to_string()])
            .map_err(|e| CliError::io(long.display(), e))?;
    }
    w.flush().map_err(|e| CliError::io(long.display(), e))?;
    Ok(vec![json, table, long])
}

pub fn run_experiment(args: &ExperimentArgs) -> Result<ExperimentReport, CliError> {
    let cfg = experiment_config(args)?;
    let report = experiment::run_experiment(&cfg)?;
    write_experiment(&args.out, &report)?;
    Ok(report)
}
