//! Monte Carlo harness: simulate, screen with both methods, classify, and
//! aggregate per-method metrics.

use std::time::Instant;

use netscreen_core::classify::{self, ClassifierKind, ClassifierSpec, MetricsReport};
use netscreen_core::dataset::{FeatureSet, NodeDataset};
use netscreen_core::plr::PlrBaseline;
use netscreen_core::rng::{self, tag};
use netscreen_core::screening::{self, ScreenFlags, ScreenOptions, ScreeningResult};
use netscreen_core::simgen::{self, Model, SimulationConfig};
use netscreen_core::special::{chi2_cdf, ks_pvalue, ks_statistic};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `"1"` to `"9"`, or `"null"`.
    pub example: String,
    pub model: Model,
    pub n: usize,
    pub p: usize,
    pub replications: usize,
    pub seed: u64,
    pub screen: ScreenOptions,
    pub smoothing: f64,
    /// Run the classifiers as well as screening.
    pub classify: bool,
}

impl ExperimentConfig {
    pub fn new(example: &str, model: Model, n: usize, p: usize, replications: usize, seed: u64) -> Self {
        Self {
            example: example.into(),
            model,
            n,
            p,
            replications,
            seed,
            screen: ScreenOptions::default(),
            smoothing: 0.5,
            classify: true,
        }
    }

    fn simulation(&self, seed: u64) -> Result<SimulationConfig, CliError> {
        if self.example == "null" {
            return Ok(simgen::null_config(self.n, self.p, seed));
        }
        let id: u8 = self
            .example
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown example '{}'", self.example)))?;
        simgen::example_config(id, self.model, self.n, self.p, seed).map_err(CliError::from_sim)
    }
}

/// Accuracy (and binary AUC) of the three classifier types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracies {
    pub type1: f64,
    pub type2: f64,
    pub type3: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub auc: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub selected: FeatureSet,
    pub labels: Vec<String>,
    pub d_hat: usize,
    pub c_star_hat: Option<f64>,
    pub flags: ScreenFlags,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<Accuracies>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub seed: u64,
    pub plr: MethodOutcome,
    pub pc: MethodOutcome,
    /// Classifiers given the true supports.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<Accuracies>,
    /// Smallest PLR statistic over true features minus the largest over the
    /// rest; positive when the ranking separates them.
    pub separation_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / m).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    pub type1: MeanSe,
    pub type2: MeanSe,
    pub type3: MeanSe,
}

impl AccuracySummary {
    fn of(acc: &[Accuracies]) -> Option<Self> {
        if acc.is_empty() {
            return None;
        }
        let col = |f: fn(&Accuracies) -> f64| MeanSe::of(&acc.iter().map(f).collect::<Vec<_>>());
        Some(Self {
            type1: col(|a| a.type1),
            type2: col(|a| a.type2),
            type3: col(|a| a.type3),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: screening::Method,
    pub metrics: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<AccuracySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullReport {
    pub replications: usize,
    pub df_self: u64,
    pub df_network: u64,
    pub mean_2lambda_self: f64,
    pub mean_2lambda_network: f64,
    /// KS test of `2 Λ_self` against its χ² reference.
    pub ks_statistic: f64,
    pub ks_pvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub per_replication_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub software_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub s_true: FeatureSet,
    pub feature_labels: Vec<String>,
    pub replications: Vec<Replication>,
    pub summary: Vec<MethodSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<AccuracySummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub null: Option<NullReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

impl ExperimentReport {
    pub fn without_timings(&self) -> Self {
        Self {
            timings: None,
            ..self.clone()
        }
    }

    pub fn method(&self, m: screening::Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == m)
    }

    /// Replications whose PLR ranking puts every true feature above every
    /// other candidate.
    pub fn separated_count(&self) -> usize {
        self.replications.iter().filter(|r| r.separation_margin > 0.0).count()
    }
}

pub fn replication_seed(seed: u64, m: usize) -> u64 {
    rng::derive(seed, &[tag::REPLICATION, m as u64])
}

fn outcome(res: &ScreeningResult) -> MethodOutcome {
    MethodOutcome {
        selected: res.selected.clone(),
        labels: res.selected_names(),
        d_hat: res.d_hat,
        c_star_hat: res.c_star_hat,
        flags: res.flags,
        accuracy: None,
    }
}

fn accuracies(
    ds: &NodeDataset,
    s_y: &FeatureSet,
    s_a: &FeatureSet,
    cfg: &ExperimentConfig,
) -> Result<Accuracies, CliError> {
    let mut acc = [0.0; 3];
    let mut auc = [0.0; 3];
    let mut binary = true;
    for (i, kind) in [ClassifierKind::Type1, ClassifierKind::Type2, ClassifierKind::Type3]
        .into_iter()
        .enumerate()
    {
        let spec = ClassifierSpec {
            kind,
            s_y: s_y.clone(),
            s_a: s_a.clone(),
            smoothing: cfg.smoothing,
            coding: cfg.screen.coding,
        };
        let clf = classify::fit(&spec, ds).map_err(CliError::from_classify)?;
        let ev = classify::evaluate(&clf, ds).map_err(CliError::from_classify)?;
        acc[i] = ev.accuracy;
        match ev.auc {
            Some(a) => auc[i] = a,
            None => binary = false,
        }
    }
    Ok(Accuracies {
        type1: acc[0],
        type2: acc[1],
        type3: acc[2],
        auc: binary.then_some(auc),
    })
}

fn run_replication(cfg: &ExperimentConfig, m: usize) -> Result<(Replication, f64), CliError> {
    let start = Instant::now();
    let seed = replication_seed(cfg.seed, m);
    let sim = simgen::generate(&cfg.simulation(seed)?).map_err(CliError::from_sim)?;
    let ds = &sim.dataset;
    let opts = ScreenOptions {
        seed,
        ..cfg.screen.clone()
    };
    let plr = screening::plr_sis(ds, &opts).map_err(CliError::from_screening)?;
    let pc = screening::pc_sis(ds, &opts).map_err(CliError::from_screening)?;

    let truth = &sim.s_true;
    let mut min_true = f64::INFINITY;
    let mut max_other = f64::NEG_INFINITY;
    for (f, &s) in plr.features.iter().zip(&plr.statistics) {
        if truth.contains(f) {
            min_true = min_true.min(s);
        } else {
            max_other = max_other.max(s);
        }
    }
    let margin = if max_other == f64::NEG_INFINITY || min_true == f64::INFINITY {
        0.0
    } else {
        min_true - max_other
    };

    let mut rep = Replication {
        index: m,
        seed,
        plr: outcome(&plr),
        pc: outcome(&pc),
        oracle: None,
        separation_margin: margin,
    };
    if cfg.classify {
        rep.plr.accuracy = Some(accuracies(ds, &plr.selected, &plr.selected, cfg)?);
        rep.pc.accuracy = Some(accuracies(ds, &pc.selected, &pc.selected, cfg)?);
        let sim_cfg = cfg.simulation(seed)?;
        rep.oracle = Some(accuracies(ds, &sim_cfg.s_y, &sim_cfg.s_a, cfg)?);
    }
    Ok((rep, start.elapsed().as_secs_f64()))
}

/// `(2 Λ_self, 2 Λ_network, df_self, df_network, seconds)` for one replicate.
type NullRow = (f64, f64, u64, u64, f64);

fn run_null(cfg: &ExperimentConfig) -> Result<(NullReport, Vec<f64>), CliError> {
    let rows: Vec<Result<NullRow, CliError>> = (0..cfg.replications)
        .into_par_iter()
        .map(|m| {
            let start = Instant::now();
            let seed = replication_seed(cfg.seed, m);
            let sim = simgen::generate(&cfg.simulation(seed)?).map_err(CliError::from_sim)?;
            let ds = &sim.dataset;
            let base = PlrBaseline::new(ds).map_err(|e| CliError::Degenerate(e.to_string()))?;
            let s = base.statistic_for(ds, ds.column(0), ds.k_levels(0));
            Ok((
                2.0 * s.lambda_self,
                2.0 * s.lambda_network,
                s.df_self,
                s.df_network,
                start.elapsed().as_secs_f64(),
            ))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (df_self, df_network) = rows.first().map(|r| (r.2, r.3)).unwrap_or((0, 0));
    let selfs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let nets: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let d = ks_statistic(&selfs, |x| chi2_cdf(x, df_self as f64));
    Ok((
        NullReport {
            replications: rows.len(),
            df_self,
            df_network,
            mean_2lambda_self: MeanSe::of(&selfs).mean,
            mean_2lambda_network: MeanSe::of(&nets).mean,
            ks_statistic: d,
            ks_pvalue: ks_pvalue(d, rows.len()),
        },
        rows.iter().map(|r| r.4).collect(),
    ))
}

/// Runs every replication. Replications are independent work items with
/// their own seeds, so the report does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    if cfg.replications == 0 {
        return Err(CliError::Usage("at least one replication is required".into()));
    }
    let start = Instant::now();
    let probe = cfg.simulation(cfg.seed)?;
    let s_true = probe.s_true();
    let labels = s_true.iter().map(|f| f.to_string()).collect();
    let mut report = ExperimentReport {
        software_version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        config: cfg.clone(),
        s_true: s_true.clone(),
        feature_labels: labels,
        replications: Vec::new(),
        summary: Vec::new(),
        oracle: None,
        null: None,
        timings: None,
    };
    if cfg.example == "null" {
        let (null, per) = run_null(cfg)?;
        report.null = Some(null);
        report.timings = Some(Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            per_replication_seconds: per,
        });
        return Ok(report);
    }

    let results: Vec<Result<(Replication, f64), CliError>> = (0..cfg.replications)
        .into_par_iter()
        .map(|m| run_replication(cfg, m))
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (reps, per): (Vec<Replication>, Vec<f64>) = results.into_iter().unzip();

    for method in [screening::Method::Plr, screening::Method::Pc] {
        let pick = |r: &Replication| -> MethodOutcome {
            match method {
                screening::Method::Plr => r.plr.clone(),
                screening::Method::Pc => r.pc.clone(),
            }
        };
        let outcomes: Vec<MethodOutcome> = reps.iter().map(pick).collect();
        let mut metrics = classify::screening_metrics(outcomes.iter().map(|o| &o.selected), &s_true)
            .map_err(CliError::from_classify)?;
        let acc: Vec<Accuracies> = outcomes.iter().filter_map(|o| o.accuracy).collect();
        let accuracy = AccuracySummary::of(&acc);
        if let Some(a) = &accuracy {
            metrics.acc = Some(a.type3.mean);
            let aucs: Vec<f64> = acc.iter().filter_map(|a| a.auc.map(|v| v[2])).collect();
            if aucs.len() == acc.len() {
                metrics.auc = Some(MeanSe::of(&aucs).mean);
            }
        }
        report.summary.push(MethodSummary {
            method,
            metrics,
            accuracy,
        });
    }
    let oracle: Vec<Accuracies> = reps.iter().filter_map(|r| r.oracle).collect();
    report.oracle = AccuracySummary::of(&oracle);
    report.replications = reps;
    report.timings = Some(Timings {
        total_seconds: start.elapsed().as_secs_f64(),
        per_replication_seconds: per,
    });
    Ok(report)
}

/// Fixed-width summary: one row per method with CMF, IMF, per-feature
/// coverage and the three accuracies.
pub fn render_table(report: &ExperimentReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    if let Some(null) = &report.null {
        let _ = writeln!(out, "null calibration over {} replications", null.replications);
        let _ = writeln!(
            out,
            "mean 2*lambda_self    {:>9.4}  (df {})",
            null.mean_2lambda_self, null.df_self
        );
        let _ = writeln!(
            out,
            "mean 2*lambda_network {:>9.4}  (df {})",
            null.mean_2lambda_network, null.df_network
        );
        let _ = writeln!(out, "KS D = {:.4}, p = {:.4}", null.ks_statistic, null.ks_pvalue);
        return out;
    }
    let c = &report.config;
    let _ = writeln!(
        out,
        "example {} ({:?}), n = {}, p = {}, M = {}",
        c.example, c.model, c.n, c.p, c.replications
    );
    let mut header = format!("{:<8} {:>6} {:>6}", "method", "CMF", "IMF");
    for f in report.s_true.iter() {
        header += &format!(" {:>8}", format!("CP({f})"));
    }
    header += &format!(" {:>6} {:>6} {:>6}", "Acc1", "Acc2", "Acc3");
    let _ = writeln!(out, "{header}");
    let acc_cols = |a: &Option<AccuracySummary>| match a {
        Some(a) => format!(" {:>6.3} {:>6.3} {:>6.3}", a.type1.mean, a.type2.mean, a.type3.mean),
        None => format!(" {:>6} {:>6} {:>6}", "-", "-", "-"),
    };
    for s in &report.summary {
        let name = match s.method {
            screening::Method::Plr => "PLR-SIS",
            screening::Method::Pc => "PC-SIS",
        };
        let mut row = format!("{:<8} {:>6.2} {:>6.2}", name, s.metrics.cmf, s.metrics.imf);
        for cp in &s.metrics.cp {
            row += &format!(" {:>8.2}", cp.cp);
        }
        row += &acc_cols(&s.accuracy);
        let _ = writeln!(out, "{row}");
    }
    if report.oracle.is_some() {
        let mut row = format!("{:<8} {:>6} {:>6}", "TRUE", "-", "-");
        for _ in report.s_true.iter() {
            row += &format!(" {:>8}", "-");
        }
        row += &acc_cols(&report.oracle);
        let _ = writeln!(out, "{row}");
    }
    out
}

/// Long-format rows `replication,method,metric,value` for plotting.
pub fn long_rows(report: &ExperimentReport) -> Vec<(usize, String, String, f64)> {
    let mut rows = Vec::new();
    if report.null.is_some() {
        return rows;
    }
    for r in &report.replications {
        for (name, o) in [("plr", &r.plr), ("pc", &r.pc)] {
            let correct = o.selected.intersection_len(&report.s_true);
            rows.push((r.index, name.to_string(), "cmf".to_string(), correct as f64));
            rows.push((r.index, name.to_string(), "imf".into(), (o.selected.len() - correct) as f64));
            rows.push((r.index, name.to_string(), "d_hat".into(), o.d_hat as f64));
            for f in report.s_true.iter() {
                rows.push((
                    r.index,
                    name.to_string(),
                    format!("cp_{f}"),
                    f64::from(u8::from(o.selected.contains(f))),
                ));
            }
            if let Some(a) = &o.accuracy {
                rows.push((r.index, name.to_string(), "acc_type1".into(), a.type1));
                rows.push((r.index, name.to_string(), "acc_type2".into(), a.type2));
                rows.push((r.index, name.to_string(), "acc_type3".into(), a.type3));
            }
        }
        if let Some(a) = &r.oracle {
            rows.push((r.index, "true".into(), "acc_type1".into(), a.type1));
            rows.push((r.index, "true".into(), "acc_type2".into(), a.type2));
            rows.push((r.index, "true".into(), "acc_type3".into(), a.type3));
        }
        rows.push((r.index, "plr".into(), "separation_margin".into(), r.separation_margin));
    }
    rows
}
