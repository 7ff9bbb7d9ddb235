//! Sure independence screening: score every candidate feature, sort, and
//! keep the top `d̂` by a max-ratio, hard or p-value cutoff.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::counts::marginal_counts_for;
use crate::dataset::{DataError, Feature, FeatureSet, Level, NodeDataset};
use crate::plr::{PlrBaseline, PlrError, PlrStat};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScreeningError {
    #[error(transparent)]
    Plr(#[from] PlrError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("max-ratio cutoff needs at least 2 scores, got {0}")]
    TooFewScores(usize),
    #[error("significance level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("hard cutoff node count must be at least 2, got {0}")]
    TooFewNodes(usize),
    #[error("duplicate interaction pair {0}&{1}")]
    DuplicatePair(usize, usize),
    #[error("interaction pair ({0}, {1}) must satisfy j < k")]
    UnorderedPair(usize, usize),
    #[error("bin count must be at least 2, got {0}")]
    TooFewBins(usize),
    #[error("value at position {0} is not finite")]
    NonFinite(usize),
    #[error("permutation count must be at least 1 for p-value ranking")]
    NoPermutations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plr,
    Pc,
}

/// Upper end of the max-ratio search range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchCap {
    /// Search `1..=p-1`.
    Off,
    /// `min(p - 1, 2 * floor(n / ln n))`.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardMode {
    NOverLogN,
    NMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    MaxRatio { cap: SearchCap },
    Hard(usize),
    HardMode(HardMode),
    /// Keep features whose permutation p-value is at most `α`.
    PValue(f64),
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff::MaxRatio {
            cap: SearchCap::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ranking {
    /// Statistic ranking when all columns share a level count, permutation
    /// p-values otherwise.
    #[default]
    Auto,
    Statistic,
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankedBy {
    Statistic,
    PValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interactions {
    #[default]
    None,
    /// Pairs among the `m` highest-ranked main effects.
    Top(usize),
    All,
}

/// How a pair `(j, k)` is turned into one categorical column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCoding {
    /// `K_j * K_k` levels, code `(x_j - 1) * K_k + x_k`.
    #[default]
    Composite,
    /// Product of 0-based level values, shifted to a 1-based code:
    /// `(x_j - 1) * (x_k - 1) + 1`. For binary columns this is the
    /// indicator of both being at their upper level.
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenOptions {
    pub cutoff: Cutoff,
    pub ranking: Ranking,
    pub permutations: usize,
    pub seed: u64,
    pub interactions: Interactions,
    pub coding: PairCoding,
}

impl Default for ScreenOptions {
    fn default() -> Self {
        Self {
            cutoff: Cutoff::default(),
            ranking: Ranking::Auto,
            permutations: 199,
            seed: 0,
            interactions: Interactions::None,
            coding: PairCoding::Composite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScreenFlags {
    /// Top score below `1e-8`: nothing to select.
    pub degenerate_scores: bool,
    /// The chosen max-ratio split had a numerically zero denominator.
    pub ratio_guard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningResult {
    pub method: Method,
    /// Candidates in scoring order: main effects by column, then pairs.
    pub features: Vec<Feature>,
    pub names: Vec<String>,
    /// Ranking score per candidate: the statistic, or `-ln p` when ranked
    /// by p-value.
    pub scores: Vec<f64>,
    /// Λ̂ (plr) or the Pearson χ² (pc) per candidate.
    pub statistics: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<Vec<PlrStat>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pvalues: Option<Vec<f64>>,
    pub ranked_by: RankedBy,
    /// Candidate indices by decreasing score.
    pub ranking: Vec<usize>,
    pub d_hat: usize,
    /// Score at rank `d̂ + 1`, if any.
    pub c_star_hat: Option<f64>,
    pub selected: FeatureSet,
    pub cutoff: Cutoff,
    pub flags: ScreenFlags,
}

impl ScreeningResult {
    pub fn selected_names(&self) -> Vec<String> {
        self.ranking[..self.d_hat]
            .iter()
            .map(|&i| self.names[i].clone())
            .collect()
    }

    pub fn score_of(&self, f: &Feature) -> Option<f64> {
        self.features.iter().position(|g| g == f).map(|i| self.scores[i])
    }
}

const RATIO_EPS: f64 = 1e-12;
const NOISE_FLOOR: f64 = 1e-8;

/// Max-ratio support size over scores sorted in decreasing order, searching
/// `j = 1..=cap` (clamped to `p - 1`). Returns `(d̂, guard_fired)`.
pub fn max_ratio_cutoff(sorted: &[f64], cap: usize) -> Result<(usize, bool), ScreeningError> {
    if sorted.len() < 2 {
        return Err(ScreeningError::TooFewScores(sorted.len()));
    }
    let top = sorted[0].max(0.0);
    let last = cap.clamp(1, sorted.len() - 1);
    let mut best = (1, f64::NEG_INFINITY);
    for j in 1..=last {
        let num = sorted[j - 1].max(0.0);
        let den = sorted[j].max(0.0);
        if den <= RATIO_EPS * top {
            return Ok((j, true));
        }
        let ratio = num / den;
        if ratio > best.1 {
            best = (j, ratio);
        }
    }
    Ok((best.0, false))
}

pub fn hard_cutoff(n: usize, mode: HardMode) -> Result<usize, ScreeningError> {
    if n < 2 {
        return Err(ScreeningError::TooFewNodes(n));
    }
    Ok(match mode {
        HardMode::NOverLogN => (n as f64 / (n as f64).ln()).floor() as usize,
        HardMode::NMinusOne => n - 1,
    })
}

fn search_cap(cap: SearchCap, n: usize, p: usize) -> usize {
    let limit = p.saturating_sub(1).max(1);
    match cap {
        SearchCap::Off => limit,
        SearchCap::Auto => limit.min(2 * hard_cutoff(n.max(2), HardMode::NOverLogN).unwrap_or(1)),
        SearchCap::Fixed(c) => limit.min(c.max(1)),
    }
}

/// Column of a candidate feature and its level count.
pub fn feature_column(ds: &NodeDataset, f: Feature, coding: PairCoding) -> (Vec<Level>, usize) {
    match f {
        Feature::Main(j) => (ds.column(j).to_vec(), ds.k_levels(j)),
        Feature::Pair(j, k) => pair_column(ds.column(j), ds.k_levels(j), ds.column(k), ds.k_levels(k), coding),
    }
}

fn pair_column(a: &[Level], ka: usize, b: &[Level], kb: usize, coding: PairCoding) -> (Vec<Level>, usize) {
    match coding {
        PairCoding::Composite => (
            a.iter().zip(b).map(|(&x, &y)| (x - 1) * kb as Level + y).collect(),
            ka * kb,
        ),
        PairCoding::Product => (
            a.iter().zip(b).map(|(&x, &y)| (x - 1) * (y - 1) + 1).collect(),
            (ka - 1) * (kb - 1) + 1,
        ),
    }
}

/// Appends one composite column per pair, named `"a&b"`.
pub fn interaction_expand(ds: &NodeDataset, pairs: &[(usize, usize)]) -> Result<NodeDataset, ScreeningError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut cols = Vec::with_capacity(pairs.len());
    let mut names = Vec::with_capacity(pairs.len());
    let mut levels = Vec::with_capacity(pairs.len());
    for &(j, k) in pairs {
        let f = Feature::pair(j, k).ok_or(ScreeningError::UnorderedPair(j, k))?;
        ds.check_column(j)?;
        ds.check_column(k)?;
        if !seen.insert((j, k)) {
            return Err(ScreeningError::DuplicatePair(j, k));
        }
        let (c, kl) = feature_column(ds, f, PairCoding::Composite);
        cols.push(c);
        names.push(f.label(ds.feature_names()));
        levels.push(kl);
    }
    Ok(ds.with_extra_columns(cols, names, levels)?)
}

/// Pearson χ² of the `Y × X` table over cells with positive expectation.
pub fn pearson_chi2(ds: &NodeDataset, x: &[Level], k: usize) -> f64 {
    let m = marginal_counts_for(ds, x, k);
    let n = ds.n() as f64;
    let mut acc = 0.0;
    for r in 0..m.r {
        for c in 0..m.k {
            let e = m.n_y[r] as f64 * m.n_j[c] as f64 / n;
            if e > 0.0 {
                let d = m.yj(r, c) as f64 - e;
                acc += d * d / e;
            }
        }
    }
    acc
}

fn candidates(ds: &NodeDataset, interactions: Interactions, main_order: Option<&[usize]>) -> Vec<Feature> {
    let p = ds.p();
    let mut out: Vec<Feature> = (0..p).map(Feature::Main).collect();
    match interactions {
        Interactions::None => {}
        Interactions::All => {
            for j in 0..p {
                for k in j + 1..p {
                    out.push(Feature::Pair(j, k));
                }
            }
        }
        Interactions::Top(m) => {
            let mut top: Vec<usize> = main_order.expect("main ranking")[..m.min(p)].to_vec();
            top.sort_unstable();
            for (a, &j) in top.iter().enumerate() {
                for &k in &top[a + 1..] {
                    out.push(Feature::Pair(j, k));
                }
            }
        }
    }
    out
}

fn rank(scores: &[f64], tiebreak: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(tiebreak[b].total_cmp(&tiebreak[a]))
            .then(a.cmp(&b))
    });
    order
}

struct Scored {
    statistics: Vec<f64>,
    decomposition: Option<Vec<PlrStat>>,
}

fn score_plr(ds: &NodeDataset, feats: &[Feature], coding: PairCoding, base: &PlrBaseline) -> Scored {
    let stats: Vec<PlrStat> = feats
        .par_iter()
        .map(|&f| {
            let (x, k) = feature_column(ds, f, coding);
            base.statistic_for(ds, &x, k)
        })
        .collect();
    Scored {
        statistics: stats.iter().map(|s| s.lambda).collect(),
        decomposition: Some(stats),
    }
}

fn score_pc(ds: &NodeDataset, feats: &[Feature], coding: PairCoding) -> Scored {
    Scored {
        statistics: feats
            .par_iter()
            .map(|&f| {
                let (x, k) = feature_column(ds, f, coding);
                pearson_chi2(ds, &x, k)
            })
            .collect(),
        decomposition: None,
    }
}

/// Permutation p-values. Features are processed in parallel, permutations
/// within a feature sequentially, so the result is order-independent.
fn permutation_pvalues(
    ds: &NodeDataset,
    feats: &[Feature],
    statistics: &[f64],
    opts: &ScreenOptions,
    method: Method,
    base: &PlrBaseline,
) -> Vec<f64> {
    use crate::rng::{self, tag};
    use rand::seq::SliceRandom;
    feats
        .par_iter()
        .zip(statistics)
        .enumerate()
        .map(|(i, (&f, &obs))| {
            let (x, k) = feature_column(ds, f, opts.coding);
            match method {
                Method::Plr => {
                    base.permutation_pvalue_for(ds, &x, k, obs, opts.permutations, opts.seed, i as u64)
                }
                Method::Pc => {
                    let tol = 1e-12 * (1.0 + obs.abs());
                    let mut exceed = 0usize;
                    let mut shuffled = x.clone();
                    for b in 0..opts.permutations {
                        shuffled.copy_from_slice(&x);
                        let mut g = rng::stream(opts.seed, &[tag::PERMUTATION, i as u64, b as u64]);
                        shuffled.shuffle(&mut g);
                        if pearson_chi2(ds, &shuffled, k) >= obs - tol {
                            exceed += 1;
                        }
                    }
                    (1 + exceed) as f64 / (opts.permutations + 1) as f64
                }
            }
        })
        .collect()
}

fn screen(ds: &NodeDataset, opts: &ScreenOptions, method: Method) -> Result<ScreeningResult, ScreeningError> {
    if let Cutoff::PValue(a) = opts.cutoff {
        if !(a > 0.0 && a < 1.0) {
            return Err(ScreeningError::InvalidAlpha(a));
        }
    }
    let base = PlrBaseline::new(ds)?;
    let by_pvalue = matches!(opts.cutoff, Cutoff::PValue(_))
        || match opts.ranking {
            Ranking::Auto => !ds.homogeneous_levels(),
            Ranking::Statistic => false,
            Ranking::Permutation => true,
        };
    if by_pvalue && opts.permutations == 0 {
        return Err(ScreeningError::NoPermutations);
    }
    let score = |feats: &[Feature]| match method {
        Method::Plr => score_plr(ds, feats, opts.coding, &base),
        Method::Pc => score_pc(ds, feats, opts.coding),
    };

    let main_order = match opts.interactions {
        Interactions::Top(_) => {
            let mains: Vec<Feature> = (0..ds.p()).map(Feature::Main).collect();
            let s = score(&mains).statistics;
            Some(rank(&s, &s))
        }
        _ => None,
    };
    let features = candidates(ds, opts.interactions, main_order.as_deref());
    let Scored {
        statistics,
        decomposition,
    } = score(&features);

    let (scores, pvalues) = if by_pvalue {
        let pv = permutation_pvalues(ds, &features, &statistics, opts, method, &base);
        (pv.iter().map(|p| -p.ln()).collect::<Vec<f64>>(), Some(pv))
    } else {
        (statistics.clone(), None)
    };
    let ranking = rank(&scores, &statistics);
    let sorted: Vec<f64> = ranking.iter().map(|&i| scores[i]).collect();

    let mut flags = ScreenFlags::default();
    let total = features.len();
    let d_hat = match opts.cutoff {
        Cutoff::MaxRatio { cap } => {
            if sorted[0] < NOISE_FLOOR {
                flags.degenerate_scores = true;
                0
            } else if total == 1 {
                1
            } else {
                let (d, guard) = max_ratio_cutoff(&sorted, search_cap(cap, ds.n(), total))?;
                flags.ratio_guard = guard;
                d
            }
        }
        Cutoff::Hard(d) => d.min(total),
        Cutoff::HardMode(m) => hard_cutoff(ds.n(), m)?.min(total),
        Cutoff::PValue(alpha) => {
            let pv = pvalues.as_ref().expect("p-values computed");
            ranking.iter().take_while(|&&i| pv[i] <= alpha).count()
        }
    };
    let c_star_hat = sorted.get(d_hat).copied();
    let selected = ranking[..d_hat].iter().map(|&i| features[i]).collect();
    let names = features.iter().map(|f| f.label(ds.feature_names())).collect();
    Ok(ScreeningResult {
        method,
        features,
        names,
        scores,
        statistics,
        decomposition,
        pvalues,
        ranked_by: if by_pvalue {
            RankedBy::PValue
        } else {
            RankedBy::Statistic
        },
        ranking,
        d_hat,
        c_star_hat,
        selected,
        cutoff: opts.cutoff,
        flags,
    })
}

pub fn plr_sis(ds: &NodeDataset, opts: &ScreenOptions) -> Result<ScreeningResult, ScreeningError> {
    screen(ds, opts, Method::Plr)
}

/// Network-free baseline ranked by the Pearson χ² statistic.
pub fn pc_sis(ds: &NodeDataset, opts: &ScreenOptions) -> Result<ScreeningResult, ScreeningError> {
    screen(ds, opts, Method::Pc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// Cut points at standard-normal quantiles `z_{k/K}`.
    NormalQuantile,
    /// Cut points at the sample's own quantiles (linear interpolation
    /// between order statistics).
    EmpiricalQuantile,
}

/// Maps reals to `1..=K`. Bin `k` holds `t_{k-1} < x <= t_k`, so a value on
/// a cut point goes to the lower bin.
pub fn discretize(values: &[f64], k: usize, scheme: Discretization) -> Result<Vec<Level>, ScreeningError> {
    if k < 2 {
        return Err(ScreeningError::TooFewBins(k));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(ScreeningError::NonFinite(i));
    }
    let cuts: Vec<f64> = match scheme {
        Discretization::NormalQuantile => {
            let z = Normal::standard();
            (1..k).map(|i| z.inverse_cdf(i as f64 / k as f64)).collect()
        }
        Discretization::EmpiricalQuantile => {
            let mut s = values.to_vec();
            s.sort_by(f64::total_cmp);
            (1..k).map(|i| quantile_sorted(&s, i as f64 / k as f64)).collect()
        }
    };
    Ok(values
        .iter()
        .map(|&v| 1 + cuts.iter().filter(|&&c| v > c).count() as Level)
        .collect())
}

fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let h = (s.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}
