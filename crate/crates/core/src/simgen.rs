//! Synthetic networks with categorical responses and features.
//!
//! Two response models: a naive-Bayes model (responses first, then
//! features given the response) and a logistic model (features first, then
//! the response). Edges follow a sigmoid of feature similarities plus a
//! response-homophily offset.
//!
//! Model tables use 0-based levels; they are stored 1-based, so level `l` is code `l + 1`.
//! Every random quantity comes from a keyed stream, so a configuration and a
//! seed fix the dataset bit for bit.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DataError, Feature, FeatureSet, Level, NodeDataset, RawDataset};
use crate::rng::{self, tag};
use crate::screening::{discretize, Discretization, ScreeningError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Discretize(#[from] ScreeningError),
    #[error("unknown example {0}")]
    UnknownExample(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(&'static str),
    #[error("column {0}: {1}")]
    BadColumn(usize, String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Nnb,
    Nlr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseModel {
    /// Uniform over the `R` levels.
    Uniform,
    /// Binary: `P(Y = 1) = sigmoid(intercept + Σ β · Π x)`, each term a
    /// product of 0-based feature values over the listed columns.
    Logistic {
        intercept: f64,
        terms: Vec<(Vec<usize>, f64)>,
    },
}

/// Distribution of one feature column. Probability vectors run over the
/// column's levels in code order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnModel {
    Marginal { probs: Vec<f64> },
    /// `probs[r][v]`
    GivenResponse { probs: Vec<Vec<f64>> },
    /// `probs[r][u][v]` with `u` the parent's level.
    GivenResponseAndParent { parent: usize, probs: Vec<Vec<Vec<f64>>> },
    /// `probs[u][v]`
    GivenParent { parent: usize, probs: Vec<Vec<f64>> },
    /// Normal with per-response mean and variance; discretised after the
    /// network is drawn.
    Normal { means: Vec<f64>, variances: Vec<f64> },
}

impl ColumnModel {
    fn uses_response(&self) -> bool {
        matches!(
            self,
            ColumnModel::GivenResponse { .. }
                | ColumnModel::GivenResponseAndParent { .. }
                | ColumnModel::Normal { .. }
        )
    }

    fn bernoulli(p1: f64) -> Vec<f64> {
        vec![1.0 - p1, p1]
    }
}

/// Rates of the edge observation error channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    /// Probability that a true edge is observed.
    pub keep_rate: f64,
    /// Probability that a non-edge is observed as an edge.
    pub add_rate: f64,
}

impl Perturbation {
    /// `keep = 1 - n^(s-1)`, `add = 10 n^(s-2)`.
    pub fn from_exponent(n: usize, s: f64) -> Self {
        let n = n as f64;
        Self {
            keep_rate: 1.0 - n.powf(s - 1.0),
            add_rate: (10.0 * n.powf(s - 2.0)).min(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousOutput {
    pub bins: usize,
    pub scheme: Discretization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub label: String,
    pub model: Model,
    pub n: usize,
    pub p: usize,
    pub r_levels: usize,
    pub response: ResponseModel,
    /// Explicit column models by 0-based index; other columns use `noise`.
    pub columns: Vec<(usize, ColumnModel)>,
    pub noise: ColumnModel,
    pub s_y: FeatureSet,
    pub s_a: FeatureSet,
    /// Similarity strength per network-related feature. Pairs compare
    /// both columns jointly; continuous columns compare signs.
    pub phi: Vec<(Feature, f64)>,
    pub gamma: f64,
    pub omega_same: f64,
    pub omega_diff: f64,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    #[serde(default)]
    pub continuous: Option<ContinuousOutput>,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn s_true(&self) -> FeatureSet {
        self.s_y.iter().chain(self.s_a.iter()).copied().collect()
    }

    fn column_model(&self, j: usize) -> &ColumnModel {
        self.columns
            .iter()
            .find(|(c, _)| *c == j)
            .map(|(_, m)| m)
            .unwrap_or(&self.noise)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Invalid(m));
        if self.n < 2 || self.p == 0 {
            return bad(format!("need n >= 2 and p >= 1, got n={} p={}", self.n, self.p));
        }
        if self.r_levels < 2 {
            return bad("need at least 2 response levels".into());
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1), got {}", self.gamma));
        }
        if let ResponseModel::Logistic { terms, .. } = &self.response {
            if self.r_levels != 2 {
                return bad("logistic response needs 2 levels".into());
            }
            if terms.iter().flat_map(|(c, _)| c).any(|&c| c >= self.p) {
                return bad("logistic term references a missing column".into());
            }
        }
        let in_range = |f: &Feature| match *f {
            Feature::Main(j) => j < self.p,
            Feature::Pair(j, k) => j < k && k < self.p,
        };
        if !self.s_y.iter().chain(self.s_a.iter()).all(in_range) || !self.phi.iter().all(|(f, _)| in_range(f)) {
            return bad("support references a missing column".into());
        }
        for j in 0..self.p {
            let m = self.column_model(j);
            let check = |v: &Vec<f64>| v.iter().all(|&q| (0.0..=1.0).contains(&q)) && (v.iter().sum::<f64>() - 1.0).abs() < 1e-9;
            let ok = match m {
                ColumnModel::Marginal { probs } => check(probs),
                ColumnModel::GivenResponse { probs } => probs.len() == self.r_levels && probs.iter().all(check),
                ColumnModel::GivenResponseAndParent { parent, probs } => {
                    *parent < j && probs.len() == self.r_levels && probs.iter().flatten().all(check)
                }
                ColumnModel::GivenParent { parent, probs } => *parent < j && probs.iter().all(check),
                ColumnModel::Normal { means, variances } => {
                    means.len() == self.r_levels
                        && variances.len() == self.r_levels
                        && variances.iter().all(|&v| v > 0.0)
                        && self.continuous.is_some()
                }
            };
            if !ok {
                return Err(SimError::BadColumn(j + 1, "malformed column model".into()));
            }
            if let ColumnModel::GivenResponseAndParent { parent, .. } | ColumnModel::GivenParent { parent, .. } = m {
                if matches!(self.column_model(*parent), ColumnModel::Normal { .. }) {
                    return Err(SimError::BadColumn(j + 1, "parent column must be categorical".into()));
                }
            }
            if self.model == Model::Nlr && m.uses_response() {
                return Err(SimError::BadColumn(j + 1, "logistic model columns cannot depend on the response".into()));
            }
        }
        match (self.model, &self.response) {
            (Model::Nnb, ResponseModel::Uniform) | (Model::Nlr, ResponseModel::Logistic { .. }) => Ok(()),
            _ => Err(SimError::ModelMismatch("response model does not match the model kind")),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Edge probability for a pair with the given similarity indicators.
pub fn edge_probability(config: &SimulationConfig, same_response: bool, similar: &[bool]) -> f64 {
    let omega = if same_response {
        config.omega_same
    } else {
        config.omega_diff
    } - config.gamma * (config.n as f64).ln();
    let s: f64 = config
        .phi
        .iter()
        .zip(similar)
        .filter(|(_, &b)| b)
        .map(|((_, w), _)| w)
        .sum();
    sigmoid(s + omega)
}

fn draw(probs: &[f64], u: f64) -> Level {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as Level + 1;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as Level + 1
}

#[derive(Debug, Clone)]
pub struct Simulated {
    pub dataset: NodeDataset,
    /// Pre-discretisation values of continuous columns.
    pub continuous: Option<Vec<Vec<f64>>>,
    pub s_true: FeatureSet,
}

enum Col {
    Cat(Vec<Level>, usize),
    Real(Vec<f64>),
}

fn gen_column(config: &SimulationConfig, j: usize, y: Option<&[Level]>, done: &[Col]) -> Col {
    let n = config.n;
    let mut g = rng::stream(config.seed, &[tag::COLUMN, j as u64]);
    let parent_col = |p: usize| match &done[p] {
        Col::Cat(c, _) => c,
        Col::Real(_) => unreachable!("validated: categorical parent"),
    };
    let yv = |i: usize| y.expect("response drawn first")[i] as usize - 1;
    match config.column_model(j) {
        ColumnModel::Marginal { probs } => Col::Cat((0..n).map(|_| draw(probs, g.random())).collect(), probs.len()),
        ColumnModel::GivenResponse { probs } => Col::Cat(
            (0..n).map(|i| draw(&probs[yv(i)], g.random())).collect(),
            probs[0].len(),
        ),
        ColumnModel::GivenResponseAndParent { parent, probs } => {
            let pc = parent_col(*parent);
            Col::Cat(
                (0..n)
                    .map(|i| draw(&probs[yv(i)][pc[i] as usize - 1], g.random()))
                    .collect(),
                probs[0][0].len(),
            )
        }
        ColumnModel::GivenParent { parent, probs } => {
            let pc = parent_col(*parent);
            Col::Cat(
                (0..n).map(|i| draw(&probs[pc[i] as usize - 1], g.random())).collect(),
                probs[0].len(),
            )
        }
        ColumnModel::Normal { means, variances } => {
            let dists: Vec<Normal<f64>> = means
                .iter()
                .zip(variances)
                .map(|(&m, &v)| Normal::new(m, v.sqrt()).expect("positive variance"))
                .collect();
            let yfix: Vec<usize> = match y {
                Some(_) => (0..n).map(yv).collect(),
                None => vec![0; n],
            };
            Col::Real(yfix.iter().map(|&r| dists[r].sample(&mut g)).collect())
        }
    }
}

fn gen_response(config: &SimulationConfig, cols: &[Col]) -> Vec<Level> {
    let mut g = rng::stream(config.seed, &[tag::RESPONSE]);
    match &config.response {
        ResponseModel::Uniform => (0..config.n)
            .map(|_| g.random_range(1..=config.r_levels as Level))
            .collect(),
        ResponseModel::Logistic { intercept, terms } => (0..config.n)
            .map(|i| {
                let eta: f64 = intercept
                    + terms
                        .iter()
                        .map(|(cs, b)| {
                            let prod: f64 = cs
                                .iter()
                                .map(|&c| match &cols[c] {
                                    Col::Cat(v, _) => (v[i] - 1) as f64,
                                    Col::Real(v) => v[i],
                                })
                                .product();
                            b * prod
                        })
                        .sum::<f64>();
                if g.random::<f64>() < sigmoid(eta) {
                    2
                } else {
                    1
                }
            })
            .collect(),
    }
}

/// Per-node similarity codes: two nodes are similar on an entry iff their
/// codes agree.
fn similarity_codes(f: Feature, cols: &[Col]) -> Vec<u64> {
    let code = |j: usize| -> Vec<u64> {
        match &cols[j] {
            Col::Cat(v, _) => v.iter().map(|&x| x as u64).collect(),
            Col::Real(v) => v.iter().map(|&x| u64::from(x > 0.0)).collect(),
        }
    };
    match f {
        Feature::Main(j) => code(j),
        Feature::Pair(j, k) => code(j).iter().zip(code(k)).map(|(a, b)| a * 1024 + b).collect(),
    }
}

/// Draws every ordered pair independently. Row `i` uses its own stream.
fn gen_network(config: &SimulationConfig, y: &[Level], cols: &[Col]) -> Vec<(usize, usize)> {
    let n = config.n;
    let codes: Vec<Vec<u64>> = config.phi.iter().map(|(f, _)| similarity_codes(*f, cols)).collect();
    let m = codes.len();
    // table over (similarity bitmask, same response)
    let mut table = vec![0.0; 2 << m];
    for mask in 0..(1usize << m) {
        let sims: Vec<bool> = (0..m).map(|b| mask >> b & 1 == 1).collect();
        table[mask << 1] = edge_probability(config, false, &sims);
        table[mask << 1 | 1] = edge_probability(config, true, &sims);
    }
    let mut edges = Vec::new();
    for i1 in 0..n {
        let mut g = rng::stream(config.seed, &[tag::NETWORK_ROW, i1 as u64]);
        for i2 in 0..n {
            if i1 == i2 {
                continue;
            }
            let mut key = usize::from(y[i1] == y[i2]);
            for (b, c) in codes.iter().enumerate() {
                if c[i1] == c[i2] {
                    key |= 1 << (b + 1);
                }
            }
            if g.random::<f64>() < table[key] {
                edges.push((i1, i2));
            }
        }
    }
    edges
}

/// Keeps each edge with `keep_rate` and adds each non-edge with `add_rate`.
pub fn perturb_network(edges: &[(usize, usize)], n: usize, rates: Perturbation, seed: u64) -> Vec<(usize, usize)> {
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(s, d) in edges {
        rows[s].push(d);
    }
    let mut out = Vec::new();
    for (i1, row) in rows.iter_mut().enumerate() {
        row.sort_unstable();
        let mut g = rng::stream(seed, &[tag::OBSERVATION_NOISE, i1 as u64]);
        for i2 in (0..n).filter(|&i2| i2 != i1) {
            let rate = if row.binary_search(&i2).is_ok() {
                rates.keep_rate
            } else {
                rates.add_rate
            };
            if g.random::<f64>() < rate {
                out.push((i1, i2));
            }
        }
    }
    out
}

/// Draws a dataset under `config`.
pub fn generate(config: &SimulationConfig) -> Result<Simulated, SimError> {
    config.validate()?;
    let mut cols: Vec<Col> = Vec::with_capacity(config.p);
    let y = match config.model {
        Model::Nnb => {
            let y = gen_response(config, &cols);
            for j in 0..config.p {
                let c = gen_column(config, j, Some(&y), &cols);
                cols.push(c);
            }
            y
        }
        Model::Nlr => {
            for j in 0..config.p {
                let c = gen_column(config, j, None, &cols);
                cols.push(c);
            }
            gen_response(config, &cols)
        }
    };
    let mut edges = gen_network(config, &y, &cols);
    if let Some(rates) = config.perturbation {
        edges = perturb_network(&edges, config.n, rates, config.seed);
    }
    let mut raw_cont = Vec::new();
    let mut columns = Vec::with_capacity(config.p);
    let mut levels = Vec::with_capacity(config.p);
    for c in cols {
        match c {
            Col::Cat(v, k) => {
                columns.push(v);
                levels.push(Some(k));
            }
            Col::Real(v) => {
                let out = config.continuous.expect("validated");
                columns.push(discretize(&v, out.bins, out.scheme)?);
                levels.push(Some(out.bins));
                raw_cont.push(v);
            }
        }
    }
    let dataset = RawDataset {
        y,
        columns,
        edges,
        feature_names: None,
        response_levels: Some(config.r_levels),
        column_levels: Some(levels),
    }
    .validate()?;
    Ok(Simulated {
        dataset,
        continuous: (!raw_cont.is_empty()).then_some(raw_cont),
        s_true: config.s_true(),
    })
}

pub fn gen_nnb(config: &SimulationConfig) -> Result<Simulated, SimError> {
    if config.model != Model::Nnb {
        return Err(SimError::ModelMismatch("expected the naive Bayes model"));
    }
    generate(config)
}

pub fn gen_nlr(config: &SimulationConfig) -> Result<Simulated, SimError> {
    if config.model != Model::Nlr {
        return Err(SimError::ModelMismatch("expected the logistic model"));
    }
    generate(config)
}

fn bern(p1: f64) -> Vec<f64> {
    ColumnModel::bernoulli(p1)
}

fn given_y(p_y0: f64, p_y1: f64) -> ColumnModel {
    ColumnModel::GivenResponse {
        probs: vec![bern(p_y0), bern(p_y1)],
    }
}

fn base_config(label: &str, model: Model, n: usize, p: usize, seed: u64) -> SimulationConfig {
    SimulationConfig {
        label: label.into(),
        model,
        n,
        p,
        r_levels: 2,
        response: match model {
            Model::Nnb => ResponseModel::Uniform,
            Model::Nlr => ResponseModel::Logistic {
                intercept: 0.0,
                terms: vec![(vec![0], -4.0), (vec![1], 4.0)],
            },
        },
        columns: Vec::new(),
        noise: ColumnModel::Marginal {
            probs: bern(match model {
                Model::Nnb => 0.2,
                Model::Nlr => 0.5,
            }),
        },
        s_y: FeatureSet::mains([0, 1]),
        s_a: FeatureSet::mains([2, 3]),
        phi: vec![(Feature::Main(2), 0.4), (Feature::Main(3), 0.4)],
        gamma: 0.5,
        omega_same: 1.0f64.ln(),
        omega_diff: 0.5f64.ln(),
        perturbation: None,
        continuous: None,
        seed,
    }
}

fn example1_columns() -> Vec<(usize, ColumnModel)> {
    vec![
        (0, given_y(0.2, 0.9)),
        (1, given_y(0.9, 0.4)),
        (2, given_y(0.4, 0.4)),
        (3, given_y(0.5, 0.5)),
    ]
}

/// Parameterisation of the nine reference examples. `p` must leave room for
/// the example's informative columns.
///
/// Example 7 reads the `e^{2k}/Z` entries with `k` as the response level:
/// `P(X_1 = 1 | Y = r) = sigmoid(2r)` and `P(X_2 = 1 | Y = r) = 1 - sigmoid(2r)`.
pub fn example_config(example: u8, model: Model, n: usize, p: usize, seed: u64) -> Result<SimulationConfig, SimError> {
    let need = if example == 4 || example == 8 { 6 } else { 4 };
    if p < need {
        return Err(SimError::Invalid(format!("example {example} needs p >= {need}")));
    }
    let mut c = base_config(&format!("example{example}"), model, n, p, seed);
    let nnb_only = |m: Model| {
        if m == Model::Nnb {
            Ok(())
        } else {
            Err(SimError::ModelMismatch("this example uses the naive Bayes model only"))
        }
    };
    match example {
        1 | 5 => {
            if model == Model::Nnb {
                c.columns = example1_columns();
            }
            if example == 5 {
                c.perturbation = Some(Perturbation::from_exponent(n, 0.4));
            }
        }
        2 => {
            if model == Model::Nnb {
                c.columns = example1_columns();
            }
            c.s_a = FeatureSet::mains([0, 1, 2, 3]);
            c.phi = (0..4).map(|j| (Feature::Main(j), 0.4)).collect();
        }
        3 => {
            let pair12 = Feature::Pair(0, 1);
            let pair34 = Feature::Pair(2, 3);
            match model {
                Model::Nnb => {
                    // probs[r][parent][v]
                    let cond = |y1p1: f64, y1p0: f64, y0p1: f64, y0p0: f64| ColumnModel::GivenResponseAndParent {
                        parent: 0,
                        probs: vec![vec![bern(y0p0), bern(y0p1)], vec![bern(y1p0), bern(y1p1)]],
                    };
                    let mut x4 = cond(0.8, 0.2, 0.9, 0.1);
                    if let ColumnModel::GivenResponseAndParent { parent, .. } = &mut x4 {
                        *parent = 2;
                    }
                    c.columns = vec![
                        (0, given_y(0.2, 0.9)),
                        (1, cond(0.7, 0.2, 0.5, 0.5)),
                        (2, given_y(0.4, 0.4)),
                        (3, x4),
                    ];
                }
                Model::Nlr => {
                    c.response = ResponseModel::Logistic {
                        intercept: 0.0,
                        terms: vec![(vec![0], 3.0), (vec![0, 1], 4.0)],
                    };
                }
            }
            c.s_y = [Feature::Main(0), pair12].into_iter().collect();
            c.s_a = [Feature::Main(2), Feature::Main(3), pair34].into_iter().collect();
            c.phi = vec![(Feature::Main(2), 0.2), (Feature::Main(3), 0.2), (pair34, 0.2)];
        }
        4 => {
            nnb_only(model)?;
            c.columns = vec![
                (0, given_y(0.3, 0.9)),
                (1, given_y(0.8, 0.3)),
                (2, given_y(0.5, 0.5)),
                (3, given_y(0.6, 0.6)),
                (
                    4,
                    ColumnModel::GivenParent {
                        parent: 1,
                        probs: vec![bern(0.7), bern(0.3)],
                    },
                ),
                (
                    5,
                    ColumnModel::GivenParent {
                        parent: 2,
                        probs: vec![bern(0.8), bern(0.2)],
                    },
                ),
            ];
        }
        6 => {
            nnb_only(model)?;
            let z: f64 = (0..4).map(|k| (k as f64).exp()).sum();
            let expo: Vec<f64> = (0..4).map(|k| (k as f64).exp() / z).collect();
            let flat = vec![0.25; 4];
            c.columns = vec![
                (0, ColumnModel::GivenResponse { probs: vec![flat.clone(), expo.clone()] }),
                (1, ColumnModel::GivenResponse { probs: vec![expo, flat.clone()] }),
                (2, ColumnModel::Marginal { probs: flat.clone() }),
                (3, ColumnModel::Marginal { probs: flat.clone() }),
            ];
            c.noise = ColumnModel::Marginal { probs: flat };
        }
        7 => {
            nnb_only(model)?;
            c.r_levels = 4;
            let up: Vec<Vec<f64>> = (0..4).map(|r| bern(sigmoid(2.0 * r as f64))).collect();
            let down: Vec<Vec<f64>> = (0..4).map(|r| bern(1.0 - sigmoid(2.0 * r as f64))).collect();
            c.columns = vec![
                (0, ColumnModel::GivenResponse { probs: up }),
                (1, ColumnModel::GivenResponse { probs: down }),
                (2, ColumnModel::Marginal { probs: bern(0.5) }),
                (3, ColumnModel::Marginal { probs: bern(0.5) }),
            ];
            c.noise = ColumnModel::Marginal { probs: bern(0.5) };
        }
        8 => {
            nnb_only(model)?;
            let std_normal = ColumnModel::Normal {
                means: vec![0.0, 0.0],
                variances: vec![1.0, 1.0],
            };
            c.columns = vec![(
                4,
                ColumnModel::Normal {
                    means: vec![-1.0, 1.0],
                    variances: vec![0.5, 0.5],
                },
            )];
            c.noise = std_normal;
            c.s_y = FeatureSet::mains([4]);
            c.s_a = FeatureSet::mains([5]);
            c.phi = vec![(Feature::Main(5), 0.4)];
            c.continuous = Some(ContinuousOutput {
                bins: 4,
                scheme: Discretization::EmpiricalQuantile,
            });
        }
        9 => {
            if model != Model::Nlr {
                return Err(SimError::ModelMismatch("example 9 uses the logistic model only"));
            }
            c.columns = vec![(
                2,
                ColumnModel::GivenParent {
                    parent: 0,
                    probs: vec![bern(0.5), bern(1.0)],
                },
            )];
        }
        other => return Err(SimError::UnknownExample(other.to_string())),
    }
    Ok(c)
}

/// Responses, features and network drawn independently: uniform responses,
/// Bernoulli(0.2) features, and an Erdős-Rényi network whose density is the
/// average of the reference model's same- and different-response rates.
pub fn null_config(n: usize, p: usize, seed: u64) -> SimulationConfig {
    let mut c = base_config("null", Model::Nnb, n, p, seed);
    c.s_y = FeatureSet::new();
    c.s_a = FeatureSet::new();
    c.phi = Vec::new();
    let root = (n as f64).sqrt();
    let density = 0.5 / (1.0 + root) + 0.5 * 0.5 / (0.5 + root);
    // same offset for both response combinations
    let omega = (density / (1.0 - density)).ln() + c.gamma * (n as f64).ln();
    c.omega_same = omega;
    c.omega_diff = omega;
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_edge_probabilities() {
        let mut c = base_config("t", Model::Nnb, 100, 4, 0);
        assert!((edge_probability(&c, true, &[false, false]) - 1.0 / 11.0).abs() < 1e-12);
        assert!((edge_probability(&c, false, &[false, false]) - 0.5 / 10.5).abs() < 1e-12);
        c.gamma = 0.0;
        c.phi.clear();
        assert!((edge_probability(&c, true, &[]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn logistic_arithmetic() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(-4.0) - 0.017_986).abs() < 1e-6);
    }

    #[test]
    fn perturbation_rates() {
        let r = Perturbation::from_exponent(300, 0.4);
        assert!((r.keep_rate - 0.9673).abs() < 1e-4);
        assert!((r.add_rate - 0.001_087_9).abs() < 1e-7);
        let e = vec![(0, 1), (2, 1), (1, 3)];
        let id = perturb_network(&e, 4, Perturbation { keep_rate: 1.0, add_rate: 0.0 }, 3);
        assert_eq!(id, vec![(0, 1), (1, 3), (2, 1)]);
        assert!(perturb_network(&e, 4, Perturbation { keep_rate: 0.0, add_rate: 0.0 }, 3).is_empty());
    }

    #[test]
    fn example_supports() {
        let c = example_config(1, Model::Nnb, 300, 20, 1).unwrap();
        assert_eq!(c.s_y, FeatureSet::mains([0, 1]));
        assert_eq!(c.s_a, FeatureSet::mains([2, 3]));
        assert_eq!(c.phi, vec![(Feature::Main(2), 0.4), (Feature::Main(3), 0.4)]);
        let c = example_config(2, Model::Nnb, 300, 20, 1).unwrap();
        assert_eq!(c.s_a, FeatureSet::mains([0, 1, 2, 3]));
        let c = example_config(3, Model::Nlr, 300, 20, 1).unwrap();
        assert_eq!(c.phi.len(), 3);
        assert!(c.phi.iter().all(|(_, w)| *w == 0.2));
        assert_eq!(
            c.response,
            ResponseModel::Logistic {
                intercept: 0.0,
                terms: vec![(vec![0], 3.0), (vec![0, 1], 4.0)]
            }
        );
        assert!(matches!(example_config(10, Model::Nnb, 300, 20, 1), Err(SimError::UnknownExample(_))));
        for e in 1..=9u8 {
            let model = if e == 9 { Model::Nlr } else { Model::Nnb };
            let c = example_config(e, model, 60, 10, 2).unwrap();
            let s = generate(&c).unwrap();
            assert_eq!(s.dataset.n(), 60);
            assert_eq!(s.dataset.p(), 10);
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let c = example_config(1, Model::Nnb, 80, 12, 9).unwrap();
        let a = generate(&c).unwrap().dataset;
        let b = generate(&c).unwrap().dataset;
        assert_eq!(a, b);
        let d = generate(&c.with_seed(10)).unwrap().dataset;
        assert_ne!(a, d);
    }

    #[test]
    fn degenerate_table_gives_constant_column() {
        let mut c = example_config(1, Model::Nnb, 50, 5, 4).unwrap();
        c.columns[0] = (0, given_y(1.0, 1.0));
        let s = generate(&c).unwrap();
        assert!(s.dataset.column(0).iter().all(|&v| v == 2));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = example_config(1, Model::Nnb, 50, 5, 4).unwrap();
        c.gamma = 1.0;
        assert!(matches!(generate(&c), Err(SimError::Invalid(_))));
        let c = example_config(1, Model::Nnb, 50, 5, 4).unwrap();
        assert!(gen_nlr(&c).is_err());
        let mut c = example_config(1, Model::Nlr, 50, 5, 4).unwrap();
        c.columns = vec![(0, given_y(0.2, 0.9))];
        assert!(matches!(generate(&c), Err(SimError::BadColumn(1, _))));
    }
}
