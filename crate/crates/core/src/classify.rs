//! Maximum pseudo-posterior classifiers and screening metrics.
//!
//! Three nested classifiers:
//!
//! * type 1: prior and self-related features, naive-Bayes across `s_y`;
//! * type 2: type 1 plus the response-pair edge terms of the node with every
//!   other node of known response;
//! * type 3: type 2 plus, per network-related feature, the feature-specific
//!   edge terms minus the response-only ones.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counts::{counts_bundle_for, pair_cell, quad_cell};
use crate::dataset::{DataError, Feature, FeatureSet, Level, NodeDataset};
use crate::rng::{self, tag};
use crate::screening::{feature_column, PairCoding};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("response level {0} is absent from the training data")]
    MissingResponseLevel(usize),
    #[error("smoothing must be finite and non-negative, got {0}")]
    InvalidSmoothing(f64),
    #[error("target node {index} out of range for {n} nodes")]
    TargetOutOfRange { index: usize, n: usize },
    #[error("AUC needs a binary response, got {0} levels")]
    AucNeedsBinary(usize),
    #[error("training fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("no screening results to summarise")]
    NoReplications,
    #[error("feature {0} references a missing column")]
    BadFeature(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Type1,
    Type2,
    Type3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub s_y: FeatureSet,
    /// Used by type 3 only.
    pub s_a: FeatureSet,
    pub smoothing: f64,
    #[serde(default)]
    pub coding: PairCoding,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind, s_y: FeatureSet, s_a: FeatureSet) -> Self {
        Self {
            kind,
            s_y,
            s_a,
            smoothing: 0.5,
            coding: PairCoding::Composite,
        }
    }
}

#[derive(Debug, Clone)]
struct SelfTerm {
    feature: Feature,
    k: usize,
    /// `[r * K + v]`: `ln π_{y|j}(r | v) - ln π_y(r)`
    log_ratio: Vec<f64>,
}

/// Log edge probabilities of one table.
#[derive(Debug, Clone)]
struct EdgeTable {
    ln_p: Vec<f64>,
    ln_q: Vec<f64>,
}

impl EdgeTable {
    fn from_counts(edges: &[u64], pairs: &[u64], alpha: f64) -> Self {
        let (ln_p, ln_q) = edges
            .iter()
            .zip(pairs)
            .map(|(&e, &n)| {
                let p = (e as f64 + alpha) / (n as f64 + 2.0 * alpha);
                // unsmoothed empty cells never get evaluated with a positive count
                let p = if p.is_nan() { 0.5 } else { p };
                (p.ln(), (1.0 - p).ln())
            })
            .unzip();
        Self { ln_p, ln_q }
    }

    /// `c1 ln p + c0 ln (1 - p)` with the `0 · ln 0 = 0` convention.
    #[inline]
    fn term(&self, cell: usize, ones: u64, zeros: u64) -> f64 {
        let mut t = 0.0;
        if ones > 0 {
            t += ones as f64 * self.ln_p[cell];
        }
        if zeros > 0 {
            t += zeros as f64 * self.ln_q[cell];
        }
        t
    }
}

#[derive(Debug, Clone)]
struct NetTerm {
    feature: Feature,
    k: usize,
    table: EdgeTable,
}

#[derive(Debug, Clone)]
pub struct FittedClassifier {
    spec: ClassifierSpec,
    r: usize,
    ln_prior: Vec<f64>,
    self_terms: Vec<SelfTerm>,
    base_net: Option<EdgeTable>,
    feature_net: Vec<NetTerm>,
}

fn check_feature(ds: &NodeDataset, f: &Feature) -> Result<(), ClassifyError> {
    let ok = match *f {
        Feature::Main(j) => j < ds.p(),
        Feature::Pair(j, k) => j < k && k < ds.p(),
    };
    if ok {
        Ok(())
    } else {
        Err(ClassifyError::BadFeature(f.to_string()))
    }
}

/// Estimates every probability the classifier needs from `train`.
pub fn fit(spec: &ClassifierSpec, train: &NodeDataset) -> Result<FittedClassifier, ClassifyError> {
    let a = spec.smoothing;
    if !(a.is_finite() && a >= 0.0) {
        return Err(ClassifyError::InvalidSmoothing(a));
    }
    let r = train.r_levels();
    let constant = vec![1 as Level; train.n()];
    let base = counts_bundle_for(train, &constant, 1);
    if let Some(missing) = base.marginal.n_y.iter().position(|&c| c == 0) {
        return Err(ClassifyError::MissingResponseLevel(missing + 1));
    }
    let n = train.n() as f64;
    let ln_prior: Vec<f64> = base
        .marginal
        .n_y
        .iter()
        .map(|&c| ((c as f64 + a) / (n + r as f64 * a)).ln())
        .collect();

    let mut self_terms = Vec::new();
    for &f in spec.s_y.iter() {
        check_feature(train, &f)?;
        let (x, k) = feature_column(train, f, spec.coding);
        let m = crate::counts::marginal_counts_for(train, &x, k);
        let mut log_ratio = vec![0.0; r * k];
        for rr in 0..r {
            for v in 0..k {
                let cond = (m.yj(rr, v) as f64 + a) / (m.n_j[v] as f64 + r as f64 * a);
                // unseen level without smoothing: no information
                log_ratio[rr * k + v] = if cond.is_nan() { 0.0 } else { cond.ln() - ln_prior[rr] };
            }
        }
        self_terms.push(SelfTerm {
            feature: f,
            k,
            log_ratio,
        });
    }

    let uses_network = spec.kind != ClassifierKind::Type1;
    let base_net = uses_network
        .then(|| EdgeTable::from_counts(&base.edges.n_edges_y, &base.pairs.n_pairs_y, a));
    let mut feature_net = Vec::new();
    if spec.kind == ClassifierKind::Type3 {
        for &f in spec.s_a.iter() {
            check_feature(train, &f)?;
            let (x, k) = feature_column(train, f, spec.coding);
            let c = counts_bundle_for(train, &x, k);
            feature_net.push(NetTerm {
                feature: f,
                k,
                table: EdgeTable::from_counts(&c.edges.n_edges_yj, &c.pairs.n_pairs_yj, a),
            });
        }
    }
    Ok(FittedClassifier {
        spec: spec.clone(),
        r,
        ln_prior,
        self_terms,
        base_net,
        feature_net,
    })
}

/// Columns of a dataset as seen by one fitted classifier.
struct Prepared<'a> {
    ds: &'a NodeDataset,
    self_cols: Vec<Vec<Level>>,
    net_cols: Vec<Vec<Level>>,
    known: Vec<bool>,
    /// Known nodes per response level.
    known_y: Vec<u64>,
    /// Known nodes per `(response, level)` for each network feature.
    known_yk: Vec<Vec<u64>>,
}

impl FittedClassifier {
    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn r_levels(&self) -> usize {
        self.r
    }

    fn prepare<'a>(&self, ds: &'a NodeDataset, known: Vec<bool>) -> Result<Prepared<'a>, ClassifyError> {
        let mut self_cols = Vec::new();
        for t in &self.self_terms {
            check_feature(ds, &t.feature)?;
            let (x, k) = feature_column(ds, t.feature, self.spec.coding);
            if k != t.k {
                return Err(ClassifyError::BadFeature(t.feature.to_string()));
            }
            self_cols.push(x);
        }
        let mut net_cols = Vec::new();
        for t in &self.feature_net {
            check_feature(ds, &t.feature)?;
            let (x, k) = feature_column(ds, t.feature, self.spec.coding);
            if k != t.k {
                return Err(ClassifyError::BadFeature(t.feature.to_string()));
            }
            net_cols.push(x);
        }
        let y = ds.response();
        let mut known_y = vec![0u64; self.r];
        let mut known_yk: Vec<Vec<u64>> = self.feature_net.iter().map(|t| vec![0; self.r * t.k]).collect();
        for i in (0..ds.n()).filter(|&i| known[i]) {
            let yi = y[i] as usize - 1;
            known_y[yi] += 1;
            for (idx, col) in net_cols.iter().enumerate() {
                let k = self.feature_net[idx].k;
                known_yk[idx][yi * k + col[i] as usize - 1] += 1;
            }
        }
        Ok(Prepared {
            ds,
            self_cols,
            net_cols,
            known,
            known_y,
            known_yk,
        })
    }

    fn scores_prepared(&self, pre: &Prepared<'_>, i: usize) -> Vec<f64> {
        let r = self.r;
        let ds = pre.ds;
        let y = ds.response();
        let mut score = self.ln_prior.clone();
        for (t, col) in self.self_terms.iter().zip(&pre.self_cols) {
            let v = col[i] as usize - 1;
            for (rr, s) in score.iter_mut().enumerate() {
                *s += t.log_ratio[rr * t.k + v];
            }
        }
        let Some(base) = &self.base_net else {
            return score;
        };

        // other known nodes by response, and how many of them i links to/from
        let mut others = pre.known_y.clone();
        if pre.known[i] {
            others[y[i] as usize - 1] -= 1;
        }
        let mut out_y = vec![0u64; r];
        let mut in_y = vec![0u64; r];
        for nb in ds.graph().out_neighbors(i).filter(|&nb| pre.known[nb]) {
            out_y[y[nb] as usize - 1] += 1;
        }
        for nb in ds.graph().in_neighbors(i).filter(|&nb| pre.known[nb]) {
            in_y[y[nb] as usize - 1] += 1;
        }
        let base_terms: Vec<f64> = (0..r)
            .map(|r1| {
                (0..r)
                    .map(|r2| {
                        base.term(pair_cell(r, r1, r2), out_y[r2], others[r2] - out_y[r2])
                            + base.term(pair_cell(r, r2, r1), in_y[r2], others[r2] - in_y[r2])
                    })
                    .sum()
            })
            .collect();
        for (s, b) in score.iter_mut().zip(&base_terms) {
            *s += b;
        }

        for ((t, col), known_yk) in self.feature_net.iter().zip(&pre.net_cols).zip(&pre.known_yk) {
            let k = t.k;
            let xi = col[i] as usize - 1;
            let mut others_k = known_yk.clone();
            if pre.known[i] {
                others_k[(y[i] as usize - 1) * k + xi] -= 1;
            }
            let mut out_k = vec![0u64; r * k];
            let mut in_k = vec![0u64; r * k];
            for nb in ds.graph().out_neighbors(i).filter(|&nb| pre.known[nb]) {
                out_k[(y[nb] as usize - 1) * k + col[nb] as usize - 1] += 1;
            }
            for nb in ds.graph().in_neighbors(i).filter(|&nb| pre.known[nb]) {
                in_k[(y[nb] as usize - 1) * k + col[nb] as usize - 1] += 1;
            }
            for r1 in 0..r {
                let mut acc = 0.0;
                for r2 in 0..r {
                    for k2 in 0..k {
                        let c = r2 * k + k2;
                        let m = others_k[c];
                        acc += t.table.term(quad_cell(r, k, r1, r2, xi, k2), out_k[c], m - out_k[c]);
                        acc += t.table.term(quad_cell(r, k, r2, r1, k2, xi), in_k[c], m - in_k[c]);
                    }
                }
                score[r1] += acc - base_terms[r1];
            }
        }
        score
    }

    /// Log pseudo-posterior scores (up to a constant) of node `target` for
    /// every level, given the responses of all other nodes.
    pub fn log_scores(&self, ds: &NodeDataset, target: usize) -> Result<Vec<f64>, ClassifyError> {
        if target >= ds.n() {
            return Err(ClassifyError::TargetOutOfRange {
                index: target,
                n: ds.n(),
            });
        }
        let pre = self.prepare(ds, vec![true; ds.n()])?;
        Ok(self.scores_prepared(&pre, target))
    }

    /// Most probable level, ties to the smallest.
    pub fn predict(&self, ds: &NodeDataset, target: usize) -> Result<Level, ClassifyError> {
        Ok(argmax(&self.log_scores(ds, target)?))
    }
}

fn argmax(s: &[f64]) -> Level {
    let mut best = 0;
    for (i, &v) in s.iter().enumerate() {
        if v > s[best] {
            best = i;
        }
    }
    best as Level + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    /// Binary responses only; level 2 is the positive class.
    pub auc: Option<f64>,
    pub evaluated: usize,
}

fn evaluate_nodes(
    clf: &FittedClassifier,
    ds: &NodeDataset,
    known: Vec<bool>,
    targets: &[usize],
) -> Result<Evaluation, ClassifyError> {
    let pre = clf.prepare(ds, known)?;
    let scores: Vec<Vec<f64>> = targets.par_iter().map(|&i| clf.scores_prepared(&pre, i)).collect();
    let y = ds.response();
    let hits = targets
        .iter()
        .zip(&scores)
        .filter(|(&i, s)| argmax(s) == y[i])
        .count();
    let auc = (clf.r == 2).then(|| {
        let margin: Vec<f64> = scores.iter().map(|s| s[1] - s[0]).collect();
        let labels: Vec<bool> = targets.iter().map(|&i| y[i] == 2).collect();
        auc(&margin, &labels)
    });
    Ok(Evaluation {
        accuracy: hits as f64 / targets.len().max(1) as f64,
        auc,
        evaluated: targets.len(),
    })
}

/// Transductive evaluation: each node is predicted given every other
/// node's response.
pub fn evaluate(clf: &FittedClassifier, ds: &NodeDataset) -> Result<Evaluation, ClassifyError> {
    let targets: Vec<usize> = (0..ds.n()).collect();
    evaluate_nodes(clf, ds, vec![true; ds.n()], &targets)
}

/// Random split: fit on a `train_fraction` share of nodes, predict the rest
/// given training responses only.
pub fn evaluate_split(
    spec: &ClassifierSpec,
    ds: &NodeDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<Evaluation, ClassifyError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ClassifyError::InvalidFraction(train_fraction));
    }
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..ds.n()).collect();
    order.shuffle(&mut rng::stream(seed, &[tag::SPLIT]));
    let n_train = ((ds.n() as f64 * train_fraction).round() as usize).clamp(1, ds.n() - 1);
    let mut train: Vec<usize> = order[..n_train].to_vec();
    train.sort_unstable();
    let mut test: Vec<usize> = order[n_train..].to_vec();
    test.sort_unstable();
    let clf = fit(spec, &ds.induced(&train)?)?;
    let mut known = vec![false; ds.n()];
    for &i in &train {
        known[i] = true;
    }
    evaluate_nodes(&clf, ds, known, &test)
}

/// Mann-Whitney AUC, ties counted one half. Degenerate labels give 0.5.
pub fn auc(scores: &[f64], positive: &[bool]) -> f64 {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    // midranks over tie groups
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let mid = (start + end + 1) as f64 / 2.0;
        rank_sum += mid * idx[start..end].iter().filter(|&&i| positive[i]).count() as f64;
        start = end;
    }
    (rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0) / (n_pos * n_neg) as f64
}

/// Errors on non-binary responses instead of returning nothing.
pub fn require_auc(ev: &Evaluation, r_levels: usize) -> Result<f64, ClassifyError> {
    ev.auc.ok_or(ClassifyError::AucNeedsBinary(r_levels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub feature: Feature,
    pub cp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub replications: usize,
    pub cmf: f64,
    pub imf: f64,
    pub cp: Vec<Coverage>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub acc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub auc: Option<f64>,
}

impl MetricsReport {
    pub fn cp_of(&self, f: &Feature) -> Option<f64> {
        self.cp.iter().find(|c| &c.feature == f).map(|c| c.cp)
    }
}

/// CMF, IMF and per-feature coverage of selections against the true set.
pub fn screening_metrics<'a>(
    selections: impl IntoIterator<Item = &'a FeatureSet>,
    s_true: &FeatureSet,
) -> Result<MetricsReport, ClassifyError> {
    let mut m = 0usize;
    let mut correct = 0usize;
    let mut wrong = 0usize;
    let mut hits = vec![0usize; s_true.len()];
    for sel in selections {
        m += 1;
        let c = sel.intersection_len(s_true);
        correct += c;
        wrong += sel.len() - c;
        for (h, f) in hits.iter_mut().zip(s_true.iter()) {
            *h += usize::from(sel.contains(f));
        }
    }
    if m == 0 {
        return Err(ClassifyError::NoReplications);
    }
    Ok(MetricsReport {
        replications: m,
        cmf: correct as f64 / m as f64,
        imf: wrong as f64 / m as f64,
        cp: s_true
            .iter()
            .zip(hits)
            .map(|(&feature, h)| Coverage {
                feature,
                cp: h as f64 / m as f64,
            })
            .collect(),
        acc: None,
        auc: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RawDataset;

    fn ds(y: Vec<Level>, cols: Vec<Vec<Level>>, edges: Vec<(usize, usize)>) -> NodeDataset {
        RawDataset {
            y,
            columns: cols,
            edges,
            ..Default::default()
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn prior_only_predicts_majority() {
        let d = ds(vec![1, 2, 2, 2, 1], vec![vec![1, 2, 1, 2, 1]], vec![]);
        let clf = fit(
            &ClassifierSpec::new(ClassifierKind::Type1, FeatureSet::new(), FeatureSet::new()),
            &d,
        )
        .unwrap();
        for i in 0..5 {
            assert_eq!(clf.predict(&d, i).unwrap(), 2);
        }
        assert!((evaluate(&clf, &d).unwrap().accuracy - 0.6).abs() < 1e-12);
    }

    #[test]
    fn laplace_conditional() {
        // level 2 of x1 never co-occurs with y = 1
        let d = ds(vec![1, 1, 2, 2], vec![vec![1, 1, 2, 1]], vec![]);
        let mut spec = ClassifierSpec::new(ClassifierKind::Type1, FeatureSet::mains([0]), FeatureSet::new());
        spec.smoothing = 1.0;
        let clf = fit(&spec, &d).unwrap();
        let prior = (2.0 + 1.0) / (4.0 + 2.0);
        let expected = (1.0f64 / (1.0 + 2.0)).ln() - f64::ln(prior);
        assert!((clf.self_terms[0].log_ratio[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn symmetric_tie_goes_to_first_level() {
        let d = ds(vec![1, 2], vec![vec![1, 1]], vec![]);
        let clf = fit(
            &ClassifierSpec::new(ClassifierKind::Type1, FeatureSet::mains([0]), FeatureSet::new()),
            &d,
        )
        .unwrap();
        let s = clf.log_scores(&d, 0).unwrap();
        assert_eq!(s[0], s[1]);
        assert_eq!(clf.predict(&d, 0).unwrap(), 1);
        assert_eq!(
            clf.predict(&d, 9),
            Err(ClassifyError::TargetOutOfRange { index: 9, n: 2 })
        );
    }

    #[test]
    fn homophilous_neighbourhood_decides() {
        // node 0 links both ways with three level-2 nodes; level-1 nodes
        // only ever link among themselves
        let y = vec![2, 2, 2, 2, 1, 1, 1, 1];
        let edges = vec![
            (0, 1),
            (1, 0),
            (0, 2),
            (2, 0),
            (0, 3),
            (3, 0),
            (4, 5),
            (5, 4),
            (6, 7),
            (7, 6),
        ];
        let d = ds(y, vec![vec![1; 8]], edges);
        let clf = fit(
            &ClassifierSpec::new(ClassifierKind::Type2, FeatureSet::new(), FeatureSet::new()),
            &d,
        )
        .unwrap();
        assert_eq!(clf.predict(&d, 0).unwrap(), 2);
        let s = clf.log_scores(&d, 0).unwrap();
        assert!(s[1] > s[0]);
    }

    #[test]
    fn separable_data() {
        let y = vec![1, 1, 1, 2, 2, 2];
        let d = ds(y.clone(), vec![y.clone()], vec![]);
        let clf = fit(
            &ClassifierSpec::new(ClassifierKind::Type1, FeatureSet::mains([0]), FeatureSet::new()),
            &d,
        )
        .unwrap();
        let ev = evaluate(&clf, &d).unwrap();
        assert_eq!(ev.accuracy, 1.0);
        assert_eq!(ev.auc, Some(1.0));
    }

    #[test]
    fn auc_ties_and_errors() {
        assert_eq!(auc(&[0.3; 6], &[true, false, true, false, false, true]), 0.5);
        assert_eq!(auc(&[0.1, 0.2, 0.3, 0.4], &[false, false, true, true]), 1.0);
        assert_eq!(auc(&[0.1, 0.2, 0.3, 0.4], &[true, true, false, false]), 0.0);
        assert_eq!(auc(&[0.1, 0.2, 0.2, 0.4], &[false, true, false, true]), 0.875);
        let ev = Evaluation {
            accuracy: 1.0,
            auc: None,
            evaluated: 1,
        };
        assert_eq!(require_auc(&ev, 3), Err(ClassifyError::AucNeedsBinary(3)));
    }

    #[test]
    fn metrics_set_arithmetic() {
        let truth = FeatureSet::mains([0, 1, 2, 3]);
        let rep = screening_metrics([&truth, &truth], &truth).unwrap();
        assert_eq!((rep.cmf, rep.imf), (4.0, 0.0));
        assert!(rep.cp.iter().all(|c| c.cp == 1.0));
        let sel = FeatureSet::mains([0, 1, 4]);
        let rep = screening_metrics([&sel], &truth).unwrap();
        assert_eq!((rep.cmf, rep.imf), (2.0, 1.0));
        assert_eq!(rep.cp_of(&Feature::Main(2)), Some(0.0));
        assert_eq!(
            screening_metrics(std::iter::empty(), &truth),
            Err(ClassifyError::NoReplications)
        );
    }

    #[test]
    fn split_is_reproducible() {
        let y: Vec<Level> = (0..40).map(|i| 1 + (i % 2) as Level).collect();
        let x: Vec<Level> = (0..40).map(|i| 1 + ((i / 3) % 2) as Level).collect();
        let edges = (0..39).map(|i| (i, i + 1)).collect();
        let d = ds(y, vec![x], edges);
        let spec = ClassifierSpec::new(ClassifierKind::Type3, FeatureSet::mains([0]), FeatureSet::mains([0]));
        let a = evaluate_split(&spec, &d, 0.7, 5).unwrap();
        let b = evaluate_split(&spec, &d, 0.7, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluated, 12);
        assert!(evaluate_split(&spec, &d, 1.0, 5).is_err());
    }

    #[test]
    fn type3_single_feature_matches_direct_evaluation() {
        let y = vec![1, 2, 1, 2, 2, 1, 1];
        let x = vec![1, 1, 2, 2, 1, 2, 1];
        let edges = vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 3), (5, 6), (6, 0), (0, 5)];
        let d = ds(y.clone(), vec![x.clone()], edges);
        let spec = ClassifierSpec::new(ClassifierKind::Type3, FeatureSet::new(), FeatureSet::mains([0]));
        let clf = fit(&spec, &d).unwrap();
        let t = &clf.feature_net[0].table;
        let i = 2;
        let s = clf.log_scores(&d, i).unwrap();
        // literal sum over every other node in both directions
        let direct: Vec<f64> = (0..2)
            .map(|r1| {
                let mut acc = clf.ln_prior[r1];
                for j in (0..7).filter(|&j| j != i) {
                    let (r2, ki, kj) = (y[j] as usize - 1, x[i] as usize - 1, x[j] as usize - 1);
                    let f = quad_cell(2, 2, r1, r2, ki, kj);
                    let b = quad_cell(2, 2, r2, r1, kj, ki);
                    acc += if d.graph().has_edge(i, j) { t.ln_p[f] } else { t.ln_q[f] };
                    acc += if d.graph().has_edge(j, i) { t.ln_p[b] } else { t.ln_q[b] };
                }
                acc
            })
            .collect();
        for (a, b) in s.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}
