//! Log pseudo-likelihood ratio statistic for one categorical feature on a
//! directed network.
//!
//! The pseudo-likelihoods multiply, over nodes, the posterior kernel of each
//! node's observed response: a self factor (`π_y` or `π_{y|j}`) and Bernoulli
//! factors for every ordered pair the node takes part in. Each ordered pair
//! enters the kernels of both of its endpoints, and every endpoint carries
//! half of the pair's weight, so after aggregation each ordered pair counts
//! once:
//!
//! ```text
//! log L0 = Σ_r n_y[r] log π_y[r]      + Σ_{r1 r2}       E log π + (N - E) log(1 - π)
//! log Lj = Σ_{rk} n_yj[r,k] log π_{y|j} + Σ_{r1 r2 k1 k2} E log π + (N - E) log(1 - π)
//! ```
//!
//! with `E`/`N` the edge/pair counts of each cell and `π = E / N`. The first
//! sums make up the self part of the ratio and the second the network part.
//! A term whose count is zero contributes zero, whatever its estimate.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counts::{counts_bundle_for, CountsBundle, MarginalCounts};
use crate::dataset::{DataError, Level, NodeDataset};
use crate::rng::{self, tag};
use crate::special::chi2_sf;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlrError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("response level {0} is not observed")]
    MissingResponseLevel(usize),
    #[error("permutation count must be at least 1")]
    NoPermutations,
}

/// Plug-in estimates. Cells whose denominator is zero are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmleProbs {
    pub r: usize,
    pub k: usize,
    pub pi_y: Vec<f64>,
    /// `[r * K + k]`: P(Y = r | X_j = k)
    pub pi_y_given_j: Vec<Option<f64>>,
    pub pi_pairs_y: Vec<Option<f64>>,
    pub pi_pairs_yj: Vec<Option<f64>>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl PmleProbs {
    pub fn from_counts(c: &CountsBundle) -> Self {
        let m = &c.marginal;
        let n = m.n() as f64;
        let pi_y_given_j = (0..m.r)
            .flat_map(|r| (0..m.k).map(move |k| (r, k)))
            .map(|(r, k)| ratio(m.yj(r, k), m.n_j[k]))
            .collect();
        Self {
            r: m.r,
            k: m.k,
            pi_y: m.n_y.iter().map(|&c| c as f64 / n).collect(),
            pi_y_given_j,
            pi_pairs_y: c
                .edges
                .n_edges_y
                .iter()
                .zip(&c.pairs.n_pairs_y)
                .map(|(&e, &p)| ratio(e, p))
                .collect(),
            pi_pairs_yj: c
                .edges
                .n_edges_yj
                .iter()
                .zip(&c.pairs.n_pairs_yj)
                .map(|(&e, &p)| ratio(e, p))
                .collect(),
        }
    }
}

/// `count * ln(p)`, with `0 * ln(anything) = 0`.
#[inline]
fn xlog(count: u64, p: Option<f64>) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * p.expect("a positive count implies a defined estimate").ln()
    }
}

/// Bernoulli log-likelihood of edge cells under plug-in probabilities.
fn edge_loglik(edges: &[u64], pairs: &[u64], probs: &[Option<f64>]) -> f64 {
    edges
        .iter()
        .zip(pairs)
        .zip(probs)
        .map(|((&e, &n), &p)| xlog(e, p) + xlog(n - e, p.map(|p| 1.0 - p)))
        .sum()
}

/// Same as `edge_loglik` at `π = E / N`, without materialising estimates.
/// Baseline and per-feature terms share it so a constant column cancels
/// exactly.
fn cell_loglik(edges: &[u64], pairs: &[u64]) -> f64 {
    edges
        .iter()
        .zip(pairs)
        .map(|(&e, &n)| {
            let mut t = 0.0;
            if e > 0 {
                t += e as f64 * (e as f64 / n as f64).ln();
            }
            if n > e {
                t += (n - e) as f64 * ((n - e) as f64 / n as f64).ln();
            }
            t
        })
        .sum()
}

/// Self-factor log-likelihood `Σ_{rk} n_yj log(n_yj / n_j)`.
fn self_loglik(m: &MarginalCounts) -> f64 {
    let mut acc = 0.0;
    for r in 0..m.r {
        for k in 0..m.k {
            let c = m.yj(r, k);
            if c > 0 {
                acc += c as f64 * (c as f64 / m.n_j[k] as f64).ln();
            }
        }
    }
    acc
}

fn response_loglik(n_y: &[u64]) -> f64 {
    let n: u64 = n_y.iter().sum();
    n_y.iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64 / n as f64).ln())
        .sum()
}

/// Log pseudo-likelihood without features, count-aggregated.
pub fn log_l0(counts: &CountsBundle, probs: &PmleProbs) -> f64 {
    let self_part: f64 = counts
        .marginal
        .n_y
        .iter()
        .zip(&probs.pi_y)
        .map(|(&c, &p)| xlog(c, Some(p)))
        .sum();
    self_part
        + edge_loglik(
            &counts.edges.n_edges_y,
            &counts.pairs.n_pairs_y,
            &probs.pi_pairs_y,
        )
}

/// Log pseudo-likelihood with the single feature behind `counts`.
pub fn log_lj(counts: &CountsBundle, probs: &PmleProbs) -> f64 {
    let self_part: f64 = counts
        .marginal
        .n_yj
        .iter()
        .zip(&probs.pi_y_given_j)
        .map(|(&c, &p)| xlog(c, p))
        .sum();
    self_part
        + edge_loglik(
            &counts.edges.n_edges_yj,
            &counts.pairs.n_pairs_yj,
            &probs.pi_pairs_yj,
        )
}

/// Λ̂ for one feature with its self/network decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlrStat {
    /// `(log Lj - log L0) / n`
    pub lambda: f64,
    pub lambda_self: f64,
    pub lambda_network: f64,
    pub df_self: u64,
    pub df_network: u64,
    /// Upper χ² tail of `2 * lambda_self` on `df_self`.
    pub p_self: f64,
    /// Upper χ² tail of `2 * lambda_network` on `df_network`.
    pub p_network: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_perm: Option<f64>,
}

impl PlrStat {
    /// Gap between `self + network` and `n * lambda`, relative to their
    /// magnitude once that exceeds 1.
    pub fn decomposition_residual(&self, n: usize) -> f64 {
        let total = n as f64 * self.lambda;
        let parts = self.lambda_self + self.lambda_network;
        let scale = total
            .abs()
            .max(self.lambda_self.abs() + self.lambda_network.abs())
            .max(1.0);
        (parts - total).abs() / scale
    }
}

/// Feature-free quantities shared by every column of a dataset.
#[derive(Debug, Clone)]
pub struct PlrBaseline {
    n: usize,
    r: usize,
    self0: f64,
    net0: f64,
}

impl PlrBaseline {
    pub fn new(ds: &NodeDataset) -> Result<Self, PlrError> {
        let r = ds.r_levels();
        let constant = vec![1 as Level; ds.n()];
        let c = counts_bundle_for(ds, &constant, 1);
        if let Some(missing) = c.marginal.n_y.iter().position(|&c| c == 0) {
            return Err(PlrError::MissingResponseLevel(missing + 1));
        }
        let self0 = response_loglik(&c.marginal.n_y);
        let net0 = cell_loglik(&c.edges.n_edges_y, &c.pairs.n_pairs_y);
        Ok(Self {
            n: ds.n(),
            r,
            self0,
            net0,
        })
    }

    pub fn log_l0(&self) -> f64 {
        self.self0 + self.net0
    }

    /// Statistic of an arbitrary column `x` with `k` levels.
    pub fn statistic_for(&self, ds: &NodeDataset, x: &[Level], k: usize) -> PlrStat {
        let c = counts_bundle_for(ds, x, k);
        self.statistic_from_counts(&c)
    }

    pub fn statistic_from_counts(&self, c: &CountsBundle) -> PlrStat {
        let r = self.r as u64;
        let k = c.k() as u64;
        let self_j = self_loglik(&c.marginal);
        let net_j = cell_loglik(&c.edges.n_edges_yj, &c.pairs.n_pairs_yj);
        let lambda_self = self_j - self.self0;
        let lambda_network = net_j - self.net0;
        let lambda = ((self_j + net_j) - self.log_l0()) / self.n as f64;
        let df_self = (r - 1) * (k - 1);
        let df_network = r * r * (k * k - 1);
        PlrStat {
            lambda,
            lambda_self,
            lambda_network,
            df_self,
            df_network,
            p_self: chi2_sf(2.0 * lambda_self, df_self as f64),
            p_network: chi2_sf(2.0 * lambda_network, df_network as f64),
            p_perm: None,
        }
    }

    /// Permutation p-value `(1 + #{Λ_b >= Λ_obs}) / (B + 1)` for column `x`.
    /// Permutation `b` is drawn from the stream keyed by `(seed, stream_key, b)`.
    #[allow(clippy::too_many_arguments)]
    pub fn permutation_pvalue_for(
        &self,
        ds: &NodeDataset,
        x: &[Level],
        k: usize,
        observed: f64,
        permutations: usize,
        seed: u64,
        stream_key: u64,
    ) -> f64 {
        let tol = 1e-12 * (1.0 + observed.abs());
        let exceed: usize = (0..permutations)
            .into_par_iter()
            .map(|b| {
                let mut shuffled = x.to_vec();
                let mut g = rng::stream(seed, &[tag::PERMUTATION, stream_key, b as u64]);
                shuffled.shuffle(&mut g);
                let lam = self.statistic_for(ds, &shuffled, k).lambda;
                usize::from(lam >= observed - tol)
            })
            .sum();
        (1 + exceed) as f64 / (permutations + 1) as f64
    }
}

/// Plug-in counts and estimates for column `j`.
pub fn pmle(ds: &NodeDataset, j: usize) -> Result<(CountsBundle, PmleProbs), DataError> {
    ds.check_column(j)?;
    let c = counts_bundle_for(ds, ds.column(j), ds.k_levels(j));
    let p = PmleProbs::from_counts(&c);
    Ok((c, p))
}

pub fn plr_statistic(ds: &NodeDataset, j: usize) -> Result<PlrStat, PlrError> {
    ds.check_column(j)?;
    let base = PlrBaseline::new(ds)?;
    Ok(base.statistic_for(ds, ds.column(j), ds.k_levels(j)))
}

pub fn permutation_pvalue(
    ds: &NodeDataset,
    j: usize,
    permutations: usize,
    seed: u64,
) -> Result<f64, PlrError> {
    if permutations == 0 {
        return Err(PlrError::NoPermutations);
    }
    ds.check_column(j)?;
    let base = PlrBaseline::new(ds)?;
    let (x, k) = (ds.column(j), ds.k_levels(j));
    let observed = base.statistic_for(ds, x, k).lambda;
    Ok(base.permutation_pvalue_for(ds, x, k, observed, permutations, seed, j as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RawDataset;
    use crate::oracle::literal_plr;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

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
    fn two_nodes_without_edges() {
        let d = ds(vec![1, 2], vec![vec![1, 1]], vec![]);
        let (c, p) = pmle(&d, 0).unwrap();
        assert_eq!(p.pi_pairs_y, vec![None, Some(0.0), Some(0.0), None]);
        assert_relative_eq!(log_l0(&c, &p), 2.0 * 0.5f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_l0(&c, &p), -1.386_294_361_119_890_6, max_relative = 1e-12);
    }

    #[test]
    fn constant_column_is_exactly_zero() {
        let d = ds(
            vec![1, 2, 1, 2, 2, 1],
            vec![vec![1; 6], vec![1, 2, 1, 1, 2, 2]],
            vec![(0, 1), (1, 2), (3, 4), (5, 0), (2, 0)],
        );
        let (c, p) = pmle(&d, 0).unwrap();
        assert_eq!(log_lj(&c, &p), log_l0(&c, &p));
        let s = plr_statistic(&d, 0).unwrap();
        assert_eq!(s.lambda, 0.0);
        assert_eq!(s.lambda_self, 0.0);
        assert_eq!(s.lambda_network, 0.0);
        assert_eq!(s.df_self, 0);
        assert_eq!(s.p_self, 1.0);
    }

    #[test]
    fn duplicate_columns_agree() {
        let d = ds(
            vec![1, 2, 1, 2, 2, 1],
            vec![vec![1, 2, 1, 1, 2, 2], vec![1, 2, 1, 1, 2, 2]],
            vec![(0, 1), (1, 2), (3, 4), (5, 0), (2, 0)],
        );
        let (c0, p0) = pmle(&d, 0).unwrap();
        let (c1, p1) = pmle(&d, 1).unwrap();
        assert_eq!(log_lj(&c0, &p0), log_lj(&c1, &p1));
    }

    #[test]
    fn degrees_of_freedom_and_tail() {
        let d = ds(vec![1, 2, 1, 2], vec![vec![1, 2, 2, 1]], vec![(0, 1)]);
        let s = plr_statistic(&d, 0).unwrap();
        assert_eq!(s.df_self, 1);
        assert_eq!(s.df_network, 12);
        assert!((chi2_sf(3.841, s.df_self as f64) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn missing_response_level() {
        let d = RawDataset {
            y: vec![1, 1, 3],
            columns: vec![vec![1, 2, 1]],
            ..Default::default()
        }
        .validate()
        .unwrap();
        assert_eq!(
            plr_statistic(&d, 0).unwrap_err(),
            PlrError::MissingResponseLevel(2)
        );
        assert!(matches!(plr_statistic(&d, 1), Err(PlrError::Data(_))));
    }

    #[test]
    fn permutation_of_constant_column() {
        let d = ds(vec![1, 2, 1, 2], vec![vec![1; 4]], vec![(0, 1), (2, 3)]);
        assert_eq!(permutation_pvalue(&d, 0, 50, 3).unwrap(), 1.0);
        assert_eq!(
            permutation_pvalue(&d, 0, 0, 3).unwrap_err(),
            PlrError::NoPermutations
        );
    }

    #[test]
    fn permutation_is_seed_deterministic() {
        let d = ds(
            vec![1, 2, 1, 2, 1, 2, 1, 2],
            vec![vec![1, 2, 1, 2, 2, 2, 1, 1]],
            vec![(0, 2), (2, 4), (1, 3), (3, 5), (6, 0)],
        );
        let a = permutation_pvalue(&d, 0, 99, 11).unwrap();
        let b = permutation_pvalue(&d, 0, 99, 11).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0 && a <= 1.0);
    }

    fn arb_small(max_n: usize) -> impl Strategy<Value = NodeDataset> {
        (3..=max_n, 2usize..=3, 1usize..=3).prop_flat_map(|(n, r, k)| {
            (
                prop::collection::vec(1..=r as u32, n - r),
                prop::collection::vec(1..=k as u32, n),
                prop::collection::vec(prop::bool::weighted(0.35), n * n),
            )
                .prop_filter_map("n >= r", move |(tail, x, adj)| {
                    // every response level observed at least once
                    let mut y: Vec<u32> = (1..=r as u32).collect();
                    y.extend(tail);
                    if y.len() != n {
                        return None;
                    }
                    let edges = (0..n)
                        .flat_map(|a| (0..n).map(move |b| (a, b)))
                        .filter(|&(a, b)| a != b && adj[a * n + b])
                        .collect();
                    Some(
                        RawDataset {
                            y,
                            columns: vec![x],
                            edges,
                            column_levels: Some(vec![Some(k)]),
                            ..Default::default()
                        }
                        .validate()
                        .unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn matches_literal_node_pair_evaluation(d in arb_small(10)) {
            let s = plr_statistic(&d, 0).unwrap();
            let lit = literal_plr(&d, 0);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0);
            prop_assert!(close(s.lambda, lit.lambda), "{} vs {}", s.lambda, lit.lambda);
            prop_assert!(close(s.lambda_self, lit.lambda_self));
            prop_assert!(close(s.lambda_network, lit.lambda_network));
            let (c, p) = pmle(&d, 0).unwrap();
            prop_assert!(close(log_l0(&c, &p), lit.log_l0));
            prop_assert!(close(log_lj(&c, &p), lit.log_lj));
        }

        #[test]
        fn decomposition_and_sign(d in arb_small(12)) {
            let s = plr_statistic(&d, 0).unwrap();
            prop_assert!(s.decomposition_residual(d.n()) <= 1e-9);
            prop_assert!(s.lambda >= -1e-9);
            prop_assert!(s.lambda_self >= -1e-9);
            prop_assert!(s.lambda_network >= -1e-9);
            prop_assert!((0.0..=1.0).contains(&s.p_self));
            prop_assert!((0.0..=1.0).contains(&s.p_network));
        }

        #[test]
        fn level_relabelling_invariance(d in arb_small(12), seed in any::<u64>()) {
            use rand::SeedableRng;
            let k = d.k_levels(0);
            let mut codes: Vec<Level> = (1..=k as Level).collect();
            codes.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let relabelled: Vec<Level> = d.column(0).iter().map(|&v| codes[v as usize - 1]).collect();
            let d2 = d.with_extra_columns(vec![relabelled], vec!["perm".into()], vec![k]).unwrap();
            let a = plr_statistic(&d2, 0).unwrap().lambda;
            let b = plr_statistic(&d2, 1).unwrap().lambda;
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }
}
