//! Node, node-pair and edge count tables for one response/feature split.
//!
//! Every table is a flat `Vec<u64>` indexed with 0-based level offsets
//! (`code - 1`). Pair tables come from the product identity on the joint
//! node counts and never touch node pairs, so a full bundle costs
//! `O(n + |E| + R²K²)`.

use crate::dataset::{DataError, Level, NodeDataset};

/// Node tallies of the response, the feature and their joint table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalCounts {
    pub r: usize,
    pub k: usize,
    pub n_y: Vec<u64>,
    pub n_j: Vec<u64>,
    /// `[r * k + k']`
    pub n_yj: Vec<u64>,
}

/// Ordered node-pair counts (`i1 != i2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCounts {
    /// `[r1 * R + r2]`
    pub n_pairs_y: Vec<u64>,
    /// `[((r1 * R + r2) * K + k1) * K + k2]`
    pub n_pairs_yj: Vec<u64>,
}

/// Linked ordered pairs, laid out like [`PairCounts`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCounts {
    pub n_edges_y: Vec<u64>,
    pub n_edges_yj: Vec<u64>,
}

/// All count tables for one feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsBundle {
    pub marginal: MarginalCounts,
    pub pairs: PairCounts,
    pub edges: EdgeCounts,
}

#[inline]
pub fn pair_cell(r_levels: usize, r1: usize, r2: usize) -> usize {
    r1 * r_levels + r2
}

#[inline]
pub fn quad_cell(r_levels: usize, k_levels: usize, r1: usize, r2: usize, k1: usize, k2: usize) -> usize {
    ((r1 * r_levels + r2) * k_levels + k1) * k_levels + k2
}

impl MarginalCounts {
    pub fn n(&self) -> u64 {
        self.n_y.iter().sum()
    }

    pub fn yj(&self, r: usize, k: usize) -> u64 {
        self.n_yj[r * self.k + k]
    }
}

impl CountsBundle {
    pub fn r(&self) -> usize {
        self.marginal.r
    }

    pub fn k(&self) -> usize {
        self.marginal.k
    }

    pub fn pairs_yj(&self, r1: usize, r2: usize, k1: usize, k2: usize) -> u64 {
        self.pairs.n_pairs_yj[quad_cell(self.r(), self.k(), r1, r2, k1, k2)]
    }

    pub fn edges_yj(&self, r1: usize, r2: usize, k1: usize, k2: usize) -> u64 {
        self.edges.n_edges_yj[quad_cell(self.r(), self.k(), r1, r2, k1, k2)]
    }
}

/// Tallies for column `j`.
pub fn marginal_counts(ds: &NodeDataset, j: usize) -> Result<MarginalCounts, DataError> {
    ds.check_column(j)?;
    Ok(marginal_counts_for(ds, ds.column(j), ds.k_levels(j)))
}

/// Tallies for an arbitrary column with `k` levels over the dataset's nodes.
pub fn marginal_counts_for(ds: &NodeDataset, x: &[Level], k: usize) -> MarginalCounts {
    let r = ds.r_levels();
    let mut n_y = vec![0u64; r];
    let mut n_j = vec![0u64; k];
    let mut n_yj = vec![0u64; r * k];
    for (&yi, &xi) in ds.response().iter().zip(x) {
        let (a, b) = (yi as usize - 1, xi as usize - 1);
        n_y[a] += 1;
        n_j[b] += 1;
        n_yj[a * k + b] += 1;
    }
    MarginalCounts { r, k, n_y, n_j, n_yj }
}

/// Ordered-pair counts from the product identity
/// `n(c1, c2) = n(c1) n(c2) - [c1 == c2] n(c1)`.
pub fn pair_counts(m: &MarginalCounts) -> PairCounts {
    let (r, k) = (m.r, m.k);
    let mut n_pairs_y = vec![0u64; r * r];
    for r1 in 0..r {
        for r2 in 0..r {
            let self_pairs = if r1 == r2 { m.n_y[r1] } else { 0 };
            n_pairs_y[pair_cell(r, r1, r2)] = m.n_y[r1] * m.n_y[r2] - self_pairs;
        }
    }
    let mut n_pairs_yj = vec![0u64; r * r * k * k];
    for r1 in 0..r {
        for k1 in 0..k {
            let a = m.n_yj[r1 * k + k1];
            for r2 in 0..r {
                for k2 in 0..k {
                    let b = m.n_yj[r2 * k + k2];
                    let self_pairs = if (r1, k1) == (r2, k2) { a } else { 0 };
                    n_pairs_yj[quad_cell(r, k, r1, r2, k1, k2)] = a * b - self_pairs;
                }
            }
        }
    }
    PairCounts {
        n_pairs_y,
        n_pairs_yj,
    }
}

/// One pass over the edge list for column `j`.
pub fn edge_counts(ds: &NodeDataset, j: usize) -> Result<EdgeCounts, DataError> {
    ds.check_column(j)?;
    Ok(edge_counts_for(ds, ds.column(j), ds.k_levels(j)))
}

pub fn edge_counts_for(ds: &NodeDataset, x: &[Level], k: usize) -> EdgeCounts {
    let r = ds.r_levels();
    let y = ds.response();
    let mut n_edges_y = vec![0u64; r * r];
    let mut n_edges_yj = vec![0u64; r * r * k * k];
    for &(s, d) in ds.graph().edges() {
        let (s, d) = (s as usize, d as usize);
        let (r1, r2) = (y[s] as usize - 1, y[d] as usize - 1);
        let (k1, k2) = (x[s] as usize - 1, x[d] as usize - 1);
        n_edges_y[pair_cell(r, r1, r2)] += 1;
        n_edges_yj[quad_cell(r, k, r1, r2, k1, k2)] += 1;
    }
    EdgeCounts {
        n_edges_y,
        n_edges_yj,
    }
}

pub fn counts_bundle(ds: &NodeDataset, j: usize) -> Result<CountsBundle, DataError> {
    ds.check_column(j)?;
    Ok(counts_bundle_for(ds, ds.column(j), ds.k_levels(j)))
}

pub fn counts_bundle_for(ds: &NodeDataset, x: &[Level], k: usize) -> CountsBundle {
    let marginal = marginal_counts_for(ds, x, k);
    let pairs = pair_counts(&marginal);
    let edges = edge_counts_for(ds, x, k);
    CountsBundle {
        marginal,
        pairs,
        edges,
    }
}
