//! Validated node-level dataset: categorical responses, a column-major
//! categorical feature matrix and a directed, loop-free edge list.
//!
//! Node indices are 0-based throughout the in-memory API. Level codes are
//! dense integers starting at 1, so level `v` of a column lives at array
//! offset `v - 1` in every count table.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Category code; valid codes are `1..=levels`.
pub type Level = u32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("dataset has no nodes")]
    Empty,
    #[error("response of node {node} is {value}; levels are coded 1..={max}")]
    ResponseLevel { node: usize, value: Level, max: usize },
    #[error("response needs at least two levels, found {0}")]
    TooFewResponseLevels(usize),
    #[error("feature column {column} has {len} entries, expected {n}")]
    ColumnLength { column: usize, len: usize, n: usize },
    #[error("feature column {column}, node {node}: level {value} outside 1..={max}")]
    FeatureLevel {
        column: usize,
        node: usize,
        value: Level,
        max: usize,
    },
    #[error("column {column}: declared {declared} levels but level {observed} is observed")]
    DeclaredLevels {
        column: usize,
        declared: usize,
        observed: usize,
    },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({src}, {dst}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { src: usize, dst: usize, n: usize },
    #[error("{names} feature names supplied for {columns} columns")]
    NameCount { names: usize, columns: usize },
    #[error("column index {index} out of range (p = {p})")]
    ColumnOutOfRange { index: usize, p: usize },
    #[error("node index {index} out of range (n = {n})")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("no node has total degree >= {0}")]
    EmptyAfterFilter(usize),
}

/// Unvalidated dataset parts, as produced by a parser or generator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawDataset {
    pub y: Vec<Level>,
    /// One vector per feature, each of length `y.len()`.
    pub columns: Vec<Vec<Level>>,
    /// Directed `(src, dst)` pairs, 0-based.
    pub edges: Vec<(usize, usize)>,
    pub feature_names: Option<Vec<String>>,
    /// Declared response level count; defaults to the observed maximum.
    pub response_levels: Option<usize>,
    /// Declared level count per column; `None` entries use the observed maximum.
    pub column_levels: Option<Vec<Option<usize>>>,
}

impl RawDataset {
    /// Checks every invariant and builds the adjacency index.
    pub fn validate(self) -> Result<NodeDataset, DataError> {
        let n = self.y.len();
        if n == 0 {
            return Err(DataError::Empty);
        }
        let observed_r = self.y.iter().copied().max().unwrap_or(0) as usize;
        let r_levels = self.response_levels.unwrap_or(observed_r);
        if r_levels < 2 {
            return Err(DataError::TooFewResponseLevels(r_levels));
        }
        for (node, &value) in self.y.iter().enumerate() {
            if value == 0 || value as usize > r_levels {
                return Err(DataError::ResponseLevel {
                    node,
                    value,
                    max: r_levels,
                });
            }
        }

        let p = self.columns.len();
        let declared = self.column_levels.unwrap_or_default();
        let mut k_levels = Vec::with_capacity(p);
        for (column, col) in self.columns.iter().enumerate() {
            if col.len() != n {
                return Err(DataError::ColumnLength {
                    column,
                    len: col.len(),
                    n,
                });
            }
            let observed = col.iter().copied().max().unwrap_or(0) as usize;
            let k = match declared.get(column).copied().flatten() {
                Some(d) if d < observed => {
                    return Err(DataError::DeclaredLevels {
                        column,
                        declared: d,
                        observed,
                    })
                }
                Some(d) => d,
                None => observed,
            };
            if let Some((node, &value)) = col.iter().enumerate().find(|(_, &v)| v == 0) {
                return Err(DataError::FeatureLevel {
                    column,
                    node,
                    value,
                    max: k,
                });
            }
            k_levels.push(k.max(1));
        }

        let names = match self.feature_names {
            Some(names) if names.len() != p => {
                return Err(DataError::NameCount {
                    names: names.len(),
                    columns: p,
                })
            }
            Some(names) => names,
            None => (1..=p).map(|j| format!("x{j}")).collect(),
        };

        let graph = DiGraph::new(n, self.edges)?;
        Ok(NodeDataset {
            y: self.y,
            r_levels,
            columns: self.columns,
            k_levels,
            names,
            graph,
        })
    }
}

/// Directed graph stored as a sorted edge list with CSR-style offsets in both
/// directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DiGraph {
    n: usize,
    /// Sorted by `(src, dst)`.
    edges: Vec<(u32, u32)>,
    out_offsets: Vec<usize>,
    in_offsets: Vec<usize>,
    /// Sources grouped by destination, ascending within each group.
    in_sources: Vec<u32>,
}

impl DiGraph {
    pub fn new(n: usize, mut raw: Vec<(usize, usize)>) -> Result<Self, DataError> {
        for &(src, dst) in &raw {
            if src >= n || dst >= n {
                return Err(DataError::EndpointOutOfRange { src, dst, n });
            }
            if src == dst {
                return Err(DataError::SelfLoop(src));
            }
        }
        raw.sort_unstable();
        if let Some(w) = raw.windows(2).find(|w| w[0] == w[1]) {
            return Err(DataError::DuplicateEdge(w[0].0, w[0].1));
        }
        let edges: Vec<(u32, u32)> = raw.iter().map(|&(s, d)| (s as u32, d as u32)).collect();

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(s, d) in &edges {
            out_offsets[s as usize + 1] += 1;
            in_offsets[d as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut fill = in_offsets.clone();
        let mut in_sources = vec![0u32; edges.len()];
        // edges are sorted by src, so each destination bucket fills in ascending src order
        for &(s, d) in &edges {
            in_sources[fill[d as usize]] = s;
            fill[d as usize] += 1;
        }
        Ok(Self {
            n,
            edges,
            out_offsets,
            in_offsets,
            in_sources,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn out_neighbors(&self, i: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.edges[self.out_offsets[i]..self.out_offsets[i + 1]]
            .iter()
            .map(|&(_, d)| d as usize)
    }

    pub fn in_neighbors(&self, i: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
            .iter()
            .map(|&s| s as usize)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_offsets[i + 1] - self.in_offsets[i]
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        let slice = &self.edges[self.out_offsets[src]..self.out_offsets[src + 1]];
        slice.binary_search(&(src as u32, dst as u32)).is_ok()
    }

    pub fn to_pairs(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(s, d)| (s as usize, d as usize))
            .collect()
    }
}

/// Immutable, validated dataset. Safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDataset {
    y: Vec<Level>,
    r_levels: usize,
    columns: Vec<Vec<Level>>,
    k_levels: Vec<usize>,
    names: Vec<String>,
    graph: DiGraph,
}

impl NodeDataset {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn response(&self) -> &[Level] {
        &self.y
    }

    pub fn r_levels(&self) -> usize {
        self.r_levels
    }

    pub fn column(&self, j: usize) -> &[Level] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Level>] {
        &self.columns
    }

    pub fn k_levels(&self, j: usize) -> usize {
        self.k_levels[j]
    }

    pub fn all_k_levels(&self) -> &[usize] {
        &self.k_levels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn check_column(&self, j: usize) -> Result<(), DataError> {
        if j < self.p() {
            Ok(())
        } else {
            Err(DataError::ColumnOutOfRange {
                index: j,
                p: self.p(),
            })
        }
    }

    /// True when every column shares one level count.
    pub fn homogeneous_levels(&self) -> bool {
        self.k_levels.windows(2).all(|w| w[0] == w[1])
    }

    /// Decomposes back into raw parts, keeping the level counts explicit.
    pub fn to_raw(&self) -> RawDataset {
        RawDataset {
            y: self.y.clone(),
            columns: self.columns.clone(),
            edges: self.graph.to_pairs(),
            feature_names: Some(self.names.clone()),
            response_levels: Some(self.r_levels),
            column_levels: Some(self.k_levels.iter().map(|&k| Some(k)).collect()),
        }
    }

    /// Sub-dataset induced on `nodes` (strictly increasing). Level counts are
    /// carried over unchanged.
    pub fn induced(&self, nodes: &[usize]) -> Result<NodeDataset, DataError> {
        let n = self.n();
        let mut remap = vec![usize::MAX; n];
        for (new, &old) in nodes.iter().enumerate() {
            if old >= n {
                return Err(DataError::NodeOutOfRange { index: old, n });
            }
            remap[old] = new;
        }
        let y = nodes.iter().map(|&i| self.y[i]).collect();
        let columns = self
            .columns
            .iter()
            .map(|col| nodes.iter().map(|&i| col[i]).collect())
            .collect();
        let edges = self
            .graph
            .edges
            .iter()
            .filter_map(|&(s, d)| {
                let (s, d) = (remap[s as usize], remap[d as usize]);
                (s != usize::MAX && d != usize::MAX).then_some((s, d))
            })
            .collect();
        RawDataset {
            y,
            columns,
            edges,
            feature_names: Some(self.names.clone()),
            response_levels: Some(self.r_levels),
            column_levels: Some(self.k_levels.iter().map(|&k| Some(k)).collect()),
        }
        .validate()
    }

    /// Keeps nodes whose total degree (in + out) is at least `min_degree`,
    /// relabelling them contiguously in their original order.
    pub fn degree_filter(&self, min_degree: usize) -> Result<NodeDataset, DataError> {
        let keep: Vec<usize> = (0..self.n())
            .filter(|&i| self.graph.out_degree(i) + self.graph.in_degree(i) >= min_degree)
            .collect();
        if keep.is_empty() {
            return Err(DataError::EmptyAfterFilter(min_degree));
        }
        self.induced(&keep)
    }

    /// Same nodes and network with extra feature columns appended.
    pub fn with_extra_columns(
        &self,
        columns: Vec<Vec<Level>>,
        names: Vec<String>,
        levels: Vec<usize>,
    ) -> Result<NodeDataset, DataError> {
        let mut raw = self.to_raw();
        raw.columns.extend(columns);
        raw.feature_names.as_mut().unwrap().extend(names);
        raw.column_levels
            .as_mut()
            .unwrap()
            .extend(levels.into_iter().map(Some));
        raw.validate()
    }

    /// Same nodes and features with a different edge list.
    pub fn with_edges(&self, edges: Vec<(usize, usize)>) -> Result<NodeDataset, DataError> {
        let graph = DiGraph::new(self.n(), edges)?;
        Ok(NodeDataset {
            graph,
            ..self.clone()
        })
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<NodeDataset, DataError> {
        for &j in cols {
            self.check_column(j)?;
        }
        Ok(NodeDataset {
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
            k_levels: cols.iter().map(|&j| self.k_levels[j]).collect(),
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            ..self.clone()
        })
    }
}

/// A screened feature: a single column or a pairwise interaction of two
/// columns (`j < k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Main(usize),
    Pair(usize, usize),
}

impl Feature {
    /// `None` unless `j < k`.
    pub fn pair(j: usize, k: usize) -> Option<Feature> {
        (j < k).then_some(Feature::Pair(j, k))
    }

    pub fn label(&self, names: &[String]) -> String {
        match *self {
            Feature::Main(j) => names
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("x{}", j + 1)),
            Feature::Pair(j, k) => format!(
                "{}&{}",
                Feature::Main(j).label(names),
                Feature::Main(k).label(names)
            ),
        }
    }
}

impl fmt::Display for Feature {
    /// 1-based column numbers, e.g. `3` or `3&4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Feature::Main(j) => write!(f, "{}", j + 1),
            Feature::Pair(j, k) => write!(f, "{}&{}", j + 1, k + 1),
        }
    }
}

/// Ordered set of main effects and interactions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet(BTreeSet<Feature>);

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mains(cols: impl IntoIterator<Item = usize>) -> Self {
        Self(cols.into_iter().map(Feature::Main).collect())
    }

    pub fn insert(&mut self, f: Feature) -> bool {
        if let Feature::Pair(j, k) = f {
            assert!(j < k, "interaction pairs are stored with j < k");
        }
        self.0.insert(f)
    }

    pub fn contains(&self, f: &Feature) -> bool {
        self.0.contains(f)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Feature> {
        self.0.iter()
    }

    pub fn intersection_len(&self, other: &FeatureSet) -> usize {
        self.0.intersection(&other.0).count()
    }

    /// Column indices of the main effects, ascending.
    pub fn main_columns(&self) -> Vec<usize> {
        self.0
            .iter()
            .filter_map(|f| match *f {
                Feature::Main(j) => Some(j),
                Feature::Pair(..) => None,
            })
            .collect()
    }
}

impl FromIterator<Feature> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = Feature>>(iter: I) -> Self {
        let mut set = FeatureSet::new();
        for f in iter {
            set.insert(f);
        }
        set
    }
}
