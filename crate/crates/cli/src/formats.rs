//! On-disk dataset layout: `nodes.csv` (`node_id,y,x1,...,xp`),
//! `edges.csv` (`src,dst`) and `meta.json`.
//!
//! Values that are all positive integers are taken as level codes. Any
//! other column is coded by its sorted distinct values, and the mapping is
//! recorded in the metadata.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use netscreen_core::dataset::{Level, NodeDataset, RawDataset};
use netscreen_core::simgen::SimulationConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const META_FILE: &str = "meta.json";

/// `labels[c - 1]` is the original value behind code `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMap {
    pub column: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub n: usize,
    pub p: usize,
    pub response_levels: usize,
    pub column_levels: Vec<usize>,
    pub feature_names: Vec<String>,
    #[serde(default)]
    pub level_maps: Vec<LevelMap>,
    /// How generator levels relate to stored codes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_coding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<SimulationConfig>,
}

pub struct DataPaths {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub meta: PathBuf,
}

impl DataPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            nodes: dir.join(NODES_FILE),
            edges: dir.join(EDGES_FILE),
            meta: dir.join(META_FILE),
        }
    }
}

pub fn write_dataset(dir: &Path, ds: &NodeDataset, generator: Option<&SimulationConfig>) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let paths = DataPaths::in_dir(dir);

    let mut w = csv::Writer::from_path(&paths.nodes).map_err(|e| CliError::io(paths.nodes.display(), e))?;
    let mut header = vec!["node_id".to_string(), "y".to_string()];
    header.extend(ds.feature_names().iter().cloned());
    w.write_record(&header).map_err(|e| CliError::io(paths.nodes.display(), e))?;
    for i in 0..ds.n() {
        let mut row = vec![i.to_string(), ds.response()[i].to_string()];
        row.extend(ds.columns().iter().map(|c| c[i].to_string()));
        w.write_record(&row).map_err(|e| CliError::io(paths.nodes.display(), e))?;
    }
    w.flush().map_err(|e| CliError::io(paths.nodes.display(), e))?;

    let mut w = csv::Writer::from_path(&paths.edges).map_err(|e| CliError::io(paths.edges.display(), e))?;
    w.write_record(["src", "dst"]).map_err(|e| CliError::io(paths.edges.display(), e))?;
    for &(s, d) in ds.graph().edges() {
        w.write_record([s.to_string(), d.to_string()])
            .map_err(|e| CliError::io(paths.edges.display(), e))?;
    }
    w.flush().map_err(|e| CliError::io(paths.edges.display(), e))?;

    let meta = Meta {
        n: ds.n(),
        p: ds.p(),
        response_levels: ds.r_levels(),
        column_levels: ds.all_k_levels().to_vec(),
        feature_names: ds.feature_names().to_vec(),
        level_maps: Vec::new(),
        level_coding: generator.map(|_| "generator level l is stored as code l + 1".to_string()),
        generator: generator.cloned(),
    };
    write_json(&paths.meta, &meta)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path.display(), e))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path.display(), e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Codes one column of raw strings. Returns codes, level count and, when
/// the values were not already codes, the label map.
fn encode(column: &str, values: &[String], declared: Option<usize>, map: Option<&LevelMap>) -> Result<(Vec<Level>, usize, Option<LevelMap>), CliError> {
    if let Some(m) = map {
        let index: HashMap<&str, Level> = m
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as Level + 1))
            .collect();
        let codes = values
            .iter()
            .map(|v| {
                index
                    .get(v.as_str())
                    .copied()
                    .ok_or_else(|| CliError::Validation(format!("column {column}: value '{v}' missing from its level map")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((codes, m.labels.len().max(declared.unwrap_or(0)), None));
    }
    let as_codes: Option<Vec<Level>> = values
        .iter()
        .map(|v| v.trim().parse::<Level>().ok().filter(|&c| c >= 1))
        .collect();
    if let Some(codes) = as_codes {
        let max = codes.iter().copied().max().unwrap_or(1) as usize;
        return Ok((codes, max.max(declared.unwrap_or(0)), None));
    }
    let distinct: BTreeSet<&str> = values.iter().map(|v| v.as_str()).collect();
    let mut labels: Vec<&str> = distinct.into_iter().collect();
    // numeric labels in numeric order
    if labels.iter().all(|l| l.trim().parse::<f64>().is_ok()) {
        labels.sort_by(|a, b| a.trim().parse::<f64>().unwrap().total_cmp(&b.trim().parse::<f64>().unwrap()));
    }
    let index: HashMap<&str, Level> = labels.iter().enumerate().map(|(i, &l)| (l, i as Level + 1)).collect();
    let codes = values.iter().map(|v| index[v.as_str()]).collect();
    Ok((
        codes,
        labels.len().max(declared.unwrap_or(0)),
        Some(LevelMap {
            column: column.to_string(),
            labels: labels.into_iter().map(String::from).collect(),
        }),
    ))
}

/// Reads and validates a dataset. `meta` is optional; when present its
/// level counts and level maps apply.
pub fn read_dataset(paths: &DataPaths) -> Result<(NodeDataset, Meta), CliError> {
    let meta: Option<Meta> = if paths.meta.exists() {
        Some(read_json(&paths.meta)?)
    } else {
        None
    };
    let mut r = csv::Reader::from_path(&paths.nodes).map_err(|e| CliError::io(paths.nodes.display(), e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", paths.nodes.display())))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if header.len() < 2 || header[0] != "node_id" || header[1] != "y" {
        return Err(CliError::Validation(format!(
            "{}: header must start with node_id,y",
            paths.nodes.display()
        )));
    }
    let names: Vec<String> = header[2..].to_vec();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut raw_y = Vec::new();
    let mut raw_cols: Vec<Vec<String>> = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", paths.nodes.display())))?;
        if rec.len() != header.len() {
            return Err(CliError::Validation(format!(
                "{}: row {} has {} fields, expected {}",
                paths.nodes.display(),
                line + 2,
                rec.len(),
                header.len()
            )));
        }
        let id = rec[0].trim().to_string();
        if ids.insert(id.clone(), raw_y.len()).is_some() {
            return Err(CliError::Validation(format!("duplicate node id '{id}'")));
        }
        raw_y.push(rec[1].trim().to_string());
        for (c, v) in raw_cols.iter_mut().zip(rec.iter().skip(2)) {
            c.push(v.trim().to_string());
        }
    }

    let maps: BTreeMap<String, LevelMap> = meta
        .iter()
        .flat_map(|m| m.level_maps.iter().cloned())
        .map(|m| (m.column.clone(), m))
        .collect();
    let mut level_maps = Vec::new();
    let (y, r_levels, ymap) = encode("y", &raw_y, meta.as_ref().map(|m| m.response_levels), maps.get("y"))?;
    level_maps.extend(ymap.or_else(|| maps.get("y").cloned()));
    let mut columns = Vec::with_capacity(names.len());
    let mut levels = Vec::with_capacity(names.len());
    for (j, (name, vals)) in names.iter().zip(&raw_cols).enumerate() {
        let declared = meta.as_ref().and_then(|m| m.column_levels.get(j).copied());
        let (codes, k, map) = encode(name, vals, declared, maps.get(name))?;
        level_maps.extend(map.or_else(|| maps.get(name).cloned()));
        columns.push(codes);
        levels.push(Some(k));
    }

    let mut edges = Vec::new();
    if paths.edges.exists() {
        let mut r = csv::Reader::from_path(&paths.edges).map_err(|e| CliError::io(paths.edges.display(), e))?;
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", paths.edges.display())))?;
            if rec.len() != 2 {
                return Err(CliError::Validation(format!("{}: edge rows need src,dst", paths.edges.display())));
            }
            let look = |s: &str| {
                ids.get(s.trim())
                    .copied()
                    .ok_or_else(|| CliError::Validation(format!("edge endpoint '{}' is not a node id", s.trim())))
            };
            edges.push((look(&rec[0])?, look(&rec[1])?));
        }
    }

    let ds = RawDataset {
        y,
        columns,
        edges,
        feature_names: Some(names.clone()),
        response_levels: Some(r_levels),
        column_levels: Some(levels),
    }
    .validate()
    .map_err(|e| CliError::Validation(e.to_string()))?;
    let meta = Meta {
        n: ds.n(),
        p: ds.p(),
        response_levels: ds.r_levels(),
        column_levels: ds.all_k_levels().to_vec(),
        feature_names: names,
        level_maps,
        level_coding: meta.as_ref().and_then(|m| m.level_coding.clone()),
        generator: meta.and_then(|m| m.generator),
    };
    Ok((ds, meta))
}
