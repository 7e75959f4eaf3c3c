//! Node-classification datasets and their on-disk layout.
//!
//! A dataset directory holds:
//!
//! | file | contents |
//! |------|----------|
//! | `edges.tsv` | one edge per line, `src<TAB>dst`, 0-based ids, `#` comments |
//! | `features.csv` | `N` lines of `F` comma-separated reals |
//! | `features.bin` + `meta.json` | row-major little-endian `f32`, meta `{"n": N, "f": F}` |
//! | `labels.csv` | `N` lines, integer label or `-1` for unlabeled |
//! | `split.json` | optional `{"train": [..], "val": [..], "test": [..]}` |
//!
//! `meta.json` may also carry `"classes"` to pin the class count; otherwise it
//! is one more than the largest label. When both feature files exist the
//! binary one wins.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::matrix::Matrix;
use crate::rng::{rng_from_seed, sample_without_replacement};

pub type FeatureMatrix = Matrix;

pub const EDGES_FILE: &str = "edges.tsv";
pub const FEATURES_CSV: &str = "features.csv";
pub const FEATURES_BIN: &str = "features.bin";
pub const META_FILE: &str = "meta.json";
pub const LABELS_FILE: &str = "labels.csv";
pub const SPLIT_FILE: &str = "split.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelArray {
    labels: Vec<Option<usize>>,
    num_classes: usize,
}

impl LabelArray {
    pub fn new(labels: Vec<Option<usize>>, num_classes: usize) -> Result<Self> {
        for (node, label) in labels.iter().enumerate() {
            if let Some(l) = *label {
                if l >= num_classes {
                    return Err(Error::LabelOutOfRange {
                        node,
                        label: l as i64,
                        num_classes,
                    });
                }
            }
        }
        Ok(Self {
            labels,
            num_classes,
        })
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, node: usize) -> Option<usize> {
        self.labels[node]
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.labels
    }

    /// Labels of `nodes`, failing on any unlabeled node.
    pub fn gather(&self, nodes: &[usize]) -> Result<Vec<usize>> {
        nodes
            .iter()
            .map(|&i| {
                self.labels.get(i).copied().flatten().ok_or_else(|| {
                    Error::InvalidParameter(format!("node {i} is unlabeled or out of range"))
                })
            })
            .collect()
    }

    /// Labeled nodes of each class, ascending.
    pub fn nodes_by_class(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(l) = *l {
                out[l].push(i);
            }
        }
        out
    }

    pub fn class_histogram(&self, nodes: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &i in nodes {
            if let Some(l) = self.labels[i] {
                counts[l] += 1;
            }
        }
        counts
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl NodeSplit {
    /// Checks disjointness, index range and that every train node is labeled.
    pub fn validate(&self, labels: &LabelArray) -> Result<()> {
        let n = labels.len();
        let mut seen = BTreeSet::new();
        for (name, idx) in [
            ("train", &self.train),
            ("val", &self.val),
            ("test", &self.test),
        ] {
            for &i in idx {
                if i >= n {
                    return Err(Error::DimensionMismatch(format!(
                        "{name} index {i} outside 0..{n}"
                    )));
                }
                if !seen.insert(i) {
                    return Err(Error::InvalidParameter(format!(
                        "node {i} appears more than once across the split"
                    )));
                }
            }
        }
        if let Some(&i) = self.train.iter().find(|&&i| labels.get(i).is_none()) {
            return Err(Error::InvalidParameter(format!(
                "train node {i} is unlabeled"
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).expect("split serializes");
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// Raw unweighted graph; normalize before use in a model.
    pub graph: SparseGraph,
    pub features: FeatureMatrix,
    pub labels: LabelArray,
    /// Fixed split shipped with the dataset, if any.
    pub split: Option<NodeSplit>,
    /// Non-comment lines in the edge file (before symmetrization and dedup).
    pub input_edge_lines: usize,
}

impl Dataset {
    pub fn new(
        graph: SparseGraph,
        features: FeatureMatrix,
        labels: LabelArray,
        split: Option<NodeSplit>,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if features.rows() != n || labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "graph has {n} nodes, features {} rows, labels {} entries",
                features.rows(),
                labels.len()
            )));
        }
        if !features.is_finite() {
            return Err(Error::InvalidParameter(
                "features contain non-finite values".into(),
            ));
        }
        if let Some(split) = &split {
            split.validate(&labels)?;
        }
        let input_edge_lines = graph.num_undirected_edges();
        Ok(Self {
            graph,
            features,
            labels,
            split,
            input_edge_lines,
        })
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    #[inline]
    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.labels.num_classes()
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureFormat {
    Csv,
    Bin,
}

fn require(dir: &Path, name: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingFile(path))
    }
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Yields `(1-based line number, trimmed content)` for non-blank, non-comment lines.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if !content.is_empty() {
            out.push((i + 1, content.to_string()));
        }
    }
    Ok(out)
}

fn read_meta(dir: &Path) -> Result<Option<Meta>> {
    let path = dir.join(META_FILE);
    if !path.is_file() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|source| Error::Json { path, source })
}

fn read_labels(path: &Path, classes: Option<usize>) -> Result<LabelArray> {
    let mut raw = Vec::new();
    for (line, content) in data_lines(path)? {
        let value: i64 = content.parse().map_err(|_| {
            malformed(
                path,
                line,
                format!("expected an integer label, got {content:?}"),
            )
        })?;
        if value < -1 {
            return Err(malformed(path, line, format!("negative label {value}")));
        }
        raw.push(value);
    }
    let num_classes = classes.unwrap_or_else(|| {
        raw.iter()
            .copied()
            .max()
            .map_or(0, |m| (m + 1).max(0) as usize)
    });
    let mut labels = Vec::with_capacity(raw.len());
    for (node, &v) in raw.iter().enumerate() {
        if v < 0 {
            labels.push(None);
        } else if v as usize >= num_classes {
            return Err(Error::LabelOutOfRange {
                node,
                label: v,
                num_classes,
            });
        } else {
            labels.push(Some(v as usize));
        }
    }
    LabelArray::new(labels, num_classes)
}

fn read_features_csv(path: &Path) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, content) in data_lines(path)? {
        let row = content
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| malformed(path, line, format!("bad feature value {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(malformed(
                    path,
                    line,
                    format!("{} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    Matrix::from_rows(&rows)
}

fn read_features_bin(path: &Path, meta: &Meta) -> Result<Matrix> {
    let (n, f) = match (meta.n, meta.f) {
        (Some(n), Some(f)) => (n, f),
        _ => {
            return Err(Error::DimensionMismatch(
                "meta.json must give \"n\" and \"f\" for features.bin".into(),
            ))
        }
    };
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != n * f * 4 {
        return Err(Error::DimensionMismatch(format!(
            "features.bin has {} bytes, expected {} for {n}x{f} f32",
            bytes.len(),
            n * f * 4
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Matrix::from_vec(n, f, data)
}

fn read_edges(path: &Path, num_nodes: usize) -> Result<(Vec<(usize, usize)>, usize)> {
    let mut edges = Vec::new();
    for (line, content) in data_lines(path)? {
        let mut parts = content.split_whitespace();
        let mut next_id = |what: &str| -> Result<usize> {
            let tok = parts
                .next()
                .ok_or_else(|| malformed(path, line, format!("missing {what} node id")))?;
            let id: usize = tok
                .parse()
                .map_err(|_| malformed(path, line, format!("bad {what} node id {tok:?}")))?;
            if id >= num_nodes {
                return Err(malformed(
                    path,
                    line,
                    format!("{what} node id {id} outside 0..{num_nodes}"),
                ));
            }
            Ok(id)
        };
        let src = next_id("source")?;
        let dst = next_id("target")?;
        edges.push((src, dst));
    }
    let count = edges.len();
    Ok((edges, count))
}

/// Reads and validates a dataset directory.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let edges_path = require(dir, EDGES_FILE)?;
    let labels_path = require(dir, LABELS_FILE)?;
    let meta = read_meta(dir)?;

    let bin_path = dir.join(FEATURES_BIN);
    let features = if bin_path.is_file() {
        let meta = meta
            .as_ref()
            .ok_or_else(|| Error::MissingFile(dir.join(META_FILE)))?;
        read_features_bin(&bin_path, meta)?
    } else {
        read_features_csv(&require(dir, FEATURES_CSV)?)?
    };

    let labels = read_labels(&labels_path, meta.as_ref().and_then(|m| m.classes))?;
    let n = labels.len();
    if features.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "labels.csv has {n} nodes but features have {} rows",
            features.rows()
        )));
    }
    if let Some(meta_n) = meta.as_ref().and_then(|m| m.n) {
        if meta_n != n {
            return Err(Error::DimensionMismatch(format!(
                "meta.json says n={meta_n} but labels.csv has {n} nodes"
            )));
        }
    }
    let (edges, edge_lines) = read_edges(&edges_path, n)?;
    let graph = SparseGraph::from_edges(n, edges)?;

    let split_path = dir.join(SPLIT_FILE);
    let split = if split_path.is_file() {
        Some(NodeSplit::load(&split_path)?)
    } else {
        None
    };
    let mut dataset = Dataset::new(graph, features, labels, split)?;
    dataset.input_edge_lines = edge_lines;
    Ok(dataset)
}

/// Writes `dataset` in the directory layout read by [`load_dataset`].
pub fn save_dataset(dataset: &Dataset, dir: &Path, format: FeatureFormat) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let n = dataset.num_nodes();
    let f = dataset.num_features();

    let write_file =
        |name: &str, body: &dyn Fn(&mut BufWriter<fs::File>) -> std::io::Result<()>| {
            let path = dir.join(name);
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))
        };

    write_file(EDGES_FILE, &|w| {
        for i in 0..n {
            for (j, _) in dataset.graph.neighbors(i) {
                if i < j {
                    writeln!(w, "{i}\t{j}")?;
                }
            }
        }
        Ok(())
    })?;

    write_file(LABELS_FILE, &|w| {
        for l in dataset.labels.as_slice() {
            match l {
                Some(l) => writeln!(w, "{l}")?,
                None => writeln!(w, "-1")?,
            }
        }
        Ok(())
    })?;

    let mut meta = Meta {
        n: None,
        f: None,
        classes: Some(dataset.num_classes()),
    };
    match format {
        FeatureFormat::Csv => {
            let stale = dir.join(FEATURES_BIN);
            if stale.exists() {
                fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
            }
            write_file(FEATURES_CSV, &|w| {
                for row in dataset.features.iter_rows() {
                    let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
                Ok(())
            })?;
        }
        FeatureFormat::Bin => {
            meta.n = Some(n);
            meta.f = Some(f);
            write_file(FEATURES_BIN, &|w| {
                for &v in dataset.features.as_slice() {
                    w.write_all(&(v as f32).to_le_bytes())?;
                }
                Ok(())
            })?;
        }
    }
    let meta_path = dir.join(META_FILE);
    fs::write(
        &meta_path,
        serde_json::to_string(&meta).expect("meta serializes"),
    )
    .map_err(|e| Error::io(&meta_path, e))?;

    if let Some(split) = &dataset.split {
        split.save(&dir.join(SPLIT_FILE))?;
    }
    Ok(())
}

/// SHA-256 over the dataset files present in `dir`, in a fixed order.
pub fn dataset_checksum(dir: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    for name in [
        EDGES_FILE,
        FEATURES_CSV,
        FEATURES_BIN,
        META_FILE,
        LABELS_FILE,
        SPLIT_FILE,
    ] {
        let path = dir.join(name);
        if path.is_file() {
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            hasher.update(name.as_bytes());
            hasher.update((bytes.len() as u64).to_le_bytes());
            hasher.update(&bytes);
        }
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Divides each row by its sum; zero-sum rows are left unchanged.
pub fn row_normalize_features(features: &FeatureMatrix) -> FeatureMatrix {
    let mut out = features.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let sum: f64 = row.iter().sum();
        if sum != 0.0 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
    }
    out
}

/// Number of nonzeros removed from a row with `nnz` nonzeros.
///
/// `⌈fraction · nnz⌉`, with a small slack so products like `0.3 · 10` that
/// land a hair above an integer do not round up.
pub fn removal_count(fraction: f64, nnz: usize) -> usize {
    let raw = fraction * nnz as f64;
    ((raw - 1e-9).ceil().max(0.0) as usize).min(nnz)
}

/// Zeroes a random `⌈fraction · nnz(row)⌉` subset of each row's nonzeros.
pub fn perturb_features(
    features: &FeatureMatrix,
    remove_fraction: f64,
    seed: u64,
) -> Result<FeatureMatrix> {
    if !(0.0..=1.0).contains(&remove_fraction) {
        return Err(Error::InvalidParameter(format!(
            "remove_fraction {remove_fraction} outside [0, 1]"
        )));
    }
    let mut out = features.clone();
    if remove_fraction == 0.0 {
        return Ok(out);
    }
    let mut rng = rng_from_seed(seed);
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let nonzero: Vec<usize> = (0..row.len()).filter(|&c| row[c] != 0.0).collect();
        let k = removal_count(remove_fraction, nonzero.len());
        for c in sample_without_replacement(&nonzero, k, &mut rng) {
            row[c] = 0.0;
        }
    }
    Ok(out)
}
