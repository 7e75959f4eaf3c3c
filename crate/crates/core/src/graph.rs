//! Symmetric sparse adjacency in compressed-sparse-row form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{axpy, Matrix};

/// Undirected graph stored as a structurally symmetric CSR matrix.
///
/// Column indices are sorted and unique within each row. Raw graphs carry
/// weight 1.0 per edge; normalized graphs carry the propagation weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseGraph {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseGraph {
    /// Builds an unweighted undirected graph from an edge list.
    ///
    /// Edges are symmetrized, duplicates collapse to one entry and self-loops
    /// are dropped.
    pub fn from_edges(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
        for (src, dst) in edges {
            if src >= num_nodes || dst >= num_nodes {
                return Err(Error::DimensionMismatch(format!(
                    "edge ({src}, {dst}) references a node outside 0..{num_nodes}"
                )));
            }
            if src == dst {
                continue;
            }
            adjacency[src].push(dst);
            adjacency[dst].push(src);
        }
        let mut row_offsets = Vec::with_capacity(num_nodes + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for mut neighbors in adjacency {
            neighbors.sort_unstable();
            neighbors.dedup();
            col_indices.extend(neighbors);
            row_offsets.push(col_indices.len());
        }
        let values = vec![1.0; col_indices.len()];
        Ok(Self {
            num_nodes,
            row_offsets,
            col_indices,
            values,
        })
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of stored entries (each undirected edge counts twice).
    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    /// Number of undirected edges, self-loops counted once.
    pub fn num_undirected_edges(&self) -> usize {
        let loops = (0..self.num_nodes)
            .filter(|&i| self.neighbors(i).any(|(j, _)| j == i))
            .count();
        (self.nnz() - loops) / 2 + loops
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(column, value)` pairs of row `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.neighbors(i).map(|(_, v)| v).sum()
    }

    /// Stored value at `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[span.clone()].binary_search(&j) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.num_nodes).all(|i| self.neighbors(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Dense `N×N` copy; intended for tests and small fixtures.
    pub fn to_dense(&self) -> Matrix {
        let mut out = Matrix::zeros(self.num_nodes, self.num_nodes);
        for i in 0..self.num_nodes {
            for (j, v) in self.neighbors(i) {
                out.set(i, j, v);
            }
        }
        out
    }

    /// Sparse-dense product `self · rhs`.
    pub fn spmm(&self, rhs: &Matrix) -> Result<Matrix> {
        if rhs.rows() != self.num_nodes {
            return Err(Error::DimensionMismatch(format!(
                "spmm with {0}x{0} graph and {1}x{2} matrix",
                self.num_nodes,
                rhs.rows(),
                rhs.cols()
            )));
        }
        let mut out = Matrix::zeros(self.num_nodes, rhs.cols());
        for i in 0..self.num_nodes {
            let out_row = out.row_mut(i);
            for (j, v) in self.neighbors(i) {
                axpy(v, rhs.row(j), out_row);
            }
        }
        Ok(out)
    }

    fn with_self_loops(&self) -> Self {
        let mut row_offsets = Vec::with_capacity(self.num_nodes + 1);
        let mut col_indices = Vec::with_capacity(self.nnz() + self.num_nodes);
        let mut values = Vec::with_capacity(self.nnz() + self.num_nodes);
        row_offsets.push(0);
        for i in 0..self.num_nodes {
            let mut placed = false;
            for (j, v) in self.neighbors(i) {
                if !placed && j >= i {
                    if j == i {
                        col_indices.push(i);
                        values.push(v + 1.0);
                        placed = true;
                        continue;
                    }
                    col_indices.push(i);
                    values.push(1.0);
                    placed = true;
                }
                col_indices.push(j);
                values.push(v);
            }
            if !placed {
                col_indices.push(i);
                values.push(1.0);
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            num_nodes: self.num_nodes,
            row_offsets,
            col_indices,
            values,
        }
    }
}

/// Symmetric degree normalization `D^{-1/2} A D^{-1/2}`.
///
/// With `add_self_loops` the identity is added first, giving
/// `D̂^{-1/2} (A + I) D̂^{-1/2}`. Nodes of degree zero get a zero inverse
/// square-root degree, so their rows and columns stay zero.
pub fn normalize_adjacency(graph: &SparseGraph, add_self_loops: bool) -> SparseGraph {
    let base = if add_self_loops {
        graph.with_self_loops()
    } else {
        graph.clone()
    };
    let inv_sqrt_degree: Vec<f64> = (0..base.num_nodes)
        .map(|i| {
            let d = base.degree(i);
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut values = Vec::with_capacity(base.nnz());
    for i in 0..base.num_nodes {
        for (j, v) in base.neighbors(i) {
            // same operand order for (i,j) and (j,i) so symmetry is exact
            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
            values.push(v * (inv_sqrt_degree[lo] * inv_sqrt_degree[hi]));
        }
    }
    SparseGraph { values, ..base }
}
