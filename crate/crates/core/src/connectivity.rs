//! Solution-space connectivity of a relation: the reconfiguration graph
//! (tuples adjacent when they differ in one coordinate) and the
//! prefix/suffix bipartite graphs whose connectivity defines
//! BKLM-connectedness.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{FiniteRelation, Tuple};

/// Connectivity of an undirected graph on `0..nodes`. Zero nodes is
/// connected.
pub fn graph_is_connected(nodes: usize, edges: &[(usize, usize)]) -> bool {
    if nodes == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); nodes];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; nodes];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                reached += 1;
                stack.push(y);
            }
        }
    }
    reached == nodes
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReconfGraph {
    /// The tuples of the relation, sorted.
    pub nodes: Vec<Tuple>,
    /// Index pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl ReconfGraph {
    pub fn is_connected(&self) -> bool {
        graph_is_connected(self.nodes.len(), &self.edges)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph reconfiguration {\n");
        for (i, t) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label(t));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -- n{b};");
        }
        out.push_str("}\n");
        out
    }
}

fn label(t: &[usize]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Builds the reconfiguration graph. Neighbours are found by substituting
/// each coordinate with every other domain value and looking the result up.
pub fn reconfiguration_graph(rel: &FiniteRelation) -> ReconfGraph {
    let nodes = rel.tuples().to_vec();
    let mut edges = Vec::new();
    let mut buf = Vec::with_capacity(rel.arity());
    for (i, t) in nodes.iter().enumerate() {
        for pos in 0..rel.arity() {
            for val in t[pos] + 1..rel.domain_size() {
                buf.clear();
                buf.extend_from_slice(t);
                buf[pos] = val;
                if let Some(j) = rel.index_of(&buf) {
                    edges.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    edges.sort_unstable();
    ReconfGraph { nodes, edges }
}

/// Whether every tuple can be reached from every other by changing one
/// coordinate at a time inside the relation. At most one tuple is vacuously
/// reconfigurable.
pub fn is_reconfigurable(rel: &FiniteRelation) -> bool {
    reconfiguration_graph(rel).is_connected()
}

/// The bipartite prefix/suffix graph `G^R_i` for a split index `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BklmGraph {
    pub split: usize,
    pub left: Vec<Tuple>,
    pub right: Vec<Tuple>,
    /// `(left index, right index)` pairs, one per tuple of the relation.
    pub edges: Vec<(usize, usize)>,
}

impl BklmGraph {
    pub fn is_connected(&self) -> bool {
        let shift = self.left.len();
        let edges: Vec<_> = self.edges.iter().map(|&(a, b)| (a, b + shift)).collect();
        graph_is_connected(self.left.len() + self.right.len(), &edges)
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph bklm_{} {{\n", self.split);
        for (i, t) in self.left.iter().enumerate() {
            let _ = writeln!(out, "  l{i} [label=\"{}\"];", label(t));
        }
        for (i, t) in self.right.iter().enumerate() {
            let _ = writeln!(out, "  r{i} [label=\"{}\"];", label(t));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  l{a} -- r{b};");
        }
        out.push_str("}\n");
        out
    }

    /// Line graph of this bipartite graph: nodes are the edges (tuples of the
    /// relation, in tuple order), adjacent when they share an endpoint.
    pub fn line_graph_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                let (a, b) = (self.edges[i], self.edges[j]);
                if a.0 == b.0 || a.1 == b.1 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn bklm_graph(rel: &FiniteRelation, split: usize) -> Result<BklmGraph> {
    let r = rel.arity();
    if split == 0 || split >= r {
        return Err(Error::param(format!("split index {split} outside [1, {}]", r.saturating_sub(1))));
    }
    let mut left: BTreeMap<&[usize], usize> = BTreeMap::new();
    let mut right: BTreeMap<&[usize], usize> = BTreeMap::new();
    for t in rel.tuples() {
        left.insert(&t[..split], 0);
        right.insert(&t[split..], 0);
    }
    for (i, v) in left.values_mut().enumerate() {
        *v = i;
    }
    for (i, v) in right.values_mut().enumerate() {
        *v = i;
    }
    let edges = rel.tuples().iter().map(|t| (left[&t[..split]], right[&t[split..]])).collect();
    Ok(BklmGraph {
        split,
        left: left.keys().map(|k| k.to_vec()).collect(),
        right: right.keys().map(|k| k.to_vec()).collect(),
        edges,
    })
}

/// Per-split verdicts for BKLM-connectedness.
#[derive(Clone, Debug, Serialize)]
pub struct BklmReport {
    /// True iff every split graph is connected.
    pub connected: bool,
    pub per_split: Vec<bool>,
    pub graphs: Vec<BklmGraph>,
}

impl BklmReport {
    /// The weaker reading: some split graph is connected.
    pub fn connected_for_some_split(&self) -> bool {
        self.per_split.iter().any(|&b| b)
    }
}

/// Builds `G^R_i` for every split `1 ≤ i < r` and reports whether all are
/// connected. Arity-1 relations have no splits and are rejected.
pub fn is_bklm_connected(rel: &FiniteRelation) -> Result<BklmReport> {
    if rel.arity() < 2 {
        return Err(Error::param("BKLM-connectedness needs arity at least 2"));
    }
    let graphs = (1..rel.arity()).map(|i| bklm_graph(rel, i)).collect::<Result<Vec<_>>>()?;
    let per_split: Vec<bool> = graphs.iter().map(BklmGraph::is_connected).collect();
    Ok(BklmReport { connected: per_split.iter().all(|&b| b), per_split, graphs })
}
