//! Weighted graphs with typed edges and exact path-metric extraction.
//!
//! Edge kinds (internal / glued / augmented) are preserved through
//! construction for audit and reporting. Parallel edges collapse to the
//! minimum weight at build time, keeping the kind of the cheaper edge; the
//! Rips construction can emit both an internal and an augmented edge between
//! the same pair.
//!
//! All-pairs distances run one shortest-path computation per source in
//! parallel. Dense graphs (quotients glue a complete graph) use an
//! array-scan Dijkstra, sparse graphs a binary heap, and unit-weight graphs
//! plain breadth-first search. The cubic all-pairs oracle used for
//! cross-checks lives in [`crate::oracle`], deliberately separate from this
//! module.

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::par::{maybe_parallel_rows, sequential_rows};
use crate::space::Space;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Internal,
    Glued,
    Augmented,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    // keyed (u, v) with u < v; deterministic iteration order
    edges: BTreeMap<(u32, u32), (Dist, EdgeKind)>,
}

impl WeightedGraph {
    pub fn new(ids: Vec<String>) -> Result<WeightedGraph> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i as u32).is_some() {
                return Err(Error::BadGraph(format!("duplicate vertex id {id:?}")));
            }
        }
        Ok(WeightedGraph { ids, index, edges: BTreeMap::new() })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, Dist, EdgeKind)> + '_ {
        self.edges.iter().map(|(&(u, v), &(w, k))| (u, v, w, k))
    }

    pub fn weight(&self, u: u32, v: u32) -> Option<Dist> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.get(&key).map(|&(w, _)| w)
    }

    /// Adds an edge, collapsing parallel edges to the minimum weight. Ties
    /// keep the existing edge. Rejects self-loops and nonpositive weights.
    pub fn add_edge(&mut self, u: u32, v: u32, w: Dist, kind: EdgeKind) -> Result<()> {
        if u == v {
            return Err(Error::BadGraph(format!(
                "self-loop at {:?}",
                self.ids[u as usize]
            )));
        }
        if !(w.value() > 0.0) || w.is_infinite() {
            return Err(Error::BadGraph(format!(
                "edge weight must be positive and finite, got {w}"
            )));
        }
        let key = if u < v { (u, v) } else { (v, u) };
        match self.edges.get_mut(&key) {
            Some(existing) if existing.0 <= w => {}
            Some(existing) => *existing = (w, kind),
            None => {
                self.edges.insert(key, (w, kind));
            }
        }
        Ok(())
    }

    /// All-pairs path metric; runs per-source in parallel when enabled.
    pub fn path_metric(&self) -> Space {
        self.path_metric_impl(true)
    }

    /// Sequential reference path, kept for the benchmark suite and for
    /// comparing against the parallel path.
    pub fn path_metric_seq(&self) -> Space {
        self.path_metric_impl(false)
    }

    fn path_metric_impl(&self, parallel: bool) -> Space {
        let n = self.vertex_count();
        let rows = self.all_pairs_rows(parallel);
        let mut flat = vec![Dist::ZERO; n * n];
        // symmetrize with min: float rounding may differ per source direction
        for i in 0..n {
            for j in 0..n {
                flat[i * n + j] = rows[i][j].min(rows[j][i]);
            }
        }
        Space::from_flat_unchecked(self.ids.clone(), flat, BTreeMap::new())
            .expect("graph ids are unique")
    }

    fn all_pairs_rows(&self, parallel: bool) -> Vec<Vec<Dist>> {
        let n = self.vertex_count();
        if n == 0 {
            return Vec::new();
        }
        let dense = self.edge_count() * 4 >= n * n.saturating_sub(1);
        if dense {
            let mut w = vec![Dist::INF; n * n];
            for i in 0..n {
                w[i * n + i] = Dist::ZERO;
            }
            for (&(u, v), &(wt, _)) in &self.edges {
                let (u, v) = (u as usize, v as usize);
                w[u * n + v] = w[u * n + v].min(wt);
                w[v * n + u] = w[v * n + u].min(wt);
            }
            let run = |src: usize| dijkstra_dense(&w, n, src);
            if parallel {
                maybe_parallel_rows(n, run)
            } else {
                sequential_rows(n, run)
            }
        } else {
            let mut adj: Vec<Vec<(u32, Dist)>> = vec![Vec::new(); n];
            let mut unit = true;
            for (&(u, v), &(wt, _)) in &self.edges {
                adj[u as usize].push((v, wt));
                adj[v as usize].push((u, wt));
                unit &= wt == Dist::ONE;
            }
            let run = |src: usize| {
                if unit {
                    bfs_unit(&adj, n, src)
                } else {
                    dijkstra_sparse(&adj, n, src)
                }
            };
            if parallel {
                maybe_parallel_rows(n, run)
            } else {
                sequential_rows(n, run)
            }
        }
    }
}

fn dijkstra_dense(w: &[Dist], n: usize, src: usize) -> Vec<Dist> {
    let mut dist = vec![Dist::INF; n];
    let mut done = vec![false; n];
    dist[src] = Dist::ZERO;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = Dist::INF;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let du = dist[u];
        let row = &w[u * n..(u + 1) * n];
        for v in 0..n {
            if !done[v] {
                let cand = du + row[v];
                if cand < dist[v] {
                    dist[v] = cand;
                }
            }
        }
    }
    dist
}

fn dijkstra_sparse(adj: &[Vec<(u32, Dist)>], n: usize, src: usize) -> Vec<Dist> {
    let mut dist = vec![Dist::INF; n];
    dist[src] = Dist::ZERO;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Dist::ZERO, src as u32)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for &(v, w) in &adj[u as usize] {
            let cand = d + w;
            if cand < dist[v as usize] {
                dist[v as usize] = cand;
                heap.push(Reverse((cand, v)));
            }
        }
    }
    dist
}

fn bfs_unit(adj: &[Vec<(u32, Dist)>], n: usize, src: usize) -> Vec<Dist> {
    let mut dist = vec![Dist::INF; n];
    dist[src] = Dist::ZERO;
    let mut frontier = vec![src as u32];
    let mut level = 0.0f64;
    while !frontier.is_empty() {
        level += 1.0;
        let mut next = Vec::new();
        for &u in &frontier {
            for &(v, _) in &adj[u as usize] {
                if dist[v as usize].is_infinite() {
                    dist[v as usize] = Dist::from_raw(level);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Complete graph on a space: one internal edge per pair at finite positive
/// distance, weighted by that distance.
pub fn metric_to_complete_graph(space: &Space) -> WeightedGraph {
    let mut g = WeightedGraph::new(space.ids().to_vec()).expect("space ids are unique");
    let n = space.len() as u32;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(i, j);
            if d.is_finite() {
                g.add_edge(i, j, d, EdgeKind::Internal).expect("positive by metric contract");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let mut g = WeightedGraph::new(vec!["a".into(), "b".into()]).unwrap();
        g.add_edge(0, 1, Dist::from_raw(2.5), EdgeKind::Internal).unwrap();
        let s = g.path_metric();
        assert_eq!(s.dist(0, 1), Dist::from_raw(2.5));
    }

    #[test]
    fn disconnected_components_are_infinitely_far() {
        let g = WeightedGraph::new(vec!["a".into(), "b".into()]).unwrap();
        let s = g.path_metric();
        assert_eq!(s.dist(0, 1), Dist::INF);
    }

    #[test]
    fn parallel_edges_collapse_to_min() {
        let mut g = WeightedGraph::new(vec!["a".into(), "b".into()]).unwrap();
        g.add_edge(0, 1, Dist::from_raw(5.0), EdgeKind::Internal).unwrap();
        g.add_edge(0, 1, Dist::ONE, EdgeKind::Augmented).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), Some(Dist::ONE));
    }

    #[test]
    fn rejects_self_loops_and_zero_weights() {
        let mut g = WeightedGraph::new(vec!["a".into(), "b".into()]).unwrap();
        assert!(g.add_edge(0, 0, Dist::ONE, EdgeKind::Internal).is_err());
        assert!(g.add_edge(0, 1, Dist::ZERO, EdgeKind::Internal).is_err());
        assert!(g.add_edge(0, 1, Dist::INF, EdgeKind::Internal).is_err());
    }

    #[test]
    fn detour_beats_direct_edge() {
        let mut g =
            WeightedGraph::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        g.add_edge(0, 2, Dist::from_raw(10.0), EdgeKind::Internal).unwrap();
        g.add_edge(0, 1, Dist::from_raw(2.0), EdgeKind::Internal).unwrap();
        g.add_edge(1, 2, Dist::from_raw(3.0), EdgeKind::Internal).unwrap();
        let s = g.path_metric();
        assert_eq!(s.dist(0, 2), Dist::from_raw(5.0));
    }

    #[test]
    fn parallel_and_sequential_paths_agree() {
        let ids = (0..30).map(|i| i.to_string()).collect();
        let mut g = WeightedGraph::new(ids).unwrap();
        for i in 0..29u32 {
            g.add_edge(i, i + 1, Dist::from_raw(((i % 5) + 1) as f64), EdgeKind::Internal)
                .unwrap();
        }
        for i in 0..10u32 {
            g.add_edge(i, i + 17, Dist::from_raw(7.0), EdgeKind::Glued).unwrap();
        }
        let a = g.path_metric();
        let b = g.path_metric_seq();
        assert_eq!(a, b);
    }

    #[test]
    fn complete_graph_round_trip() {
        let ids = (0..5u32).map(|i| i.to_string()).collect();
        let s = Space::from_fn_unchecked(ids, |i, j| {
            Dist::from_raw((i as f64 - j as f64).abs())
        });
        let back = metric_to_complete_graph(&s).path_metric();
        assert_eq!(s, back);
    }
}
