//! Cubic all-pairs shortest-path oracle.
//!
//! Kept independent of the per-source machinery in [`crate::graph`] so the
//! two routes cross-validate each other. Intended for graphs up to a few
//! hundred vertices.

use crate::dist::Dist;
use crate::graph::WeightedGraph;

/// Floyd–Warshall over the collapsed edge set; row-major n*n matrix.
pub fn floyd_warshall(g: &WeightedGraph) -> Vec<Dist> {
    let n = g.vertex_count();
    let mut d = vec![Dist::INF; n * n];
    for i in 0..n {
        d[i * n + i] = Dist::ZERO;
    }
    for (u, v, w, _) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        d[u * n + v] = d[u * n + v].min(w);
        d[v * n + u] = d[v * n + u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    d
}

/// Max absolute gap between the oracle and the per-source path metric.
pub fn max_gap_vs_path_metric(g: &WeightedGraph) -> f64 {
    let n = g.vertex_count();
    let oracle = floyd_warshall(g);
    let fast = g.path_metric();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = oracle[i * n + j];
            let b = fast.dist(i as u32, j as u32);
            if a != b {
                worst = worst.max((a.value() - b.value()).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind;

    #[test]
    fn oracle_matches_path_metric_on_a_cycle() {
        let ids = (0..12).map(|i| i.to_string()).collect();
        let mut g = WeightedGraph::new(ids).unwrap();
        for i in 0..12u32 {
            g.add_edge(i, (i + 1) % 12, Dist::from_raw((i % 3 + 1) as f64), EdgeKind::Internal)
                .unwrap();
        }
        assert_eq!(max_gap_vs_path_metric(&g), 0.0);
    }
}
