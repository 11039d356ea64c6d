//! Seeded random instance families for the verification scenarios.
//!
//! All generators draw from a caller-supplied ChaCha stream, so a (seed,
//! trial index) pair pins the instance exactly across runs and platforms.
//! Metrics are integral throughout: the checks they feed run on the exact
//! integer path.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::Dist;
use crate::graph::{EdgeKind, WeightedGraph};
use crate::map::MappedPair;
use crate::space::{Space, SpaceRef};

pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(trial))
}

/// Connected integer metric space: path metric of a random spanning tree
/// plus extra edges, weights in 1..=max_weight, optionally clamped (clamping
/// a metric at c keeps it a metric).
pub fn random_metric_space(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_weight: u32,
    clamp: Option<f64>,
) -> SpaceRef {
    assert!(n >= 1);
    let ids = (0..n).map(|i| format!("p{i}")).collect();
    let mut graph = WeightedGraph::new(ids).expect("generated ids are unique");
    for i in 1..n as u32 {
        let parent = rng.gen_range(0..i);
        let w = rng.gen_range(1..=max_weight) as f64;
        graph.add_edge(parent, i, Dist::from_raw(w), EdgeKind::Internal).unwrap();
    }
    let extras = rng.gen_range(0..=n);
    for _ in 0..extras {
        let a = rng.gen_range(0..n as u32);
        let b = rng.gen_range(0..n as u32);
        if a != b {
            let w = rng.gen_range(1..=max_weight) as f64;
            graph.add_edge(a, b, Dist::from_raw(w), EdgeKind::Internal).unwrap();
        }
    }
    let metric = graph.path_metric();
    let space = match clamp {
        None => metric,
        Some(c) => {
            let flat: Vec<Dist> = metric
                .matrix()
                .iter()
                .map(|&d| d.min(Dist::from_raw(c)))
                .collect();
            Space::from_flat_unchecked(metric.ids().to_vec(), flat, Default::default())
                .expect("clamp keeps ids")
        }
    };
    Arc::new(space)
}

/// Uniformly random assignment source -> target.
pub fn random_map(rng: &mut ChaCha8Rng, source: &SpaceRef, target: &SpaceRef) -> MappedPair {
    let map = (0..source.len())
        .map(|_| rng.gen_range(0..target.len() as u32))
        .collect();
    MappedPair::new(source.clone(), target.clone(), map).expect("random map is total")
}

/// A parallel pair A -> X for the coequaliser comparison: |X| <= 20,
/// |A| <= 10, integer distances <= 20.
pub fn coeq_instance(seed: u64, trial: u64) -> (MappedPair, MappedPair) {
    let mut rng = rng_for(seed, trial);
    let nx = rng.gen_range(2..=20);
    let na = rng.gen_range(1..=10);
    let x = random_metric_space(&mut rng, nx, 7, Some(20.0));
    let a = random_metric_space(&mut rng, na, 5, Some(20.0));
    let f = random_map(&mut rng, &a, &x);
    let g = random_map(&mut rng, &a, &x);
    (f, g)
}

/// A coarsely surjective instance for the Rips constant checks, built as a
/// cluster quotient: Y's image points are representatives of a partition of
/// X carrying the restricted metric, optionally fattened by pendant points
/// within distance <= 2 of the image (so the surjectivity radius is <= 2).
pub struct RipsInstance {
    pub x: SpaceRef,
    pub y: SpaceRef,
    pub f: MappedPair,
    pub radius: Dist,
}

pub fn rips_instance(seed: u64, trial: u64) -> RipsInstance {
    let mut rng = rng_for(seed, trial);
    let nx = rng.gen_range(4..=40);
    let x = random_metric_space(&mut rng, nx, 9, None);

    let k = rng.gen_range(1..=nx.min(8));
    let reps: Vec<u32> = {
        let mut picked = Vec::new();
        while picked.len() < k {
            let c = rng.gen_range(0..nx as u32);
            if !picked.contains(&c) {
                picked.push(c);
            }
        }
        picked.sort();
        picked
    };
    // nearest representative, ties to the earliest
    let cluster: Vec<usize> = (0..nx as u32)
        .map(|i| {
            let mut best = 0usize;
            for (c, &r) in reps.iter().enumerate() {
                if x.dist(i, r) < x.dist(i, reps[best]) {
                    best = c;
                }
            }
            best
        })
        .collect();

    let pendants = rng.gen_range(0..=6usize);
    let mut ids: Vec<String> = (0..k).map(|c| format!("y{c}")).collect();
    let mut graph_edges: Vec<(u32, u32, f64)> = Vec::new();
    for c in 0..k as u32 {
        for c2 in (c + 1)..k as u32 {
            let d = x.dist(reps[c as usize], reps[c2 as usize]);
            if d.is_finite() {
                graph_edges.push((c, c2, d.value()));
            }
        }
    }
    for p in 0..pendants {
        let attach = rng.gen_range(0..k as u32);
        let w = rng.gen_range(1..=2) as f64;
        ids.push(format!("n{p}"));
        graph_edges.push((attach, (k + p) as u32, w));
    }
    let mut graph = WeightedGraph::new(ids).expect("generated ids are unique");
    for (u, v, w) in graph_edges {
        graph.add_edge(u, v, Dist::from_raw(w), EdgeKind::Internal).unwrap();
    }
    let y = Arc::new(graph.path_metric());
    let f_map: Vec<u32> = cluster.iter().map(|&c| c as u32).collect();
    let f = MappedPair::new(x.clone(), y.clone(), f_map).expect("cluster map is total");
    let radius = f.surjectivity_radius();
    RipsInstance { x, y, f, radius }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_spaces_satisfy_the_metric_contract() {
        for trial in 0..30 {
            let mut rng = rng_for(7, trial);
            let s = random_metric_space(&mut rng, 12, 9, Some(20.0));
            s.verify_metric().unwrap();
            assert!(s.is_integral());
            assert!(s.max_finite_distance() <= Dist::from_raw(20.0));
        }
    }

    #[test]
    fn instances_are_reproducible() {
        let (f1, g1) = coeq_instance(11, 3);
        let (f2, g2) = coeq_instance(11, 3);
        assert_eq!(f1.map(), f2.map());
        assert_eq!(g1.map(), g2.map());
        assert_eq!(**f1.source(), **f2.source());
    }

    #[test]
    fn rips_instances_have_small_radius() {
        for trial in 0..20 {
            let inst = rips_instance(5, trial);
            assert!(inst.radius <= Dist::from_raw(2.0), "radius {}", inst.radius);
            assert!(inst.x.is_integral() && inst.y.is_integral());
        }
    }
}
