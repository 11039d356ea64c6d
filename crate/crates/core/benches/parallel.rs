//! Parallel vs sequential comparison on the dominant workloads: all-pairs
//! path metrics over dense quotient graphs and sparse Cayley graphs, and a
//! kernel stability sweep.
//!
//! With the default `parallel` feature the library paths fan out over rayon;
//! `*_seq` pins the sequential reference. Building with
//! `--no-default-features` makes both identical.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use coarse_core::dist::Dist;
use coarse_core::filtration::kernel_stability_profile;
use coarse_core::gallery::{comb, comb_retraction, heisenberg};
use coarse_core::graph::{metric_to_complete_graph, EdgeKind, WeightedGraph};

fn dense_quotient_graph(n_max: i64) -> WeightedGraph {
    let c = comb(n_max).expect("valid truncation");
    let mut g = metric_to_complete_graph(&c.x);
    // glue unit edges across taxicab-close pairs, as the quotient does
    let n = c.y.len() as u32;
    for i in 0..n {
        for j in (i + 1)..n {
            if c.y.dist(i, j) <= Dist::from_raw(2.0) {
                g.add_edge(i, j, Dist::ONE, EdgeKind::Glued).unwrap();
            }
        }
    }
    g
}

fn bench_dense_path_metric(c: &mut Criterion) {
    let mut group = c.benchmark_group("path_metric/dense_quotient");
    group.sample_size(10);
    for n_max in [6, 8] {
        let g = dense_quotient_graph(n_max);
        group.bench_with_input(BenchmarkId::new("parallel", n_max), &g, |b, g| {
            b.iter(|| black_box(g.path_metric()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n_max), &g, |b, g| {
            b.iter(|| black_box(g.path_metric_seq()))
        });
    }
    group.finish();
}

fn bench_sparse_cayley(c: &mut Criterion) {
    let mut group = c.benchmark_group("path_metric/sparse_cayley");
    group.sample_size(10);
    let h = heisenberg(5).expect("valid radius");
    let mut g = WeightedGraph::new(h.e_ball.ids().to_vec()).unwrap();
    let n = h.e_ball.len() as u32;
    for i in 0..n {
        for j in (i + 1)..n {
            if h.e_ball.dist(i, j) == Dist::ONE {
                g.add_edge(i, j, Dist::ONE, EdgeKind::Internal).unwrap();
            }
        }
    }
    group.bench_function("parallel", |b| b.iter(|| black_box(g.path_metric())));
    group.bench_function("sequential", |b| b.iter(|| black_box(g.path_metric_seq())));
    group.finish();
}

fn bench_kernel_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_profile/comb_retraction");
    group.sample_size(10);
    let cr = comb_retraction(7).expect("valid truncation");
    let grid = [Dist::from_raw(2.0), Dist::from_raw(3.0)];
    group.bench_function("sweep", |b| {
        b.iter(|| {
            black_box(
                kernel_stability_profile(&cr.f, &grid, Some(&cr.comb.interior), None).unwrap(),
            )
        })
    });
    group.finish();
}

criterion_group!(benches, bench_dense_path_metric, bench_sparse_cayley, bench_kernel_sweep);
criterion_main!(benches);
