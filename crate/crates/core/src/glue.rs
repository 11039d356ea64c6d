//! Coarse gluing and coequaliser spaces.
//!
//! `X ⊔_A Y` glues two spaces along a pair of maps out of A with unit edges;
//! `Coeq(f, g)` glues X to itself. [`double_glue_comparison`] builds the
//! double gluing on two copies of X together with the comparison maps r and s
//! between it and the coequaliser, and verifies the four exact properties the
//! construction promises: r is 1-Lipschitz, s is 2-Lipschitz, r∘s is the
//! identity, and s∘r is 1-close to the identity.

use serde::Serialize;

use std::sync::Arc;

use crate::dist::{le_with, Dist};
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, WeightedGraph};
use crate::map::{same_space, MappedPair};
use crate::space::SpaceRef;

#[derive(Debug)]
pub struct Gluing {
    pub space: SpaceRef,
    pub graph: WeightedGraph,
    /// 1-Lipschitz inclusion of f's target.
    pub left: MappedPair,
    /// 1-Lipschitz inclusion of g's target.
    pub right: MappedPair,
}

/// Coarse gluing X ⊔_A Y along f: A -> X and g: A -> Y.
pub fn coarse_glue(f: &MappedPair, g: &MappedPair) -> Result<Gluing> {
    if !same_space(f.source(), g.source()) {
        return Err(Error::SpaceMismatch("gluing maps must share their source".into()));
    }
    let x = f.target();
    let y = g.target();
    let nx = x.len() as u32;
    let ny = y.len() as u32;
    let mut ids = Vec::with_capacity((nx + ny) as usize);
    for i in 0..nx {
        ids.push(format!("L:{}", x.id(i)));
    }
    for j in 0..ny {
        ids.push(format!("R:{}", y.id(j)));
    }
    let mut graph = WeightedGraph::new(ids)?;
    add_internal_edges(&mut graph, x, 0);
    add_internal_edges(&mut graph, y, nx);
    for a in 0..f.source().len() as u32 {
        let u = f.apply(a);
        let v = g.apply(a) + nx;
        // u is in the X block, v in the Y block, never equal
        graph.add_edge(u, v, Dist::ONE, EdgeKind::Glued)?;
    }
    let space = Arc::new(graph.path_metric());
    let left = MappedPair::new(x.clone(), space.clone(), (0..nx).collect())?;
    let right = MappedPair::new(y.clone(), space.clone(), (nx..nx + ny).collect())?;
    Ok(Gluing { space, graph, left, right })
}

fn add_internal_edges(graph: &mut WeightedGraph, space: &SpaceRef, offset: u32) {
    let n = space.len() as u32;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(i, j);
            if d.is_finite() {
                graph
                    .add_edge(offset + i, offset + j, d, EdgeKind::Internal)
                    .expect("metric distances are positive");
            }
        }
    }
}

#[derive(Debug)]
pub struct Coequalizer {
    pub space: SpaceRef,
    pub graph: WeightedGraph,
    /// The underlying identity X -> Coeq(f, g); 1-Lipschitz.
    pub q: MappedPair,
}

/// Coeq(f, g) for a parallel pair f, g: A -> X: the space X glued to itself
/// with a unit edge from fa to ga for each a. Glued pairs with fa = ga would
/// be self-loops and are dropped; they cannot affect the path metric.
pub fn coeq_space(f: &MappedPair, g: &MappedPair) -> Result<Coequalizer> {
    if !same_space(f.source(), g.source()) || !same_space(f.target(), g.target()) {
        return Err(Error::SpaceMismatch("coequaliser needs a parallel pair".into()));
    }
    let x = f.target();
    let mut graph = WeightedGraph::new(x.ids().to_vec())?;
    add_internal_edges(&mut graph, x, 0);
    for a in 0..f.source().len() as u32 {
        let (u, v) = (f.apply(a), g.apply(a));
        if u != v {
            graph.add_edge(u, v, Dist::ONE, EdgeKind::Glued)?;
        }
    }
    let space = Arc::new(graph.path_metric());
    let q = MappedPair::underlying_identity(x.clone(), space.clone())?;
    Ok(Coequalizer { space, graph, q })
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzCheck {
    pub claimed: f64,
    pub holds: bool,
    /// Worst pair and its excess over the claimed bound, when violated.
    pub worst: Option<(String, String, f64)>,
}

/// Report of the coequaliser comparison through the double gluing
/// X ⊔_{A⊔X} X on vertex set X × {0,1}.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleGlueReport {
    pub r_one_lipschitz: LipschitzCheck,
    pub s_two_lipschitz: LipschitzCheck,
    pub rs_is_identity: bool,
    /// sup distance between s∘r and the identity; must be <= 1.
    pub sr_closeness: Dist,
}

impl DoubleGlueReport {
    pub fn all_pass(&self) -> bool {
        self.r_one_lipschitz.holds
            && self.s_two_lipschitz.holds
            && self.rs_is_identity
            && self.sr_closeness <= Dist::ONE
    }
}

/// Builds the double gluing (glued edges ((x,0),(x,1)) for all x and
/// ((fa,0),(ga,1)) for all a), the projection r onto Coeq(f, g), and the
/// section s: x -> (x,0), then verifies the four comparison properties.
pub fn double_glue_comparison(f: &MappedPair, g: &MappedPair) -> Result<DoubleGlueReport> {
    let coeq = coeq_space(f, g)?;
    let x = f.target();
    let n = x.len() as u32;
    let mut ids = Vec::with_capacity(2 * n as usize);
    for copy in 0..2 {
        for i in 0..n {
            ids.push(format!("{}@{}", x.id(i), copy));
        }
    }
    let mut graph = WeightedGraph::new(ids)?;
    add_internal_edges(&mut graph, x, 0);
    add_internal_edges(&mut graph, x, n);
    for i in 0..n {
        graph.add_edge(i, n + i, Dist::ONE, EdgeKind::Glued)?;
    }
    for a in 0..f.source().len() as u32 {
        let (u, v) = (f.apply(a), n + g.apply(a));
        if u != v {
            graph.add_edge(u, v, Dist::ONE, EdgeKind::Glued)?;
        }
    }
    let dg = Arc::new(graph.path_metric());
    let tol = dg.tol().max(coeq.space.tol());

    // r: (x, i) -> x
    let r_map: Vec<u32> = (0..2 * n).map(|p| p % n).collect();
    // s: x -> (x, 0)
    let s_map: Vec<u32> = (0..n).collect();

    let mut r_worst: Option<(u32, u32, f64)> = None;
    for p in 0..2 * n {
        for q in (p + 1)..2 * n {
            let d = dg.dist(p, q);
            if !d.is_finite() {
                continue;
            }
            let dr = coeq.space.dist(r_map[p as usize], r_map[q as usize]);
            let excess = dr.value() - d.value();
            if excess > tol && r_worst.map_or(true, |(_, _, e)| excess > e) {
                r_worst = Some((p, q, excess));
            }
        }
    }
    let mut s_worst: Option<(u32, u32, f64)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = coeq.space.dist(i, j);
            if !d.is_finite() {
                continue;
            }
            let ds = dg.dist(s_map[i as usize], s_map[j as usize]);
            let excess = ds.value() - 2.0 * d.value();
            if excess > tol && s_worst.map_or(true, |(_, _, e)| excess > e) {
                s_worst = Some((i, j, excess));
            }
        }
    }
    let rs_is_identity = (0..n).all(|i| r_map[s_map[i as usize] as usize] == i);
    let mut sr_closeness = Dist::ZERO;
    for p in 0..2 * n {
        let sr = s_map[r_map[p as usize] as usize];
        sr_closeness = sr_closeness.max(dg.dist(p, sr));
    }
    debug_assert!(le_with(sr_closeness, Dist::ONE, tol));

    Ok(DoubleGlueReport {
        r_one_lipschitz: LipschitzCheck {
            claimed: 1.0,
            holds: r_worst.is_none(),
            worst: r_worst.map(|(p, q, e)| (dg.id(p).to_string(), dg.id(q).to_string(), e)),
        },
        s_two_lipschitz: LipschitzCheck {
            claimed: 2.0,
            holds: s_worst.is_none(),
            worst: s_worst.map(|(i, j, e)| (x.id(i).to_string(), x.id(j).to_string(), e)),
        },
        rs_is_identity,
        sr_closeness,
    })
}
