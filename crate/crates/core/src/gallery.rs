//! Deterministic generators for the example spaces and maps, parameterized
//! by truncation size.
//!
//! Every generator is pure: equal parameters regenerate bit-identical
//! spaces, and larger parameters extend smaller ones (point ids are stable
//! across truncation sizes). Infinite examples come with a declared interior
//! window; quantities certified by sweeps are only claimed on that window.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, WeightedGraph};
use crate::map::MappedPair;
use crate::space::{Space, SpaceRef};

/// A parameterized family of growing truncations.
#[derive(Debug, Clone)]
pub struct TruncationFamily {
    pub kind: FamilyKind,
    pub param_name: &'static str,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Comb,
    CombRetract,
    Heisenberg,
    CubesSquares,
    LatticeQuotient { k: usize, m: usize },
}

impl TruncationFamily {
    pub fn new(kind: FamilyKind, values: Vec<i64>) -> TruncationFamily {
        let param_name = match kind {
            FamilyKind::Comb | FamilyKind::CombRetract => "n_max",
            FamilyKind::Heisenberg => "radius",
            FamilyKind::CubesSquares => "window",
            FamilyKind::LatticeQuotient { .. } => "radius",
        };
        TruncationFamily { kind, param_name, values }
    }
}

// ---------------------------------------------------------------------------
// Comb
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct Tooth {
    pub stage: i64,
    /// 1-based index within the stage; the gap to the next tooth equals it.
    pub index: i64,
    pub x: i64,
    pub height: i64,
}

/// The comb: a ray with stages of progressively taller and sparser teeth.
/// `x` carries the graph path metric, `y` the taxicab metric on the same
/// vertex set, and `f` the underlying identity between them.
pub struct Comb {
    pub x: SpaceRef,
    pub y: SpaceRef,
    pub f: MappedPair,
    pub teeth: Vec<Tooth>,
    pub ray_end: i64,
    pub n_max: i64,
    /// Interior window: everything except the last stage's teeth.
    pub interior: Vec<bool>,
    points: Vec<(i64, i64)>,
    lookup: HashMap<(i64, i64), u32>,
}

pub fn comb(n_max: i64) -> Result<Comb> {
    if n_max < 1 {
        return Err(Error::BadParameter("comb needs n_max >= 1".into()));
    }
    let mut teeth = Vec::new();
    let mut pos = 0i64;
    for stage in 1..=n_max {
        for j in 1..=stage {
            teeth.push(Tooth { stage, index: j, x: pos, height: stage });
            pos += j;
        }
    }
    let ray_end = pos;

    let mut points: Vec<(i64, i64)> = (0..=ray_end).map(|x| (x, 0)).collect();
    for t in &teeth {
        for y in 1..=t.height {
            points.push((t.x, y));
        }
    }
    points.sort();
    let lookup: HashMap<(i64, i64), u32> =
        points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let ids: Vec<String> = points.iter().map(|&(x, y)| format!("({x},{y})")).collect();

    let mut graph = WeightedGraph::new(ids.clone())?;
    for (i, &(x, y)) in points.iter().enumerate() {
        if let Some(&j) = lookup.get(&(x, y + 1)) {
            graph.add_edge(i as u32, j, Dist::ONE, EdgeKind::Internal)?;
        }
        if y == 0 {
            if let Some(&j) = lookup.get(&(x + 1, 0)) {
                graph.add_edge(i as u32, j, Dist::ONE, EdgeKind::Internal)?;
            }
        }
    }
    let x_space = Arc::new(graph.path_metric());
    let y_space = Arc::new(Space::from_fn_unchecked(ids, |p, q| {
        let (ax, ay) = points[p];
        let (bx, by) = points[q];
        Dist::from_raw(((ax - bx).abs() + (ay - by).abs()) as f64)
    }));
    let f = MappedPair::underlying_identity(x_space.clone(), y_space.clone())?;

    let interior: Vec<bool> = points
        .iter()
        .map(|&(x, y)| y == 0 || teeth.iter().any(|t| t.x == x && t.stage < n_max))
        .collect();

    Ok(Comb { x: x_space, y: y_space, f, teeth, ray_end, n_max, interior, points, lookup })
}

impl Comb {
    pub fn point_index(&self, x: i64, y: i64) -> Option<u32> {
        self.lookup.get(&(x, y)).copied()
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    /// Tips of consecutive stage-n teeth at horizontal gap sigma + 1, at
    /// height n. The gap between teeth j and j + 1 equals j, so the pair
    /// exists exactly when sigma + 2 <= n; otherwise there is no such pair
    /// at that stage.
    pub fn locate_pair(&self, sigma: i64, n: i64) -> Option<(u32, u32)> {
        if sigma < 0 || n > self.n_max {
            return None;
        }
        let j = sigma + 1;
        if j + 1 > n {
            return None;
        }
        let tooth = self.teeth.iter().find(|t| t.stage == n && t.index == j)?;
        let v = self.point_index(tooth.x, n)?;
        let v2 = self.point_index(tooth.x + sigma + 1, n)?;
        Some((v, v2))
    }
}

/// The comb together with the 1-Lipschitz retraction (x, y) -> x onto the
/// truncated ray, and the isometric section x -> (x, 0).
pub struct CombRetract {
    pub comb: Comb,
    pub ray: SpaceRef,
    pub f: MappedPair,
    pub s: MappedPair,
}

pub fn comb_retraction(n_max: i64) -> Result<CombRetract> {
    let comb = comb(n_max)?;
    let ids: Vec<String> = (0..=comb.ray_end).map(|x| x.to_string()).collect();
    let ray = Arc::new(Space::from_fn_unchecked(ids, |i, j| {
        Dist::from_raw((i as f64 - j as f64).abs())
    }));
    let f_map: Vec<u32> = comb.points.iter().map(|&(x, _)| x as u32).collect();
    let f = MappedPair::new(comb.x.clone(), ray.clone(), f_map)?;
    let s_map: Vec<u32> = (0..=comb.ray_end)
        .map(|x| comb.point_index(x, 0).expect("ray point exists"))
        .collect();
    let s = MappedPair::new(ray.clone(), comb.x.clone(), s_map)?;
    Ok(CombRetract { comb, ray, f, s })
}

// ---------------------------------------------------------------------------
// Heisenberg
// ---------------------------------------------------------------------------

type Triple = [i64; 3];

/// (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')
pub fn heisenberg_mul(a: Triple, b: Triple) -> Triple {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]]
}

const H_GENS: [Triple; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

fn heisenberg_enumerate(radius: i64) -> HashMap<Triple, i64> {
    let mut dist: HashMap<Triple, i64> = HashMap::new();
    dist.insert([0, 0, 0], 0);
    let mut frontier = vec![[0i64, 0, 0]];
    for level in 1..=radius {
        let mut next = Vec::new();
        for &g in &frontier {
            for s in H_GENS {
                let h = heisenberg_mul(g, s);
                if !dist.contains_key(&h) {
                    dist.insert(h, level);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Word-metric ball of the integer Heisenberg group with generators a, b, z,
/// its projection to the rank-two lattice ball, and the kernel-filtration
/// input map between them. Distances are in-ball path metrics.
pub struct Heisenberg {
    pub e_ball: SpaceRef,
    pub g_ball: SpaceRef,
    pub f: MappedPair,
    pub elements: Vec<Triple>,
    /// Exact word norms (a geodesic from the identity stays inside the ball).
    pub norms: Vec<i64>,
    pub radius: i64,
}

pub fn heisenberg(radius: i64) -> Result<Heisenberg> {
    if radius < 1 {
        return Err(Error::BadParameter("heisenberg needs radius >= 1".into()));
    }
    let dist = heisenberg_enumerate(radius);
    let mut elements: Vec<Triple> = dist.keys().copied().collect();
    elements.sort();
    let norms: Vec<i64> = elements.iter().map(|e| dist[e]).collect();
    let lookup: HashMap<Triple, u32> =
        elements.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let ids: Vec<String> = elements.iter().map(|e| format!("({},{},{})", e[0], e[1], e[2])).collect();

    let mut graph = WeightedGraph::new(ids)?;
    for (i, &g) in elements.iter().enumerate() {
        for s in H_GENS {
            let h = heisenberg_mul(g, s);
            if let Some(&j) = lookup.get(&h) {
                if (i as u32) < j {
                    graph.add_edge(i as u32, j, Dist::ONE, EdgeKind::Internal)?;
                }
            }
        }
    }
    let e_ball = Arc::new(graph.path_metric());

    let g_ball_space = lattice_ball_space(2, radius)?;
    let f_map: Vec<u32> = elements
        .iter()
        .map(|e| {
            g_ball_space
                .index_of(&format!("({},{})", e[0], e[1]))
                .expect("projection lands in the ball")
        })
        .collect();
    let g_ball = g_ball_space;
    let f = MappedPair::new(e_ball.clone(), g_ball.clone(), f_map)?;
    Ok(Heisenberg { e_ball, g_ball, f, elements, norms, radius })
}

impl Heisenberg {
    /// Points whose word norm leaves the given margin to the boundary.
    pub fn interior(&self, margin: i64) -> Vec<bool> {
        self.norms.iter().map(|&n| n <= self.radius - margin).collect()
    }
}

/// |B(R)| for R = 1..=r_max in the Heisenberg ball family.
pub fn heisenberg_ball_sizes(r_max: i64) -> Vec<usize> {
    (1..=r_max).map(|r| heisenberg_enumerate(r).len()).collect()
}

// ---------------------------------------------------------------------------
// Integer lattices
// ---------------------------------------------------------------------------

fn lattice_points(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = vec![0i64; dim];
    fn rec(out: &mut Vec<Vec<i64>>, current: &mut Vec<i64>, coord: usize, budget: i64) {
        if coord == current.len() {
            out.push(current.clone());
            return;
        }
        for v in -budget..=budget {
            current[coord] = v;
            rec(out, current, coord + 1, budget - v.abs());
            current[coord] = 0;
        }
    }
    rec(&mut out, &mut current, 0, radius);
    out.sort();
    out
}

fn tuple_id(p: &[i64]) -> String {
    let inner: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", inner.join(","))
}

/// Taxicab ball of the rank-`dim` integer lattice with its word metric.
/// In-ball geodesics realize the taxicab distance between any two ball
/// points, so the restriction is exact.
pub fn lattice_ball_space(dim: usize, radius: i64) -> Result<SpaceRef> {
    if dim == 0 || radius < 0 {
        return Err(Error::BadParameter("lattice ball needs dim >= 1, radius >= 0".into()));
    }
    let points = lattice_points(dim, radius);
    let ids: Vec<String> = points.iter().map(|p| tuple_id(p)).collect();
    Ok(Arc::new(Space::from_fn_unchecked(ids, |i, j| {
        let d: i64 = points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b).abs())
            .sum();
        Dist::from_raw(d as f64)
    })))
}

/// |B(R)| for R = 1..=r_max in the rank-`dim` lattice family.
pub fn lattice_ball_sizes(dim: usize, r_max: i64) -> Vec<usize> {
    (1..=r_max).map(|r| lattice_points(dim, r).len()).collect()
}

/// Coordinate projection between taxicab balls of integer lattices.
pub struct LatticeQuotient {
    pub x: SpaceRef,
    pub y: SpaceRef,
    pub f: MappedPair,
    pub x_norms: Vec<i64>,
    pub radius: i64,
}

pub fn lattice_quotient(k: usize, m: usize, radius: i64) -> Result<LatticeQuotient> {
    if m < 1 || m > k || radius < 1 {
        return Err(Error::BadParameter(
            "lattice quotient needs 1 <= m <= k and radius >= 1".into(),
        ));
    }
    let x_points = lattice_points(k, radius);
    let x = {
        let ids = x_points.iter().map(|p| tuple_id(p)).collect();
        let pts = x_points.clone();
        Arc::new(Space::from_fn_unchecked(ids, move |i, j| {
            let d: i64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).abs()).sum();
            Dist::from_raw(d as f64)
        }))
    };
    let y = lattice_ball_space(m, radius)?;
    let f_map: Vec<u32> = x_points
        .iter()
        .map(|p| {
            y.index_of(&tuple_id(&p[..m])).expect("projection lands in the ball")
        })
        .collect();
    let f = MappedPair::new(x.clone(), y.clone(), f_map)?;
    let x_norms = x_points.iter().map(|p| p.iter().map(|c| c.abs()).sum()).collect();
    Ok(LatticeQuotient { x, y, f, x_norms, radius })
}

impl LatticeQuotient {
    pub fn interior(&self, margin: i64) -> Vec<bool> {
        self.x_norms.iter().map(|&n| n <= self.radius - margin).collect()
    }
}

// ---------------------------------------------------------------------------
// Cubes to squares
// ---------------------------------------------------------------------------

/// X = {n^3 : 1 <= n <= N} -> Y = {n^2 : 1 <= n <= N}, n^3 -> n^2, with the
/// absolute-difference metrics.
pub struct CubesSquares {
    pub x: SpaceRef,
    pub y: SpaceRef,
    pub f: MappedPair,
    pub window: i64,
}

pub fn cubes_squares(window: i64) -> Result<CubesSquares> {
    if window < 2 {
        return Err(Error::BadParameter("cubes-squares needs a window of at least 2".into()));
    }
    let line = |vals: Vec<i64>| -> SpaceRef {
        let ids = vals.iter().map(|v| v.to_string()).collect();
        Arc::new(Space::from_fn_unchecked(ids, move |i, j| {
            Dist::from_raw((vals[i] - vals[j]).abs() as f64)
        }))
    };
    let x = line((1..=window).map(|n| n * n * n).collect());
    let y = line((1..=window).map(|n| n * n).collect());
    let f = MappedPair::new(x.clone(), y.clone(), (0..window as u32).collect())?;
    Ok(CubesSquares { x, y, f, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comb_smallest_stage() {
        let c = comb(1).unwrap();
        assert_eq!(c.teeth.len(), 1);
        assert_eq!(c.teeth[0].height, 1);
        assert_eq!(c.ray_end, 1);
        assert_eq!(c.x.len(), 3); // (0,0), (1,0), (0,1)
    }

    #[test]
    fn comb_stage_five_matches_hand_layout() {
        let c = comb(5).unwrap();
        let stage5: Vec<i64> =
            c.teeth.iter().filter(|t| t.stage == 5).map(|t| t.x).collect();
        assert_eq!(stage5, vec![20, 21, 23, 26, 30]);
        assert_eq!(c.ray_end, 35);
        assert_eq!(c.x.len(), 91);
    }

    #[test]
    fn comb_pair_locator() {
        let c = comb(6).unwrap();
        let (v, v2) = c.locate_pair(2, 5).unwrap();
        assert_eq!(c.x.ids()[v as usize], "(23,5)");
        assert_eq!(c.x.ids()[v2 as usize], "(26,5)");
        assert_eq!(c.y.dist(v, v2), Dist::from_raw(3.0));
        // no gap of 3 exists at stage 3
        assert!(c.locate_pair(2, 3).is_none());
        assert!(c.locate_pair(5, 4).is_none());
    }

    #[test]
    fn comb_tooth_tips_reach_the_ray_vertically() {
        let c = comb(4).unwrap();
        for t in &c.teeth {
            let tip = c.point_index(t.x, t.height).unwrap();
            let base = c.point_index(t.x, 0).unwrap();
            assert_eq!(c.x.dist(tip, base), Dist::from_raw(t.height as f64));
        }
    }

    #[test]
    fn comb_interior_excludes_last_stage() {
        let c = comb(3).unwrap();
        let last = c.teeth.iter().find(|t| t.stage == 3).unwrap();
        let tip = c.point_index(last.x, 3).unwrap();
        assert!(!c.interior[tip as usize]);
        let first_tip = c.point_index(0, 1).unwrap();
        assert!(c.interior[first_tip as usize]);
    }

    #[test]
    fn comb_truncations_nest() {
        let small = comb(3).unwrap();
        let large = comb(5).unwrap();
        for id in small.x.ids() {
            assert!(large.x.index_of(id).is_some(), "{id} lost in larger truncation");
        }
    }

    #[test]
    fn retraction_is_split() {
        let cr = comb_retraction(4).unwrap();
        let fs = cr.s.then(&cr.f).unwrap();
        for i in 0..cr.ray.len() as u32 {
            assert_eq!(fs.apply(i), i);
        }
        let check = crate::control::check_affine_upper(
            &cr.f,
            crate::control::AffineWitness::new(1.0, 0.0).unwrap(),
        );
        assert!(check.holds, "retraction must be 1-Lipschitz");
    }

    #[test]
    fn heisenberg_commutator_is_central_generator() {
        let a = [1, 0, 0];
        let b = [0, 1, 0];
        let ainv = [-1, 0, 0];
        let binv = [0, -1, 0];
        let c = heisenberg_mul(heisenberg_mul(heisenberg_mul(a, b), ainv), binv);
        assert_eq!(c, [0, 0, 1]);
    }

    #[test]
    fn heisenberg_radius_one() {
        let h = heisenberg(1).unwrap();
        assert_eq!(h.e_ball.len(), 7);
        assert_eq!(h.f.target().len(), 5); // identity + 4 lattice generators
    }

    #[test]
    fn heisenberg_ball_matches_word_enumeration_oracle() {
        // independent oracle: multiply out all words over the generators as
        // 3x3 upper unitriangular integer matrices
        fn mat_mul(a: [[i64; 3]; 3], b: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
            let mut c = [[0i64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        }
        fn gen_mat(s: Triple) -> [[i64; 3]; 3] {
            [[1, s[0], s[2]], [0, 1, s[1]], [0, 0, 1]]
        }
        let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        let mut reached: HashMap<[[i64; 3]; 3], i64> = HashMap::new();
        reached.insert(id, 0);
        let mut frontier = vec![id];
        for level in 1..=4 {
            let mut next = Vec::new();
            for m in &frontier {
                for s in H_GENS {
                    let w = mat_mul(*m, gen_mat(s));
                    reached.entry(w).or_insert_with(|| {
                        next.push(w);
                        level
                    });
                }
            }
            frontier = next;
        }
        let h = heisenberg(4).unwrap();
        assert_eq!(h.elements.len(), reached.len());
        for (i, e) in h.elements.iter().enumerate() {
            let m = [[1, e[0], e[2]], [0, 1, e[1]], [0, 0, 1]];
            assert_eq!(reached.get(&m), Some(&h.norms[i]), "norm mismatch at {e:?}");
        }
    }

    #[test]
    fn lattice_ball_sizes_match_closed_form() {
        // centered octahedral numbers: (2R + 1)(2R^2 + 2R + 3) / 3
        let sizes = lattice_ball_sizes(3, 8);
        let formula: Vec<usize> = (1..=8)
            .map(|r: i64| (((2 * r + 1) * (2 * r * r + 2 * r + 3)) / 3) as usize)
            .collect();
        assert_eq!(sizes, formula);
    }

    #[test]
    fn lattice_in_ball_distances_are_taxicab() {
        // cross-check the closed form against in-ball breadth-first search
        let space = lattice_ball_space(2, 4).unwrap();
        let points = lattice_points(2, 4);
        let lookup: HashMap<Vec<i64>, u32> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let mut graph = WeightedGraph::new(space.ids().to_vec()).unwrap();
        for (i, p) in points.iter().enumerate() {
            for axis in 0..2 {
                for step in [-1i64, 1] {
                    let mut q = p.clone();
                    q[axis] += step;
                    if let Some(&j) = lookup.get(&q) {
                        if (i as u32) < j {
                            graph.add_edge(i as u32, j, Dist::ONE, EdgeKind::Internal).unwrap();
                        }
                    }
                }
            }
        }
        let bfs = graph.path_metric();
        assert_eq!(*space, bfs);
    }

    #[test]
    fn lattice_quotient_fibers_are_segments()     {
        let lq = lattice_quotient(2, 1, 3).unwrap();
        let zero = lq.y.index_of("(0)").unwrap();
        let fiber = lq.f.preimages(zero);
        assert_eq!(fiber.len(), 7); // (0, -3) .. (0, 3)
        let mut worst = Dist::ZERO;
        for &a in fiber {
            for &b in fiber {
                worst = worst.max(lq.x.dist(a, b));
            }
        }
        assert_eq!(worst, Dist::from_raw(6.0)); // 2N
    }

    #[test]
    fn cubes_squares_smallest_window() {
        let cs = cubes_squares(2).unwrap();
        assert_eq!(cs.x.ids(), &["1".to_string(), "8".to_string()]);
        assert_eq!(cs.y.ids(), &["1".to_string(), "4".to_string()]);
        assert_eq!(cs.f.apply(1), 1);
        assert_eq!(cs.x.dist(0, 1), Dist::from_raw(7.0));
        assert_eq!(cs.y.dist(0, 1), Dist::from_raw(3.0));
    }

    #[test]
    fn generators_are_deterministic() {
        let a = comb(4).unwrap();
        let b = comb(4).unwrap();
        assert_eq!(*a.x, *b.x);
        assert_eq!(*a.y, *b.y);
        let h1 = heisenberg(3).unwrap();
        let h2 = heisenberg(3).unwrap();
        assert_eq!(*h1.e_ball, *h2.e_ball);
    }
}
