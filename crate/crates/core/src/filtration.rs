//! Kernel and quotient filtrations, equaliser sublevels, stability profiles,
//! and the coarse-quotient witness search.
//!
//! The kernel at scale sigma is the set of pairs (x, x') whose images lie
//! within sigma; the quotient at scale sigma glues exactly those pairs with
//! unit edges. Stability is never decided on a single truncation: profiles
//! record exact per-(sigma, tau) quantities on a declared interior window,
//! and verdicts about growth belong to the scenario layer, which compares
//! profiles across a truncation family.
//!
//! Windows restrict the pairs being certified; witness searches always range
//! over the whole truncation.

use std::io::{self, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::dist::{le_with, Dist};
use crate::error::{Error, Result};
use crate::map::{same_space, MappedPair};
use crate::par::maybe_parallel_rows;
use crate::space::{product_linf, SpaceRef};

/// Sublevel of the equaliser filtration: the induced metric on
/// { x : d_Y(fx, gx) <= kappa }, together with its isometric inclusion.
pub struct EqSublevel {
    pub space: SpaceRef,
    pub inclusion: MappedPair,
    pub indices: Vec<u32>,
}

pub fn eq_sublevel(f: &MappedPair, g: &MappedPair, kappa: Dist) -> Result<EqSublevel> {
    if !same_space(f.source(), g.source()) || !same_space(f.target(), g.target()) {
        return Err(Error::SpaceMismatch("equaliser needs a parallel pair".into()));
    }
    let x = f.source();
    let y = f.target();
    let tol = y.tol();
    let indices: Vec<u32> = (0..x.len() as u32)
        .filter(|&i| le_with(y.dist(f.apply(i), g.apply(i)), kappa, tol))
        .collect();
    let space = Arc::new(x.subspace(&indices));
    let inclusion = MappedPair::new(space.clone(), x.clone(), indices.clone())?;
    Ok(EqSublevel { space, inclusion, indices })
}

/// Unordered distinct kernel pairs (i < j) with d_Y(fi, fj) <= sigma.
pub fn kernel_pairs(f: &MappedPair, sigma: Dist) -> Vec<(u32, u32)> {
    let y = f.target();
    let tol = y.tol();
    let n = f.source().len() as u32;
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if le_with(y.dist(f.apply(i), f.apply(j)), sigma, tol) {
                out.push((i, j));
            }
        }
    }
    out
}

/// The kernel sublevel K_sigma(f) as an explicit subspace of the product
/// X x X with the sup metric, together with both composed projections.
/// Materializes a |K|^2 matrix; meant for small instances and cross-checks.
pub struct KernelSublevel {
    pub space: SpaceRef,
    pub proj1: MappedPair,
    pub proj2: MappedPair,
    /// Ordered pairs, diagonal included, indexing the points of `space`.
    pub pairs: Vec<(u32, u32)>,
}

pub fn kernel_sublevel(f: &MappedPair, sigma: Dist) -> KernelSublevel {
    let x = f.source();
    let y = f.target();
    let tol = y.tol();
    let n = x.len() as u32;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if le_with(y.dist(f.apply(i), f.apply(j)), sigma, tol) {
                pairs.push((i, j));
            }
        }
    }
    let ids = pairs
        .iter()
        .map(|&(i, j)| format!("({},{})", x.id(i), x.id(j)))
        .collect();
    let space = Arc::new(crate::space::Space::from_fn_unchecked(ids, |p, q| {
        let (a, b) = pairs[p];
        let (c, d) = pairs[q];
        x.dist(a, c).max(x.dist(b, d))
    }));
    let proj1 = MappedPair::new(space.clone(), x.clone(), pairs.iter().map(|&(i, _)| i).collect())
        .expect("projection is total");
    let proj2 = MappedPair::new(space.clone(), x.clone(), pairs.iter().map(|&(_, j)| j).collect())
        .expect("projection is total");
    KernelSublevel { space, proj1, proj2, pairs }
}

/// The same sublevel computed through the explicit product X x X and the
/// equaliser of f.pi1, f.pi2. Definitional cross-check route; quadratic in
/// |X| squared, so small instances only.
pub fn kernel_sublevel_via_product(f: &MappedPair, sigma: Dist) -> Result<EqSublevel> {
    let x = f.source();
    let (xx, p1, p2) = product_linf(x, x);
    let _ = xx;
    let fp1 = p1.then(f)?;
    let fp2 = p2.then(f)?;
    eq_sublevel(&fp1, &fp2, sigma)
}

/// The coarse quotient Q_sigma(f): X with a unit glued edge across every
/// kernel pair at scale sigma, given the path metric. Equivalent to the
/// coequaliser of the two kernel projections; built directly on the dense
/// weight matrix min(d_X, glued) since sweeps re-run it on large spaces.
pub struct Quotient {
    pub space: SpaceRef,
    /// Underlying identity X -> Q_sigma(f); 1-Lipschitz.
    pub q: MappedPair,
    /// The map Q_sigma(f) -> Y coinciding with f on underlying sets.
    pub f_sigma: MappedPair,
}

pub fn quotient_space(f: &MappedPair, sigma: Dist) -> Quotient {
    let x = f.source();
    let y = f.target();
    let tol = y.tol();
    let n = x.len();
    let mut w: Vec<Dist> = x.matrix().to_vec();
    for i in 0..n {
        for j in 0..n {
            if i != j
                && w[i * n + j] > Dist::ONE
                && le_with(y.dist(f.apply(i as u32), f.apply(j as u32)), sigma, tol)
            {
                w[i * n + j] = Dist::ONE;
            }
        }
    }
    let rows = maybe_parallel_rows(n, |src| dense_dijkstra(&w, n, src));
    let mut flat = vec![Dist::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            flat[i * n + j] = rows[i][j].min(rows[j][i]);
        }
    }
    let space = Arc::new(
        crate::space::Space::from_flat_unchecked(x.ids().to_vec(), flat, Default::default())
            .expect("ids stay unique"),
    );
    let q = MappedPair::underlying_identity(x.clone(), space.clone()).expect("same points");
    let f_sigma =
        MappedPair::new(space.clone(), y.clone(), f.map().to_vec()).expect("same assignment");
    Quotient { space, q, f_sigma }
}

fn dense_dijkstra(w: &[Dist], n: usize, src: usize) -> Vec<Dist> {
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// n(sigma, tau): minimal n with K_tau inside the sup-metric
    /// n-neighbourhood of K_sigma, over window pairs.
    InclusionDensity,
    /// r(sigma, tau): max d_{Q_sigma} over window pairs with d_{Q_tau} <= 1.
    BondingDistortion,
}

impl ProfileKind {
    fn csv_name(self) -> &'static str {
        match self {
            ProfileKind::InclusionDensity => "inclusion_density",
            ProfileKind::BondingDistortion => "bonding_distortion",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRecord {
    pub sigma: Dist,
    pub tau: Dist,
    pub value: Dist,
}

/// Per-(sigma, tau) records over a sigma-grid, valid on a declared window.
#[derive(Debug, Clone, Serialize)]
pub struct FiltrationProfile {
    pub kind: ProfileKind,
    pub grid: Vec<Dist>,
    pub records: Vec<ProfileRecord>,
    pub window_size: usize,
    pub truncation_param: Option<f64>,
}

impl FiltrationProfile {
    pub fn value(&self, sigma: Dist, tau: Dist) -> Option<Dist> {
        self.records
            .iter()
            .find(|r| r.sigma == sigma && r.tau == tau)
            .map(|r| r.value)
    }

    /// Monotonicity contract: nonincreasing in sigma for fixed tau,
    /// nondecreasing in tau for fixed sigma. Checked on every run; a
    /// violation is a bug in the sweep, not bad data.
    fn assert_monotone(&self, tol: f64) {
        for a in &self.records {
            for b in &self.records {
                if a.tau == b.tau && a.sigma < b.sigma {
                    assert!(
                        le_with(b.value, a.value, tol),
                        "profile not monotone in sigma: ({}, {}) -> {} vs ({}, {}) -> {}",
                        a.sigma, a.tau, a.value, b.sigma, b.tau, b.value
                    );
                }
                if a.sigma == b.sigma && a.tau < b.tau {
                    assert!(
                        le_with(a.value, b.value, tol),
                        "profile not monotone in tau: ({}, {}) -> {} vs ({}, {}) -> {}",
                        a.sigma, a.tau, a.value, b.sigma, b.tau, b.value
                    );
                }
            }
        }
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "sigma,tau,record_kind,value,window_size,truncation_param")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.sigma,
                r.tau,
                self.kind.csv_name(),
                r.value,
                self.window_size,
                self.truncation_param.map_or(String::new(), |p| p.to_string())
            )?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn validate_grid(grid: &[Dist]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadParameter("sigma grid must be nonempty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameter("sigma grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Default sigma grid: realized distances of the target, evenly subsampled
/// down to at most `max_len` values.
pub fn default_sigma_grid(y: &SpaceRef, max_len: usize) -> Vec<Dist> {
    let realized = y.realized_distances();
    if realized.len() <= max_len {
        let mut g = vec![Dist::ZERO];
        g.extend(realized);
        g.dedup();
        return g;
    }
    let mut g = vec![Dist::ZERO];
    let step = realized.len() as f64 / max_len as f64;
    for k in 0..max_len {
        g.push(realized[(k as f64 * step) as usize]);
    }
    g.dedup();
    g
}

/// Per-point indices sorted by distance from that point, self first.
fn sorted_neighbors(space: &SpaceRef) -> Vec<Vec<u32>> {
    let n = space.len();
    maybe_parallel_rows(n, |i| {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&j| space.dist(i as u32, j));
        order
    })
}

/// Exact inclusion-density profile of the kernel filtration: for each
/// sigma <= tau in the grid, the minimal n such that every window pair in
/// K_tau(f) lies within sup-distance n of some member of K_sigma(f).
/// Witnesses range over the whole truncation; infinite when none exists.
pub fn kernel_stability_profile(
    f: &MappedPair,
    grid: &[Dist],
    window: Option<&[bool]>,
    truncation_param: Option<f64>,
) -> Result<FiltrationProfile> {
    validate_grid(grid)?;
    let x = f.source();
    let y = f.target();
    let tol = y.tol();
    let n = x.len();
    let neighbors = sorted_neighbors(x);
    let in_window = |i: usize| window.map_or(true, |w| w[i]);
    let window_size = (0..n).filter(|&i| in_window(i)).count();

    let mut records = Vec::new();
    for (ti, &tau) in grid.iter().enumerate() {
        // target pairs in K_tau with both points in the window
        let mut targets = Vec::new();
        for i in 0..n as u32 {
            if !in_window(i as usize) {
                continue;
            }
            for j in (i + 1)..n as u32 {
                if in_window(j as usize) && le_with(y.dist(f.apply(i), f.apply(j)), tau, tol) {
                    targets.push((i, j));
                }
            }
        }
        for &sigma in &grid[..=ti] {
            let per_pair = maybe_parallel_rows(targets.len(), |t| {
                let (i, j) = targets[t];
                witness_distance(f, &neighbors, i, j, sigma, tol)
            });
            let value = per_pair.into_iter().max().unwrap_or(Dist::ZERO);
            records.push(ProfileRecord { sigma, tau, value });
        }
    }
    let profile = FiltrationProfile {
        kind: ProfileKind::InclusionDensity,
        grid: grid.to_vec(),
        records,
        window_size,
        truncation_param,
    };
    profile.assert_monotone(tol.max(x.tol()));
    Ok(profile)
}

/// Witness distance of a single pair against the kernel at scale sigma:
/// min over (w, w') in K_sigma(f) of max(d(i, w), d(j, w')).
pub fn pair_witness_distance(f: &MappedPair, i: u32, j: u32, sigma: Dist) -> Dist {
    let neighbors = sorted_neighbors(f.source());
    witness_distance(f, &neighbors, i, j, sigma, f.target().tol())
}

/// Min over (w, w') in K_sigma of max(d(i, w), d(j, w')), by branch and
/// bound over distance-sorted candidates.
fn witness_distance(
    f: &MappedPair,
    neighbors: &[Vec<u32>],
    i: u32,
    j: u32,
    sigma: Dist,
    tol: f64,
) -> Dist {
    let x = f.source();
    let y = f.target();
    let mut best = Dist::INF;
    for &w in &neighbors[i as usize] {
        let di = x.dist(i, w);
        if di >= best {
            break;
        }
        let fw = f.apply(w);
        for &w2 in &neighbors[j as usize] {
            let dj = x.dist(j, w2);
            let bound = di.max(dj);
            if bound >= best {
                break;
            }
            if le_with(y.dist(fw, f.apply(w2)), sigma, tol) {
                best = bound;
                break;
            }
        }
    }
    best
}

/// Bonding-distortion profile of the quotient filtration, from prebuilt
/// quotient metrics aligned with the grid.
pub fn quotient_profile_from_tower(
    grid: &[Dist],
    tower: &[SpaceRef],
    window: Option<&[bool]>,
    truncation_param: Option<f64>,
) -> Result<FiltrationProfile> {
    validate_grid(grid)?;
    if tower.len() != grid.len() {
        return Err(Error::BadParameter("tower must align with the grid".into()));
    }
    let n = tower.first().map_or(0, |s| s.len());
    let tol = tower.iter().map(|s| s.tol()).fold(0.0, f64::max);
    let in_window = |i: usize| window.map_or(true, |w| w[i]);
    let window_size = (0..n).filter(|&i| in_window(i)).count();
    let mut records = Vec::new();
    for (ti, &tau) in grid.iter().enumerate() {
        let q_tau = &tower[ti];
        for (si, &sigma) in grid[..=ti].iter().enumerate() {
            let q_sigma = &tower[si];
            let mut value = Dist::ZERO;
            for i in 0..n as u32 {
                if !in_window(i as usize) {
                    continue;
                }
                for j in (i + 1)..n as u32 {
                    if in_window(j as usize) && le_with(q_tau.dist(i, j), Dist::ONE, tol) {
                        value = value.max(q_sigma.dist(i, j));
                    }
                }
            }
            records.push(ProfileRecord { sigma, tau, value });
        }
    }
    let profile = FiltrationProfile {
        kind: ProfileKind::BondingDistortion,
        grid: grid.to_vec(),
        records,
        window_size,
        truncation_param,
    };
    profile.assert_monotone(tol);
    Ok(profile)
}

/// Builds the quotient tower over the grid and profiles it.
pub fn quotient_stability_profile(
    f: &MappedPair,
    grid: &[Dist],
    window: Option<&[bool]>,
    truncation_param: Option<f64>,
) -> Result<FiltrationProfile> {
    validate_grid(grid)?;
    let tower: Vec<SpaceRef> = grid.iter().map(|&s| quotient_space(f, s).space).collect();
    quotient_profile_from_tower(grid, &tower, window, truncation_param)
}

#[derive(Debug, Clone, Serialize)]
pub enum ZhangOutcome {
    /// Minimal delta such that every y' within eps of fx has a witness w
    /// within delta of x with d_Y(fw, y') <= R, over window points x.
    Feasible {
        delta: Dist,
        /// A pair (x, y') attaining delta, when the window is nonempty.
        attained_at: Option<(String, String)>,
    },
    /// Some (x, y') admits no witness at finite distance.
    Infeasible { x: String, y_prime: String },
}

/// Coarse-quotient witness search at constant R and scale eps.
pub fn zhang_delta(
    f: &MappedPair,
    r_const: Dist,
    eps: Dist,
    window: Option<&[bool]>,
) -> ZhangOutcome {
    let x = f.source();
    let y = f.target();
    let tol = y.tol();
    let neighbors = sorted_neighbors(x);
    let mut delta = Dist::ZERO;
    let mut attained = None;
    for i in 0..x.len() as u32 {
        if window.map_or(false, |w| !w[i as usize]) {
            continue;
        }
        let fi = f.apply(i);
        for yp in 0..y.len() as u32 {
            if !le_with(y.dist(fi, yp), eps, tol) {
                continue;
            }
            let mut found = None;
            for &w in &neighbors[i as usize] {
                if !x.dist(i, w).is_finite() {
                    break;
                }
                if le_with(y.dist(f.apply(w), yp), r_const, tol) {
                    found = Some(x.dist(i, w));
                    break;
                }
            }
            match found {
                Some(d) => {
                    if d > delta {
                        delta = d;
                        attained = Some((x.id(i).to_string(), y.id(yp).to_string()));
                    }
                }
                None => {
                    return ZhangOutcome::Infeasible {
                        x: x.id(i).to_string(),
                        y_prime: y.id(yp).to_string(),
                    }
                }
            }
        }
    }
    ZhangOutcome::Feasible { delta, attained_at: attained }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use std::sync::Arc;

    fn segment(n: u32) -> SpaceRef {
        let ids = (0..=n).map(|i| i.to_string()).collect();
        Arc::new(Space::from_fn_unchecked(ids, |i, j| {
            Dist::from_raw((i as f64 - j as f64).abs())
        }))
    }

    #[test]
    fn eq_sublevel_of_equal_maps_is_everything() {
        let x = segment(4);
        let f = MappedPair::identity(&x);
        let eq = eq_sublevel(&f, &f, Dist::ZERO).unwrap();
        assert_eq!(eq.space.len(), 5);
    }

    #[test]
    fn eq_sublevel_of_constant_maps() {
        let x = segment(3);
        let y = segment(3);
        let f = MappedPair::new(x.clone(), y.clone(), vec![0; 4]).unwrap();
        let g = MappedPair::new(x.clone(), y.clone(), vec![3; 4]).unwrap();
        assert_eq!(eq_sublevel(&f, &g, Dist::from_raw(3.0)).unwrap().space.len(), 4);
        assert_eq!(eq_sublevel(&f, &g, Dist::from_raw(2.0)).unwrap().space.len(), 0);
    }

    #[test]
    fn kernel_sublevel_extremes() {
        let x = segment(3);
        let f = MappedPair::identity(&x);
        // sigma = 0 on an injective map: diagonal only
        assert_eq!(kernel_sublevel(&f, Dist::ZERO).pairs.len(), 4);
        // sigma >= diameter: all of X x X
        assert_eq!(kernel_sublevel(&f, Dist::from_raw(3.0)).pairs.len(), 16);
    }

    #[test]
    fn kernel_matches_product_route() {
        let x = segment(3);
        let f = MappedPair::identity(&x);
        for sigma in [Dist::ZERO, Dist::ONE, Dist::from_raw(2.0)] {
            let direct = kernel_sublevel(&f, sigma);
            let via = kernel_sublevel_via_product(&f, sigma).unwrap();
            assert_eq!(direct.space.len(), via.space.len());
            assert_eq!(*direct.space, *via.space);
        }
    }

    #[test]
    fn quotient_collapses_everything_at_large_sigma() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        let q = quotient_space(&f, Dist::from_raw(5.0));
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { Dist::ZERO } else { Dist::ONE };
                assert_eq!(q.space.dist(i, j), expect);
            }
        }
    }

    #[test]
    fn quotient_tower_is_pointwise_sandwiched() {
        let x = segment(8);
        let f = MappedPair::identity(&x);
        let q2 = quotient_space(&f, Dist::from_raw(2.0));
        let q4 = quotient_space(&f, Dist::from_raw(4.0));
        for i in 0..9 {
            for j in 0..9 {
                assert!(q4.space.dist(i, j) <= q2.space.dist(i, j));
                assert!(q2.space.dist(i, j) <= x.dist(i, j));
            }
        }
    }

    #[test]
    fn profile_reflexive_distortion_is_at_most_one() {
        let x = segment(6);
        let f = MappedPair::identity(&x);
        let grid = [Dist::ONE, Dist::from_raw(2.0)];
        let p = quotient_stability_profile(&f, &grid, None, None).unwrap();
        assert!(p.value(Dist::ONE, Dist::ONE).unwrap() <= Dist::ONE);
        assert!(p.value(Dist::from_raw(2.0), Dist::from_raw(2.0)).unwrap() <= Dist::ONE);
    }

    #[test]
    fn kernel_profile_on_identity_segment() {
        let x = segment(10);
        let f = MappedPair::identity(&x);
        let grid = [Dist::ONE, Dist::from_raw(3.0)];
        let p = kernel_stability_profile(&f, &grid, None, None).unwrap();
        // (i, j) with |i-j| <= 3 has witness (i, i+1)-type pairs within 1:
        // e.g. (0,3) -> (0,1) at sup distance 2
        assert!(p.value(Dist::ONE, Dist::from_raw(3.0)).unwrap() <= Dist::from_raw(2.0));
        assert_eq!(p.value(Dist::ONE, Dist::ONE).unwrap(), Dist::ZERO);
    }

    #[test]
    fn zhang_on_surjective_isometry_is_identity() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        match zhang_delta(&f, Dist::ZERO, Dist::from_raw(2.0), None) {
            ZhangOutcome::Feasible { delta, .. } => assert_eq!(delta, Dist::from_raw(2.0)),
            ZhangOutcome::Infeasible { .. } => panic!("identity is a coarse quotient"),
        }
    }

    #[test]
    fn csv_shape() {
        let x = segment(4);
        let f = MappedPair::identity(&x);
        let p = kernel_stability_profile(&f, &[Dist::ONE], None, Some(4.0)).unwrap();
        let csv = p.csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sigma,tau,record_kind,value,window_size,truncation_param"
        );
        assert_eq!(lines.next().unwrap(), "1,1,inclusion_density,0,5,4");
    }
}
