//! Finite extended metric spaces.
//!
//! A [`Space`] is a finite point set together with a symmetric matrix of
//! extended distances. Construction through [`Space::new`] verifies the full
//! metric contract: zero diagonal, symmetry, identity of indiscernibles, and
//! the triangle inequality with infinity absorbing. Spaces produced by path
//! metrics and other by-construction-valid routes use the unchecked
//! constructors internally; every one of those routes is cross-checked in the
//! test suite.
//!
//! Spaces are immutable after construction and shared via [`SpaceRef`].

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::dist::{eq_with, le_with, Dist, FLOAT_TOL};
use crate::error::{Error, Result};
use crate::map::MappedPair;
use crate::par::maybe_parallel_rows;

pub type SpaceRef = Arc<Space>;

#[derive(Debug, Clone)]
pub struct Space {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    dist: Vec<Dist>, // n*n row-major, symmetric
    labels: BTreeMap<String, String>,
    integral: bool,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.dist == other.dist && self.labels == other.labels
    }
}

impl Space {
    /// Builds a space and verifies all metric invariants.
    pub fn new(
        ids: Vec<String>,
        rows: Vec<Vec<Dist>>,
        labels: BTreeMap<String, String>,
    ) -> Result<Space> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MetricViolation(format!(
                "distance matrix must be {n}x{n} to match the point list"
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            flat.extend(row);
        }
        let space = Space::from_flat_unchecked(ids, flat, labels)?;
        space.verify_metric()?;
        Ok(space)
    }

    /// Wraps an already-valid matrix. Callers guarantee the metric contract;
    /// id uniqueness and matrix shape are still enforced.
    pub(crate) fn from_flat_unchecked(
        ids: Vec<String>,
        flat: Vec<Dist>,
        labels: BTreeMap<String, String>,
    ) -> Result<Space> {
        let n = ids.len();
        assert_eq!(flat.len(), n * n, "matrix shape mismatch");
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i as u32).is_some() {
                return Err(Error::MetricViolation(format!("duplicate point id {id:?}")));
            }
        }
        let integral = flat.iter().all(|d| d.is_integral());
        Ok(Space { ids, index, dist: flat, labels, integral })
    }

    /// Builds from a distance function without validation.
    pub(crate) fn from_fn_unchecked<F: Fn(usize, usize) -> Dist>(
        ids: Vec<String>,
        f: F,
    ) -> Space {
        let n = ids.len();
        let mut flat = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                flat.push(f(i, j));
            }
        }
        Space::from_flat_unchecked(ids, flat, BTreeMap::new())
            .expect("generator produced duplicate ids")
    }

    pub fn empty() -> Space {
        Space {
            ids: Vec::new(),
            index: HashMap::new(),
            dist: Vec::new(),
            labels: BTreeMap::new(),
            integral: true,
        }
    }

    /// Single point at the given id.
    pub fn point(id: &str) -> Space {
        Space::from_fn_unchecked(vec![id.to_string()], |_, _| Dist::ZERO)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: u32) -> &str {
        &self.ids[i as usize]
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    pub fn dist(&self, i: u32, j: u32) -> Dist {
        self.dist[i as usize * self.ids.len() + j as usize]
    }

    pub(crate) fn matrix(&self) -> &[Dist] {
        &self.dist
    }

    /// True when every finite entry is an integer; such spaces compare exactly.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// Additive comparison slack: zero on the integer path.
    pub fn tol(&self) -> f64 {
        if self.integral {
            0.0
        } else {
            FLOAT_TOL
        }
    }

    /// Max distance over all pairs (infinite when disconnected), zero for
    /// spaces with fewer than two points.
    pub fn diameter(&self) -> Dist {
        let n = self.len();
        let mut best = Dist::ZERO;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.dist(i as u32, j as u32));
            }
        }
        best
    }

    /// Max finite distance over all pairs.
    pub fn max_finite_distance(&self) -> Dist {
        let mut best = Dist::ZERO;
        for &d in &self.dist {
            if d.is_finite() {
                best = best.max(d);
            }
        }
        best
    }

    /// Sorted, deduplicated finite off-diagonal distances.
    pub fn realized_distances(&self) -> Vec<Dist> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.dist(i as u32, j as u32);
                if d.is_finite() {
                    out.push(d);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Exhaustively verifies the metric contract. O(n^3) for the triangle
    /// inequality; distances compare with the space's tolerance.
    pub fn verify_metric(&self) -> Result<()> {
        let n = self.len();
        let tol = self.tol();
        for i in 0..n as u32 {
            if self.dist(i, i) != Dist::ZERO {
                return Err(Error::MetricViolation(format!(
                    "dist({id}, {id}) = {d} != 0",
                    id = self.id(i),
                    d = self.dist(i, i)
                )));
            }
            for j in 0..n as u32 {
                if i == j {
                    continue;
                }
                let d = self.dist(i, j);
                if !eq_with(d, self.dist(j, i), tol) {
                    return Err(Error::MetricViolation(format!(
                        "asymmetry at ({}, {}): {} vs {}",
                        self.id(i),
                        self.id(j),
                        d,
                        self.dist(j, i)
                    )));
                }
                if d.value() <= tol {
                    return Err(Error::MetricViolation(format!(
                        "distinct points {} and {} at distance {}",
                        self.id(i),
                        self.id(j),
                        d
                    )));
                }
            }
        }
        // Triangle with infinity absorbing: only finite right-hand sides bind.
        let violation = maybe_parallel_rows(n, |q| {
            let q = q as u32;
            for p in 0..n as u32 {
                let dpq = self.dist(p, q);
                if !dpq.is_finite() {
                    continue;
                }
                for r in 0..n as u32 {
                    let rhs = dpq + self.dist(q, r);
                    if rhs.is_finite() && !le_with(self.dist(p, r), rhs, tol) {
                        return Some((p, q, r));
                    }
                }
            }
            None
        })
        .into_iter()
        .flatten()
        .next();
        if let Some((p, q, r)) = violation {
            return Err(Error::MetricViolation(format!(
                "triangle violated: dist({p}, {r}) = {dpr} > {dpq} + {dqr} via {q}",
                p = self.id(p),
                q = self.id(q),
                r = self.id(r),
                dpr = self.dist(p, r),
                dpq = self.dist(p, q),
                dqr = self.dist(q, r)
            )));
        }
        Ok(())
    }

    /// Induced metric on a subset of points, in the given order.
    pub fn subspace(&self, keep: &[u32]) -> Space {
        let ids: Vec<String> = keep.iter().map(|&i| self.ids[i as usize].clone()).collect();
        let labels = self
            .labels
            .iter()
            .filter(|(id, _)| ids.iter().any(|k| k == *id))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut flat = Vec::with_capacity(keep.len() * keep.len());
        for &i in keep {
            for &j in keep {
                flat.push(self.dist(i, j));
            }
        }
        Space::from_flat_unchecked(ids, flat, labels).expect("subspace ids stay unique")
    }

    /// Largest absolute discrepancy against another space with identical point
    /// lists, restricted to pairs allowed by `mask` (all pairs when `None`).
    pub fn max_discrepancy(&self, other: &Space, mask: Option<&[bool]>) -> Result<f64> {
        if self.ids != other.ids {
            return Err(Error::SpaceMismatch("point lists differ".into()));
        }
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            if mask.map_or(false, |m| !m[i]) {
                continue;
            }
            for j in (i + 1)..n {
                if mask.map_or(false, |m| !m[j]) {
                    continue;
                }
                let a = self.dist(i as u32, j as u32);
                let b = other.dist(i as u32, j as u32);
                let gap = if a == b { 0.0 } else { (a.value() - b.value()).abs() };
                worst = worst.max(gap);
            }
        }
        Ok(worst)
    }
}

/// Binary product with the sup metric, plus the two projections.
pub fn product_linf(a: &SpaceRef, b: &SpaceRef) -> (SpaceRef, MappedPair, MappedPair) {
    let na = a.len();
    let nb = b.len();
    let mut ids = Vec::with_capacity(na * nb);
    let mut to_a = Vec::with_capacity(na * nb);
    let mut to_b = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            ids.push(format!("({},{})", a.id(i as u32), b.id(j as u32)));
            to_a.push(i as u32);
            to_b.push(j as u32);
        }
    }
    let space = Space::from_fn_unchecked(ids, |p, q| {
        let da = a.dist(to_a[p], to_a[q]);
        let db = b.dist(to_b[p], to_b[q]);
        da.max(db)
    });
    let space = Arc::new(space);
    let p1 = MappedPair::new(space.clone(), a.clone(), to_a).expect("projection is total");
    let p2 = MappedPair::new(space.clone(), b.clone(), to_b).expect("projection is total");
    (space, p1, p2)
}

/// Disjoint union with infinite cross-distances, plus the two inclusions.
/// Point ids are prefixed to keep the union collision-free.
pub fn coproduct(a: &SpaceRef, b: &SpaceRef) -> (SpaceRef, MappedPair, MappedPair) {
    let na = a.len();
    let nb = b.len();
    let mut ids = Vec::with_capacity(na + nb);
    for i in 0..na {
        ids.push(format!("L:{}", a.id(i as u32)));
    }
    for j in 0..nb {
        ids.push(format!("R:{}", b.id(j as u32)));
    }
    let space = Space::from_fn_unchecked(ids, |p, q| {
        if p < na && q < na {
            a.dist(p as u32, q as u32)
        } else if p >= na && q >= na {
            b.dist((p - na) as u32, (q - na) as u32)
        } else {
            Dist::INF
        }
    });
    let space = Arc::new(space);
    let inc_a = MappedPair::new(a.clone(), space.clone(), (0..na as u32).collect())
        .expect("inclusion is total");
    let inc_b = MappedPair::new(
        b.clone(),
        space.clone(),
        (na as u32..(na + nb) as u32).collect(),
    )
    .expect("inclusion is total");
    (space, inc_a, inc_b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points(d: f64) -> SpaceRef {
        Arc::new(
            Space::new(
                vec!["u".into(), "v".into()],
                vec![
                    vec![Dist::ZERO, Dist::from_raw(d)],
                    vec![Dist::from_raw(d), Dist::ZERO],
                ],
                BTreeMap::new(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn rejects_asymmetry() {
        let r = Space::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![Dist::ZERO, Dist::ONE],
                vec![Dist::from_raw(2.0), Dist::ZERO],
            ],
            BTreeMap::new(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn rejects_indiscernible_pair() {
        let r = Space::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![Dist::ZERO, Dist::ZERO],
                vec![Dist::ZERO, Dist::ZERO],
            ],
            BTreeMap::new(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn rejects_triangle_violation() {
        let d = |v: f64| Dist::from_raw(v);
        let r = Space::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![d(0.0), d(1.0), d(5.0)],
                vec![d(1.0), d(0.0), d(1.0)],
                vec![d(5.0), d(1.0), d(0.0)],
            ],
            BTreeMap::new(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn inf_does_not_bind_triangle() {
        let d = |v: f64| Dist::from_raw(v);
        let r = Space::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![d(0.0), Dist::INF, d(5.0)],
                vec![Dist::INF, d(0.0), Dist::INF],
                vec![d(5.0), Dist::INF, d(0.0)],
            ],
            BTreeMap::new(),
        );
        assert!(r.is_ok());
    }

    #[test]
    fn product_with_point_is_isometric() {
        let x = two_points(3.0);
        let pt = Arc::new(Space::point("pt"));
        let (prod, p1, _) = product_linf(&x, &pt);
        assert_eq!(prod.len(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(prod.dist(i, j), x.dist(p1.apply(i), p1.apply(j)));
            }
        }
    }

    #[test]
    fn product_pair_distances() {
        // dists {1, 3} -> pairwise distances {1, 3, 3} on the 4-point square
        let x = two_points(1.0);
        let y = two_points(3.0);
        let (prod, _, _) = product_linf(&x, &y);
        let mut ds: Vec<f64> = prod.realized_distances().iter().map(|d| d.value()).collect();
        ds.sort_by(f64::total_cmp);
        assert_eq!(ds, vec![1.0, 3.0]);
        // slice isometry: dist((x,y),(x',y)) = dist_X(x,x')
        assert_eq!(prod.dist(0, 2), x.dist(0, 1));
    }

    #[test]
    fn coproduct_cross_distances_are_infinite() {
        let x = Arc::new(Space::point("a"));
        let y = Arc::new(Space::point("b"));
        let (s, ia, ib) = coproduct(&x, &y);
        assert_eq!(s.dist(ia.apply(0), ib.apply(0)), Dist::INF);
    }

    #[test]
    fn coproduct_with_empty_is_isometric() {
        let x = two_points(2.0);
        let e = Arc::new(Space::empty());
        let (s, ia, _) = coproduct(&x, &e);
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(ia.apply(0), ia.apply(1)), x.dist(0, 1));
    }
}
