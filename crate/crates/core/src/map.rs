//! Maps between spaces.
//!
//! A [`MappedPair`] is a total function between two spaces with its preimage
//! index cached; it plays the role of f: X -> Y throughout.

use std::collections::BTreeMap;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::SpaceRef;

#[derive(Debug, Clone)]
pub struct MappedPair {
    source: SpaceRef,
    target: SpaceRef,
    map: Vec<u32>,
    preimages: Vec<Vec<u32>>,
}

impl MappedPair {
    pub fn new(source: SpaceRef, target: SpaceRef, map: Vec<u32>) -> Result<MappedPair> {
        if map.len() != source.len() {
            return Err(Error::BadMap(format!(
                "assignment covers {} of {} source points",
                map.len(),
                source.len()
            )));
        }
        let mut preimages = vec![Vec::new(); target.len()];
        for (i, &j) in map.iter().enumerate() {
            let slot = preimages.get_mut(j as usize).ok_or_else(|| {
                Error::BadMap(format!(
                    "source point {} maps to out-of-range index {}",
                    source.id(i as u32),
                    j
                ))
            })?;
            slot.push(i as u32);
        }
        Ok(MappedPair { source, target, map, preimages })
    }

    /// Builds from an id -> id assignment table.
    pub fn from_assign(
        source: SpaceRef,
        target: SpaceRef,
        assign: &BTreeMap<String, String>,
    ) -> Result<MappedPair> {
        let mut map = Vec::with_capacity(source.len());
        for id in source.ids() {
            let tid = assign.get(id).ok_or_else(|| {
                Error::BadMap(format!("assignment missing source point {id:?}"))
            })?;
            let j = target.index_of(tid).ok_or_else(|| {
                Error::BadMap(format!("assignment sends {id:?} to unknown point {tid:?}"))
            })?;
            map.push(j);
        }
        MappedPair::new(source, target, map)
    }

    pub fn identity(space: &SpaceRef) -> MappedPair {
        MappedPair::new(space.clone(), space.clone(), (0..space.len() as u32).collect())
            .expect("identity is total")
    }

    /// The underlying identity between two metrics on the same point list.
    pub fn underlying_identity(source: SpaceRef, target: SpaceRef) -> Result<MappedPair> {
        if source.ids() != target.ids() {
            return Err(Error::SpaceMismatch(
                "underlying identity requires identical point lists".into(),
            ));
        }
        let n = source.len() as u32;
        MappedPair::new(source, target, (0..n).collect())
    }

    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef {
        &self.target
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.map[i as usize]
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn preimages(&self, j: u32) -> &[u32] {
        &self.preimages[j as usize]
    }

    /// Target indices hit by the map, in target order.
    pub fn image_indices(&self) -> Vec<u32> {
        (0..self.target.len() as u32)
            .filter(|&j| !self.preimages[j as usize].is_empty())
            .collect()
    }

    pub fn image_mask(&self) -> Vec<bool> {
        (0..self.target.len())
            .map(|j| !self.preimages[j].is_empty())
            .collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.preimages.iter().all(|p| !p.is_empty())
    }

    /// g . f, defined when f's target is g's source.
    pub fn then(&self, g: &MappedPair) -> Result<MappedPair> {
        if !same_space(&self.target, &g.source) {
            return Err(Error::SpaceMismatch(
                "composition requires matching intermediate spaces".into(),
            ));
        }
        let map = self.map.iter().map(|&i| g.map[i as usize]).collect();
        MappedPair::new(self.source.clone(), g.target.clone(), map)
    }

    /// Min distance in the target between `j` and the image of the map.
    pub fn dist_to_image(&self, j: u32) -> Dist {
        let mut best = Dist::INF;
        for (k, pre) in self.preimages.iter().enumerate() {
            if !pre.is_empty() {
                best = best.min(self.target.dist(j, k as u32));
            }
        }
        best
    }

    /// Min r with N_r(f(X)) = Y; infinite when some target point sees no image
    /// point at finite distance (or when the source is empty and the target is
    /// not).
    pub fn surjectivity_radius(&self) -> Dist {
        let mut r = Dist::ZERO;
        for j in 0..self.target.len() as u32 {
            r = r.max(self.dist_to_image(j));
        }
        r
    }

    /// Exact min over preimage pairs of the source distance.
    pub fn preimage_distance(&self, y: u32, y2: u32) -> Dist {
        let mut best = Dist::INF;
        for &a in self.preimages(y) {
            for &b in self.preimages(y2) {
                best = best.min(self.source.dist(a, b));
            }
        }
        best
    }
}

pub(crate) fn same_space(a: &SpaceRef, b: &SpaceRef) -> bool {
    std::sync::Arc::ptr_eq(a, b) || **a == **b
}

/// sup over source points of the target distance between the two images.
/// The maps must share source and target.
pub fn closeness_distance(f: &MappedPair, g: &MappedPair) -> Result<Dist> {
    if !same_space(&f.source, &g.source) || !same_space(&f.target, &g.target) {
        return Err(Error::SpaceMismatch(
            "closeness needs a parallel pair: shared source and target".into(),
        ));
    }
    let mut sup = Dist::ZERO;
    for i in 0..f.source.len() as u32 {
        sup = sup.max(f.target.dist(f.apply(i), g.apply(i)));
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use std::sync::Arc;

    fn segment(n: u32) -> SpaceRef {
        // integer points 0..=n with |i - j|
        let ids = (0..=n).map(|i| i.to_string()).collect();
        Arc::new(Space::from_fn_unchecked(ids, |i, j| {
            Dist::from_raw((i as f64 - j as f64).abs())
        }))
    }

    #[test]
    fn closeness_of_identical_maps_is_zero() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        assert_eq!(closeness_distance(&f, &f).unwrap(), Dist::ZERO);
    }

    #[test]
    fn closeness_of_constant_maps() {
        let x = segment(3);
        let y = segment(3);
        let f = MappedPair::new(x.clone(), y.clone(), vec![0; 4]).unwrap();
        let g = MappedPair::new(x.clone(), y.clone(), vec![3; 4]).unwrap();
        assert_eq!(closeness_distance(&f, &g).unwrap(), Dist::from_raw(3.0));
    }

    #[test]
    fn closeness_rejects_mismatched_pairs() {
        let x = segment(2);
        let y = segment(3);
        let f = MappedPair::identity(&x);
        let g = MappedPair::identity(&y);
        assert!(closeness_distance(&f, &g).is_err());
    }

    #[test]
    fn preimages_partition_the_source() {
        let x = segment(4);
        let y = segment(2);
        let f = MappedPair::new(x.clone(), y.clone(), vec![0, 0, 1, 2, 2]).unwrap();
        let sizes: Vec<usize> = (0..3).map(|j| f.preimages(j).len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 5);
        assert!(f.is_surjective());
        assert_eq!(f.preimage_distance(0, 2), Dist::from_raw(2.0));
    }

    #[test]
    fn surjectivity_radius_of_identity_is_zero() {
        let x = segment(4);
        assert_eq!(MappedPair::identity(&x).surjectivity_radius(), Dist::ZERO);
    }

    #[test]
    fn empty_source_nonempty_target_has_infinite_radius() {
        let e = Arc::new(Space::empty());
        let y = segment(1);
        let f = MappedPair::new(e, y, vec![]).unwrap();
        assert_eq!(f.surjectivity_radius(), Dist::INF);
    }
}
