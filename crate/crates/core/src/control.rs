//! Control profiles and affine witnesses.
//!
//! Controls are only ever evaluated on realized distances: `upper(t)` is the
//! exact max image distance over source pairs at distance <= t, for t ranging
//! over the finite set of realized source distances, and `lower(R)` is the
//! exact max source distance over pairs with image distance <= R. Nothing
//! here claims to decide controlledness in the asymptotic sense.

use serde::Serialize;

use crate::dist::{le_with, Dist};
use crate::error::{Error, Result};
use crate::map::MappedPair;

/// Realized-grid envelopes of a map, plus its surjectivity radius.
#[derive(Debug, Clone, Serialize)]
pub struct ControlProfile {
    /// (t, max target distance over source pairs with d_X <= t), t realized.
    pub upper: Vec<(Dist, Dist)>,
    /// (R, max source distance over pairs with d_Y(fx, fx') <= R), R realized.
    /// The value is infinite when such a pair has infinite source distance.
    pub lower: Vec<(Dist, Dist)>,
    /// Min r with N_r(f(X)) = Y.
    pub surjectivity_radius: Dist,
}

/// Computes both envelopes by a single sweep over source pairs.
pub fn control_profile(f: &MappedPair) -> ControlProfile {
    let x = f.source();
    let y = f.target();
    let n = x.len();
    // (d_X, d_Y) over unordered source pairs
    let mut pairs: Vec<(Dist, Dist)> = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            pairs.push((x.dist(i, j), y.dist(f.apply(i), f.apply(j))));
        }
    }

    let mut upper = Vec::new();
    {
        let mut by_dx: Vec<&(Dist, Dist)> =
            pairs.iter().filter(|(dx, _)| dx.is_finite()).collect();
        by_dx.sort_by_key(|(dx, _)| *dx);
        let mut running = Dist::ZERO;
        for (k, (dx, dy)) in by_dx.iter().enumerate() {
            running = running.max(*dy);
            let last_of_grid_value = by_dx.get(k + 1).map_or(true, |(nx, _)| nx != dx);
            if last_of_grid_value {
                upper.push((*dx, running));
            }
        }
    }

    let mut lower = Vec::new();
    {
        let mut by_dy: Vec<&(Dist, Dist)> =
            pairs.iter().filter(|(_, dy)| dy.is_finite()).collect();
        by_dy.sort_by_key(|(_, dy)| *dy);
        let mut running = Dist::ZERO;
        for (k, (dx, dy)) in by_dy.iter().enumerate() {
            running = running.max(*dx);
            let last_of_grid_value = by_dy.get(k + 1).map_or(true, |(_, ny)| ny != dy);
            if last_of_grid_value {
                lower.push((*dy, running));
            }
        }
    }

    ControlProfile {
        upper,
        lower,
        surjectivity_radius: f.surjectivity_radius(),
    }
}

/// An affine control candidate t -> a*t + b.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AffineWitness {
    pub slope: f64,
    pub offset: f64,
}

impl AffineWitness {
    pub fn new(slope: f64, offset: f64) -> Result<AffineWitness> {
        if !(slope >= 0.0) || !(offset >= 0.0) {
            return Err(Error::BadParameter(format!(
                "affine witness needs nonnegative slope and offset, got ({slope}, {offset})"
            )));
        }
        Ok(AffineWitness { slope, offset })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.slope * t + self.offset
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairViolation {
    pub p: String,
    pub q: String,
    /// d_Y - (a d_X + b); infinite when d_Y is infinite on a finite-d_X pair.
    pub excess: Dist,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperControlCheck {
    pub witness: AffineWitness,
    pub holds: bool,
    /// The pair maximizing the excess, when any pair violates.
    pub worst: Option<PairViolation>,
}

/// Verifies d_Y(fx, fx') <= a d_X(x, x') + b over every source pair with
/// finite d_X. On failure reports an extremal counterexample.
pub fn check_affine_upper(f: &MappedPair, witness: AffineWitness) -> UpperControlCheck {
    let x = f.source();
    let y = f.target();
    let tol = x.tol().max(y.tol());
    let n = x.len() as u32;
    let mut worst: Option<(u32, u32, f64)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x.dist(i, j);
            if !dx.is_finite() {
                continue;
            }
            let dy = y.dist(f.apply(i), f.apply(j));
            let excess = dy.value() - witness.eval(dx.value());
            if excess > tol && worst.map_or(true, |(_, _, e)| excess > e) {
                worst = Some((i, j, excess));
            }
        }
    }
    UpperControlCheck {
        witness,
        holds: worst.is_none(),
        worst: worst.map(|(i, j, e)| PairViolation {
            p: x.id(i).to_string(),
            q: x.id(j).to_string(),
            excess: Dist::from_raw(e.max(0.0)),
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum LowerFit {
    /// Minimal b >= 0 with a d_X - b <= d_Y on all pairs of the window.
    Feasible { offset: f64 },
    /// Some pair has finite target distance but infinite source distance, so
    /// no affine lower control exists; carries the violating pair.
    Infeasible { p: String, q: String },
}

/// For each slope, the minimal feasible offset of an affine lower control on
/// the realized window.
pub fn min_affine_lower(f: &MappedPair, slopes: &[f64]) -> Vec<(f64, LowerFit)> {
    let x = f.source();
    let y = f.target();
    let n = x.len() as u32;
    // Scan once: the binding pair maximizes a*d_X - d_Y.
    let mut finite_pairs: Vec<(f64, f64)> = Vec::new();
    let mut infinite_witness: Option<(u32, u32)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x.dist(i, j);
            let dy = y.dist(f.apply(i), f.apply(j));
            if dx.is_finite() {
                if dy.is_finite() {
                    finite_pairs.push((dx.value(), dy.value()));
                }
                // finite d_X with infinite d_Y satisfies any lower bound
            } else if dy.is_finite() {
                infinite_witness.get_or_insert((i, j));
            }
        }
    }
    slopes
        .iter()
        .map(|&a| {
            if let Some((i, j)) = infinite_witness {
                return (
                    a,
                    LowerFit::Infeasible {
                        p: x.id(i).to_string(),
                        q: x.id(j).to_string(),
                    },
                );
            }
            let mut b = 0.0f64;
            for &(dx, dy) in &finite_pairs {
                b = b.max(a * dx - dy);
            }
            (a, LowerFit::Feasible { offset: b })
        })
        .collect()
}

/// Minimal offset making (slope, offset) a valid affine upper control, or
/// `None` when no affine upper control with this slope exists (a finite-d_X
/// pair with infinite d_Y).
pub fn fit_min_upper_offset(f: &MappedPair, slope: f64) -> Option<f64> {
    let x = f.source();
    let y = f.target();
    let n = x.len() as u32;
    let mut b = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x.dist(i, j);
            if !dx.is_finite() {
                continue;
            }
            let dy = y.dist(f.apply(i), f.apply(j));
            if !dy.is_finite() {
                return None;
            }
            b = b.max(dy.value() - slope * dx.value());
        }
    }
    Some(b)
}

/// Envelope consistency: the upper envelope is pointwise minimal, i.e. some
/// pair attains each recorded value. Used by tests and the classify report.
pub fn upper_envelope_attained(f: &MappedPair, profile: &ControlProfile) -> bool {
    let x = f.source();
    let y = f.target();
    let tol = x.tol().max(y.tol());
    profile.upper.iter().all(|&(t, v)| {
        let n = x.len() as u32;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = x.dist(i, j);
                if dx.is_finite()
                    && le_with(dx, t, tol)
                    && crate::dist::eq_with(y.dist(f.apply(i), f.apply(j)), v, tol)
                {
                    return true;
                }
            }
        }
        false
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::MappedPair;
    use crate::space::Space;
    use std::sync::Arc;

    fn segment(n: u32) -> crate::space::SpaceRef {
        let ids = (0..=n).map(|i| i.to_string()).collect();
        Arc::new(Space::from_fn_unchecked(ids, |i, j| {
            Dist::from_raw((i as f64 - j as f64).abs())
        }))
    }

    #[test]
    fn identity_profile_is_diagonal() {
        let x = segment(4);
        let f = MappedPair::identity(&x);
        let p = control_profile(&f);
        assert_eq!(p.surjectivity_radius, Dist::ZERO);
        for (t, v) in p.upper {
            assert_eq!(t, v);
        }
        for (r, s) in p.lower {
            assert_eq!(r, s);
        }
    }

    #[test]
    fn constant_map_to_point_has_zero_upper() {
        let x = segment(3);
        let pt = Arc::new(Space::point("p"));
        let f = MappedPair::new(x, pt, vec![0; 4]).unwrap();
        let p = control_profile(&f);
        assert!(p.upper.iter().all(|&(_, v)| v == Dist::ZERO));
    }

    #[test]
    fn identity_affine_bounds() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        assert!(check_affine_upper(&f, AffineWitness::new(1.0, 0.0).unwrap()).holds);
        let fits = min_affine_lower(&f, &[1.0, 0.5]);
        for (a, fit) in fits {
            match fit {
                LowerFit::Feasible { offset } => assert_eq!(offset, 0.0, "slope {a}"),
                LowerFit::Infeasible { .. } => panic!("identity cannot be infeasible"),
            }
        }
    }

    #[test]
    fn infeasible_on_infinite_source_distance() {
        // two-component source mapping into a segment
        let ids = vec!["a".into(), "b".into()];
        let x = Arc::new(Space::from_fn_unchecked(ids, |i, j| {
            if i == j {
                Dist::ZERO
            } else {
                Dist::INF
            }
        }));
        let y = segment(1);
        let f = MappedPair::new(x, y, vec![0, 1]).unwrap();
        let fits = min_affine_lower(&f, &[1.0]);
        assert!(matches!(fits[0].1, LowerFit::Infeasible { .. }));
    }

    #[test]
    fn upper_check_reports_extremal_pair() {
        let x = segment(3);
        let y = segment(3);
        // stretch: 0,1,2,3 -> 0,3,3,3 via map i -> min(3, 3i)
        let f = MappedPair::new(x, y, vec![0, 3, 3, 3]).unwrap();
        let check = check_affine_upper(&f, AffineWitness::new(1.0, 0.0).unwrap());
        assert!(!check.holds);
        let worst = check.worst.unwrap();
        assert_eq!(worst.excess, Dist::from_raw(2.0)); // pair (0,1): 3 - 1
    }
}
