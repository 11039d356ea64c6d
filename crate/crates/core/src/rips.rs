//! Augmented weighted Rips graphs and the derived metrics.
//!
//! Given a coarsely surjective map f: X -> Y and a weight function theta, the
//! augmented Rips graph at scale sigma has vertex set Y, an internal edge of
//! weight theta(d_Y) for each finite pair within sigma, and an augmented edge
//! of weight d_X(f^-1 y, f^-1 y') + 1 for each finite pair of image points.
//! Its path metric is the candidate relatively maximal metric on Y.
//!
//! The check_* functions make the quantitative content of that construction
//! executable with its exact constants: the quotient-to-image comparison
//! (upper factor theta(sigma) + 1, lower control t -> (t - 1) / 2), the
//! image retraction (doubling factor C, retraction identities, cosurjective
//! weight at most theta(r)), and the edge bound rho(w) + w on the way back to
//! the original metric.

use serde::Serialize;

use std::sync::Arc;

use crate::control::{check_affine_upper, fit_min_upper_offset, AffineWitness};
use crate::dist::{le_with, Dist};
use crate::error::{Error, Result};
use crate::filtration::quotient_space;
use crate::graph::{EdgeKind, WeightedGraph};
use crate::map::MappedPair;
use crate::space::{Space, SpaceRef};
use crate::trend::fit_line;

/// Internal edges whose weight would exceed this cap are omitted; any desk
/// scale instance has far cheaper detours, and the omission count is part of
/// the construction report.
pub const DEFAULT_WEIGHT_CAP: f64 = (1u64 << 40) as f64;

/// Weight function theta: [0, inf) -> [1, inf), increasing.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFn {
    /// t -> 2^t
    Exp2,
    /// t -> 1
    One,
    /// t -> t + 1
    LinearPlus,
    /// Step table of (t, theta(t)) with t_0 = 0; value of the greatest entry
    /// at or below the argument.
    Table(Vec<(f64, f64)>),
}

impl WeightFn {
    pub fn table(entries: Vec<(f64, f64)>) -> Result<WeightFn> {
        if entries.first().map_or(true, |&(t, _)| t != 0.0) {
            return Err(Error::BadParameter("weight table must start at t = 0".into()));
        }
        let increasing_t = entries.windows(2).all(|w| w[0].0 < w[1].0);
        let nondecreasing_v = entries.windows(2).all(|w| w[0].1 <= w[1].1);
        let at_least_one = entries.iter().all(|&(_, v)| v >= 1.0);
        if !increasing_t || !nondecreasing_v || !at_least_one {
            return Err(Error::BadParameter(
                "weight table must be increasing with values >= 1".into(),
            ));
        }
        Ok(WeightFn::Table(entries))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            WeightFn::Exp2 => t.exp2(),
            WeightFn::One => 1.0,
            WeightFn::LinearPlus => t + 1.0,
            WeightFn::Table(entries) => {
                let mut v = entries[0].1;
                for &(ti, vi) in entries {
                    if ti <= t {
                        v = vi;
                    } else {
                        break;
                    }
                }
                v
            }
        }
    }

    /// A constant C with theta(t + 2r) <= C theta(t). Closed-form for the
    /// built-in shapes; for tables, the max ratio over the supplied grid
    /// (valid on that grid only).
    pub fn doubling_certificate(&self, r: f64, grid: &[f64]) -> Option<f64> {
        match self {
            WeightFn::Exp2 => Some((2.0 * r).exp2()),
            WeightFn::One => Some(1.0),
            WeightFn::LinearPlus => Some(2.0 * r + 1.0),
            WeightFn::Table(_) => {
                let mut c = 1.0f64;
                for &t in grid {
                    c = c.max(self.eval(t + 2.0 * r) / self.eval(t));
                }
                Some(c)
            }
        }
    }

    /// Whether t <= theta(t) holds on every grid value.
    pub fn dominates_identity_on(&self, grid: &[f64]) -> std::result::Result<(), f64> {
        for &t in grid {
            if t > self.eval(t) {
                return Err(t);
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightFn::Exp2 => "exp2",
            WeightFn::One => "one",
            WeightFn::LinearPlus => "linear",
            WeightFn::Table(_) => "table",
        }
    }
}

/// An augmented Rips graph with its path metric.
pub struct RipsComplex {
    pub graph: WeightedGraph,
    /// (Y, del^theta_sigma)
    pub space: SpaceRef,
    /// Mask of image points of f among the vertices of Y.
    pub image: Vec<bool>,
    /// Surjectivity radius of f.
    pub radius: Dist,
    pub sigma: Dist,
    pub cap: f64,
    pub omitted_internal: usize,
}

impl RipsComplex {
    /// Path metric of the complete subgraph spanned by the image points.
    pub fn image_space(&self) -> Space {
        let keep: Vec<u32> = (0..self.image.len() as u32)
            .filter(|&j| self.image[j as usize])
            .collect();
        let ids = keep
            .iter()
            .map(|&j| self.graph.ids()[j as usize].clone())
            .collect();
        let mut sub = WeightedGraph::new(ids).expect("image ids stay unique");
        let pos: std::collections::HashMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(p, &j)| (j, p as u32))
            .collect();
        for (u, v, w, kind) in self.graph.edges() {
            if let (Some(&pu), Some(&pv)) = (pos.get(&u), pos.get(&v)) {
                sub.add_edge(pu, pv, w, kind).expect("copying valid edges");
            }
        }
        sub.path_metric()
    }
}

/// Builds Rips^theta_sigma(Y; f). Requires f coarsely surjective; sigma may
/// be infinite, in which case all finite pairs receive internal edges.
pub fn augmented_rips(
    f: &MappedPair,
    theta: &WeightFn,
    sigma: Dist,
    cap: f64,
) -> Result<RipsComplex> {
    let y = f.target();
    let radius = f.surjectivity_radius();
    if radius.is_infinite() {
        return Err(Error::NotCoarselySurjective("augmented Rips input".into()));
    }
    let tol = y.tol();
    let n = y.len() as u32;
    let mut graph = WeightedGraph::new(y.ids().to_vec())?;
    let mut omitted = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = y.dist(i, j);
            if d.is_finite() && le_with(d, sigma, tol) {
                let w = theta.eval(d.value());
                if w <= cap {
                    graph.add_edge(i, j, Dist::from_raw(w), EdgeKind::Internal)?;
                } else {
                    omitted += 1;
                }
            }
        }
    }
    let image = f.image_mask();
    let image_indices: Vec<u32> = (0..n).filter(|&j| image[j as usize]).collect();
    for (a, &u) in image_indices.iter().enumerate() {
        for &v in &image_indices[a + 1..] {
            if y.dist(u, v).is_finite() {
                let pre = f.preimage_distance(u, v);
                if pre.is_finite() {
                    graph.add_edge(u, v, pre + Dist::ONE, EdgeKind::Augmented)?;
                }
            }
        }
    }
    let space = Arc::new(graph.path_metric());
    Ok(RipsComplex { graph, space, image, radius, sigma, cap, omitted_internal: omitted })
}

/// Path metric of the subgraph spanned by f(X).
pub fn image_subspace(f: &MappedPair, theta: &WeightFn, sigma: Dist, cap: f64) -> Result<Space> {
    Ok(augmented_rips(f, theta, sigma, cap)?.image_space())
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub claimed: f64,
    pub holds: bool,
    /// Worst pair and its excess over the bound, when violated.
    pub worst: Option<(String, String, f64)>,
}

impl BoundCheck {
    fn from_worst(claimed: f64, worst: Option<(String, String, f64)>) -> BoundCheck {
        BoundCheck { claimed, holds: worst.is_none(), worst }
    }
}

/// Comparison Q_sigma(f) -> U^theta_sigma with the exact constants: upper
/// factor theta(sigma) + 1 and lower control t -> (t - 1) / 2, checked over
/// every pair.
#[derive(Debug, Clone, Serialize)]
pub struct ExtQiReport {
    pub sigma: Dist,
    pub upper: BoundCheck,
    pub lower: BoundCheck,
}

impl ExtQiReport {
    pub fn pass(&self) -> bool {
        self.upper.holds && self.lower.holds
    }
}

pub fn check_ext_qi(
    f: &MappedPair,
    theta: &WeightFn,
    sigma: Dist,
    cap: f64,
) -> Result<ExtQiReport> {
    if sigma.is_infinite() {
        return Err(Error::BadParameter("the quotient comparison needs finite sigma".into()));
    }
    let complex = augmented_rips(f, theta, sigma, cap)?;
    let u_space = complex.image_space();
    let x = f.source();
    let y = f.target();
    let tol = x.tol().max(y.tol());
    // position of each image point of Y inside U
    let mut u_index = vec![u32::MAX; y.len()];
    let mut next = 0u32;
    for j in 0..y.len() {
        if complex.image[j] {
            u_index[j] = next;
            next += 1;
        }
    }
    let quotient = quotient_space(f, sigma);
    let q = &quotient.space;
    let n = x.len() as u32;
    let upper_factor = theta.eval(sigma.value()) + 1.0;
    let tol_upper = tol * (1.0 + upper_factor);

    let mut worst_upper: Option<(u32, u32, f64)> = None;
    let mut worst_lower: Option<(u32, u32, f64)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let dq = q.dist(i, j);
            let du = u_space.dist(u_index[f.apply(i) as usize], u_index[f.apply(j) as usize]);
            if dq.is_finite() {
                let excess = du.value() - upper_factor * dq.value();
                if excess > tol_upper && worst_upper.map_or(true, |(_, _, e)| excess > e) {
                    worst_upper = Some((i, j, excess));
                }
            }
            if du.is_finite() {
                let excess = dq.value() - (2.0 * du.value() + 1.0);
                if excess > 3.0 * tol && worst_lower.map_or(true, |(_, _, e)| excess > e) {
                    worst_lower = Some((i, j, excess));
                }
            }
        }
    }
    let named = |w: Option<(u32, u32, f64)>| {
        w.map(|(i, j, e)| (x.id(i).to_string(), x.id(j).to_string(), e))
    };
    Ok(ExtQiReport {
        sigma,
        upper: BoundCheck::from_worst(upper_factor, named(worst_upper)),
        lower: BoundCheck::from_worst(2.0, named(worst_lower)),
    })
}

/// Retraction comparison U^theta_sigma <-> Y^theta_sigma with doubling
/// constant C: edgewise C-Lipschitzness of the nearest-image retraction phi,
/// the retraction identities, and the cosurjectivity weight theta(r).
#[derive(Debug, Clone, Serialize)]
pub struct ImageQiReport {
    pub sigma: Dist,
    pub radius: Dist,
    pub doubling_constant: f64,
    pub phi_lipschitz: BoundCheck,
    pub phi_fixes_image: bool,
    pub iota_one_lipschitz: BoundCheck,
    /// Max over vertices of the cheapest internal edge into the image.
    pub cosurjective_weight: Dist,
    pub theta_of_radius: Dist,
}

impl ImageQiReport {
    pub fn pass(&self) -> bool {
        self.phi_lipschitz.holds
            && self.phi_fixes_image
            && self.iota_one_lipschitz.holds
            && self.cosurjective_weight <= self.theta_of_radius
    }
}

pub fn check_image_qi(
    f: &MappedPair,
    theta: &WeightFn,
    sigma: Dist,
    cap: f64,
) -> Result<ImageQiReport> {
    let complex = augmented_rips(f, theta, sigma, cap)?;
    let y = f.target();
    let tol = y.tol();
    let radius = complex.radius;
    if sigma < radius {
        return Err(Error::SigmaBelowRadius { sigma: sigma.value(), r: radius.value() });
    }
    let grid: Vec<f64> = y.realized_distances().iter().map(|d| d.value()).collect();
    let c = theta
        .doubling_certificate(radius.value(), &grid)
        .ok_or(Error::NoDoublingCertificate(radius.value()))?;

    let u_space = complex.image_space();
    let n = y.len() as u32;
    let mut u_index = vec![u32::MAX; y.len()];
    let mut next = 0u32;
    for j in 0..y.len() {
        if complex.image[j] {
            u_index[j] = next;
            next += 1;
        }
    }
    // nearest image point, ties broken towards the smallest point id
    let phi: Vec<u32> = (0..n)
        .map(|j| {
            let mut best: Option<(Dist, &str, u32)> = None;
            for u in 0..n {
                if !complex.image[u as usize] {
                    continue;
                }
                let d = y.dist(j, u);
                let candidate = (d, y.id(u), u);
                let better = match &best {
                    None => true,
                    Some((bd, bid, _)) => {
                        candidate.0 < *bd || (candidate.0 == *bd && candidate.1 < *bid)
                    }
                };
                if better {
                    best = Some(candidate);
                }
            }
            best.expect("coarse surjectivity guarantees a nonempty image").2
        })
        .collect();

    let phi_fixes_image =
        (0..n).all(|j| !complex.image[j as usize] || phi[j as usize] == j);

    let mut worst_phi: Option<(u32, u32, f64)> = None;
    for (u, v, w, _) in complex.graph.edges() {
        let du = u_space.dist(u_index[phi[u as usize] as usize], u_index[phi[v as usize] as usize]);
        let excess = du.value() - c * w.value();
        if excess > tol * (1.0 + c) && worst_phi.map_or(true, |(_, _, e)| excess > e) {
            worst_phi = Some((u, v, excess));
        }
    }

    let mut worst_iota: Option<(u32, u32, f64)> = None;
    for u in 0..n {
        if !complex.image[u as usize] {
            continue;
        }
        for v in (u + 1)..n {
            if !complex.image[v as usize] {
                continue;
            }
            let through_y = complex.space.dist(u, v);
            let within_u = u_space.dist(u_index[u as usize], u_index[v as usize]);
            if within_u.is_finite() {
                let excess = through_y.value() - within_u.value();
                if excess > tol && worst_iota.map_or(true, |(_, _, e)| excess > e) {
                    worst_iota = Some((u, v, excess));
                }
            }
        }
    }

    let mut cosurjective_weight = Dist::ZERO;
    for j in 0..n {
        if complex.image[j as usize] {
            continue;
        }
        let mut cheapest = Dist::INF;
        for u in 0..n {
            if complex.image[u as usize] && le_with(y.dist(j, u), radius, tol) {
                if let Some(w) = complex.graph.weight(j, u) {
                    cheapest = cheapest.min(w);
                }
            }
        }
        cosurjective_weight = cosurjective_weight.max(cheapest);
    }

    let named = |w: Option<(u32, u32, f64)>| {
        w.map(|(u, v, e)| (y.id(u).to_string(), y.id(v).to_string(), e))
    };
    Ok(ImageQiReport {
        sigma,
        radius,
        doubling_constant: c,
        phi_lipschitz: BoundCheck::from_worst(c, named(worst_phi)),
        phi_fixes_image,
        iota_one_lipschitz: BoundCheck::from_worst(1.0, named(worst_iota)),
        cosurjective_weight,
        theta_of_radius: Dist::from_raw(theta.eval(radius.value())),
    })
}

/// The way back to the original metric: every Rips edge of weight w connects
/// points with d_Y <= rho(w) + w for the verified affine upper control rho of
/// f, and del^theta_inf is dominated by theta(d_Y) pointwise.
#[derive(Debug, Clone, Serialize)]
pub struct LowerReport {
    pub witness: AffineWitness,
    pub edge_bound: BoundCheck,
    pub theta_dominates: BoundCheck,
}

impl LowerReport {
    pub fn pass(&self) -> bool {
        self.edge_bound.holds && self.theta_dominates.holds
    }
}

pub fn check_lower(
    f: &MappedPair,
    theta: &WeightFn,
    witness: AffineWitness,
    cap: f64,
) -> Result<LowerReport> {
    let y = f.target();
    let tol = y.tol();
    let upper = check_affine_upper(f, witness);
    if !upper.holds {
        let v = upper.worst.expect("violating pair accompanies a failed check");
        return Err(Error::InvalidWitness {
            a: witness.slope,
            b: witness.offset,
            p: v.p,
            q: v.q,
        });
    }
    let grid: Vec<f64> = y.realized_distances().iter().map(|d| d.value()).collect();
    if let Err(t) = theta.dominates_identity_on(&grid) {
        return Err(Error::WeightBelowIdentity(t));
    }
    let complex = augmented_rips(f, theta, Dist::INF, cap)?;

    let mut worst_edge: Option<(u32, u32, f64)> = None;
    for (u, v, w, _) in complex.graph.edges() {
        let bound = witness.eval(w.value()) + w.value();
        let excess = y.dist(u, v).value() - bound;
        if excess > tol * (2.0 + witness.slope) && worst_edge.map_or(true, |(_, _, e)| excess > e)
        {
            worst_edge = Some((u, v, excess));
        }
    }

    let mut worst_dom: Option<(u32, u32, f64)> = None;
    let n = y.len() as u32;
    for u in 0..n {
        for v in (u + 1)..n {
            let d = y.dist(u, v);
            if !d.is_finite() {
                continue;
            }
            let excess = complex.space.dist(u, v).value() - theta.eval(d.value());
            if excess > tol && worst_dom.map_or(true, |(_, _, e)| excess > e) {
                worst_dom = Some((u, v, excess));
            }
        }
    }

    let named = |w: Option<(u32, u32, f64)>| {
        w.map(|(u, v, e)| (y.id(u).to_string(), y.id(v).to_string(), e))
    };
    Ok(LowerReport {
        witness,
        edge_bound: BoundCheck::from_worst(witness.slope + 1.0, named(worst_edge)),
        theta_dominates: BoundCheck::from_worst(1.0, named(worst_dom)),
    })
}

/// Minimal b >= 0 with cod <= slope * dom + b over window pairs, or `None`
/// when some pair has finite dom but infinite cod. Slope must be positive.
pub fn min_offset_between(
    cod: &Space,
    dom: &Space,
    slope: f64,
    window: Option<&[bool]>,
) -> Option<f64> {
    assert!(slope > 0.0, "offset fits need a positive slope");
    let n = cod.len() as u32;
    let mut b = 0.0f64;
    for i in 0..n {
        if window.map_or(false, |w| !w[i as usize]) {
            continue;
        }
        for j in (i + 1)..n {
            if window.map_or(false, |w| !w[j as usize]) {
                continue;
            }
            let c = cod.dist(i, j);
            let d = dom.dist(i, j);
            if c.is_finite() {
                if d.is_finite() {
                    b = b.max(c.value() - slope * d.value());
                }
                // infinite dom satisfies any affine bound
            } else if d.is_finite() {
                return None;
            }
        }
    }
    Some(b)
}

/// Candidate relatively maximal metric (Y, del^theta_sigma) together with
/// per-arrow verification of the factorisation through the quotient, the
/// image subgraph, and the full Rips graph, plus affine comparisons against
/// d_Y in both directions.
#[derive(Debug, Serialize)]
pub struct MaximalMetricReport {
    pub sigma: Dist,
    pub radius: Dist,
    pub omitted_internal: usize,
    pub cap: f64,
    pub ext_qi: ExtQiReport,
    pub image_qi: ImageQiReport,
    /// del^theta_inf <= del^theta_sigma pointwise.
    pub inf_dominated: BoundCheck,
    pub lower: Option<LowerReport>,
    pub lower_skipped: Option<String>,
    /// (slope, minimal offset) for d_Y <= a * del + b on the window.
    pub d_y_vs_rips: Vec<(f64, Option<f64>)>,
    /// (slope, minimal offset) for del <= a * d_Y + b on the window.
    pub rips_vs_d_y: Vec<(f64, Option<f64>)>,
    #[serde(skip)]
    pub space: SpaceRef,
}

impl MaximalMetricReport {
    pub fn arrows_pass(&self) -> bool {
        self.ext_qi.pass()
            && self.image_qi.pass()
            && self.inf_dominated.holds
            && self.lower.as_ref().map_or(true, |l| l.pass())
    }
}

pub fn synthesize_maximal_metric(
    f: &MappedPair,
    theta: &WeightFn,
    sigma: Dist,
    cap: f64,
    slopes: &[f64],
    window: Option<&[bool]>,
) -> Result<MaximalMetricReport> {
    let y = f.target();
    let tol = y.tol();
    let complex = augmented_rips(f, theta, sigma, cap)?;
    let ext_qi = check_ext_qi(f, theta, sigma, cap)?;
    let image_qi = check_image_qi(f, theta, sigma, cap)?;
    let inf_complex = augmented_rips(f, theta, Dist::INF, cap)?;
    let mut worst_inf: Option<(u32, u32, f64)> = None;
    for i in 0..y.len() as u32 {
        for j in (i + 1)..y.len() as u32 {
            let a = inf_complex.space.dist(i, j);
            let b = complex.space.dist(i, j);
            if b.is_finite() {
                let excess = a.value() - b.value();
                if excess > tol && worst_inf.map_or(true, |(_, _, e)| excess > e) {
                    worst_inf = Some((i, j, excess));
                }
            } else if a.is_finite() {
                // fine: dropping internal edges beyond sigma may disconnect
            }
        }
    }
    let grid: Vec<f64> = y.realized_distances().iter().map(|d| d.value()).collect();
    let (lower, lower_skipped) = if theta.dominates_identity_on(&grid).is_err() {
        (None, Some("theta does not dominate t on the realized grid".to_string()))
    } else {
        match fit_min_upper_offset(f, 1.0) {
            Some(b) => (
                Some(check_lower(f, theta, AffineWitness::new(1.0, b)?, cap)?),
                None,
            ),
            None => (None, Some("no affine upper control at slope 1".to_string())),
        }
    };
    let d_y_vs_rips = slopes
        .iter()
        .map(|&a| (a, min_offset_between(y, &complex.space, a, window)))
        .collect();
    let rips_vs_d_y = slopes
        .iter()
        .map(|&a| (a, min_offset_between(&complex.space, y, a, window)))
        .collect();
    Ok(MaximalMetricReport {
        sigma,
        radius: complex.radius,
        omitted_internal: complex.omitted_internal,
        cap,
        ext_qi,
        image_qi,
        inf_dominated: BoundCheck::from_worst(
            1.0,
            worst_inf.map(|(i, j, e)| (y.id(i).to_string(), y.id(j).to_string(), e)),
        ),
        lower,
        lower_skipped,
        d_y_vs_rips,
        rips_vs_d_y,
        space: complex.space,
    })
}

/// One truncation of a metric comparison family: two metrics on the same
/// point list.
pub struct FamilyMember {
    pub param: f64,
    pub d: SpaceRef,
    pub d_prime: SpaceRef,
    pub window: Option<Vec<bool>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeTrend {
    pub slope: f64,
    /// (param, minimal offset) per truncation; `None` marks infeasibility.
    pub offsets: Vec<(f64, Option<f64>)>,
    /// Fitted growth of the offsets against the parameter.
    pub trend: Option<f64>,
    pub bounded: bool,
}

/// Verdict for "d precedes d'": per slope, the per-truncation minimal
/// offsets b with d <= a d' + b and their fitted growth. Consistency means
/// some slope keeps the offsets bounded (trend within tolerance); otherwise
/// the smallest divergence slope is reported.
#[derive(Debug, Clone, Serialize)]
pub struct PrecedesReport {
    pub per_slope: Vec<SlopeTrend>,
    pub consistent: bool,
    pub divergence: Option<f64>,
}

pub fn precedes_on_family(
    family: &[FamilyMember],
    slopes: &[f64],
    trend_tol: f64,
) -> Result<PrecedesReport> {
    if family.is_empty() {
        return Err(Error::BadParameter("empty truncation family".into()));
    }
    for m in family {
        if m.d.ids() != m.d_prime.ids() {
            return Err(Error::SpaceMismatch(
                "comparison metrics must share their point list".into(),
            ));
        }
    }
    let mut per_slope = Vec::new();
    for &a in slopes {
        let offsets: Vec<(f64, Option<f64>)> = family
            .iter()
            .map(|m| {
                (
                    m.param,
                    min_offset_between(&m.d, &m.d_prime, a, m.window.as_deref()),
                )
            })
            .collect();
        let trend = if offsets.iter().all(|(_, b)| b.is_some()) {
            let xs: Vec<f64> = offsets.iter().map(|&(p, _)| p).collect();
            let ys: Vec<f64> = offsets.iter().map(|&(_, b)| b.unwrap()).collect();
            Some(fit_line(&xs, &ys).slope)
        } else {
            None
        };
        let bounded = trend.map_or(false, |t| t.abs() <= trend_tol);
        per_slope.push(SlopeTrend { slope: a, offsets, trend, bounded });
    }
    let consistent = per_slope.iter().any(|s| s.bounded);
    let divergence = if consistent {
        None
    } else {
        per_slope
            .iter()
            .filter_map(|s| s.trend)
            .min_by(f64::total_cmp)
    };
    Ok(PrecedesReport { per_slope, consistent, divergence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::MappedPair;
    use std::sync::Arc;

    fn segment(n: u32) -> SpaceRef {
        let ids = (0..=n).map(|i| i.to_string()).collect();
        Arc::new(Space::from_fn_unchecked(ids, |i, j| {
            Dist::from_raw((i as f64 - j as f64).abs())
        }))
    }

    #[test]
    fn weight_functions_evaluate() {
        assert_eq!(WeightFn::Exp2.eval(3.0), 8.0);
        assert_eq!(WeightFn::One.eval(7.0), 1.0);
        assert_eq!(WeightFn::LinearPlus.eval(2.0), 3.0);
        let table = WeightFn::table(vec![(0.0, 1.0), (2.0, 4.0)]).unwrap();
        assert_eq!(table.eval(1.9), 1.0);
        assert_eq!(table.eval(2.0), 4.0);
    }

    #[test]
    fn doubling_constants() {
        assert_eq!(WeightFn::Exp2.doubling_certificate(2.0, &[]), Some(16.0));
        assert_eq!(WeightFn::One.doubling_certificate(2.0, &[]), Some(1.0));
        assert_eq!(WeightFn::LinearPlus.doubling_certificate(1.0, &[]), Some(3.0));
    }

    #[test]
    fn bijective_isometry_with_unit_weights_collapses() {
        let x = segment(4);
        let f = MappedPair::identity(&x);
        let complex =
            augmented_rips(&f, &WeightFn::One, Dist::from_raw(4.0), DEFAULT_WEIGHT_CAP).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(complex.space.dist(i, j), Dist::ONE);
                }
            }
        }
    }

    #[test]
    fn rips_chain_is_pointwise_ordered() {
        let x = segment(6);
        let f = MappedPair::identity(&x);
        let at = |sigma: Dist| {
            augmented_rips(&f, &WeightFn::Exp2, sigma, DEFAULT_WEIGHT_CAP)
                .unwrap()
                .space
        };
        let s2 = at(Dist::from_raw(2.0));
        let s4 = at(Dist::from_raw(4.0));
        let sinf = at(Dist::INF);
        for i in 0..7 {
            for j in 0..7 {
                assert!(sinf.dist(i, j) <= s4.dist(i, j));
                assert!(s4.dist(i, j) <= s2.dist(i, j));
            }
        }
    }

    #[test]
    fn image_subspace_of_surjective_map_is_whole_graph() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        let complex =
            augmented_rips(&f, &WeightFn::One, Dist::from_raw(2.0), DEFAULT_WEIGHT_CAP).unwrap();
        let u = complex.image_space();
        assert_eq!(*u.ids(), *complex.space.ids());
        assert_eq!(u, *complex.space);
    }

    #[test]
    fn not_coarsely_surjective_is_rejected() {
        // two-component target, image only sees one side
        let ids = vec!["a".into(), "b".into()];
        let y = Arc::new(Space::from_fn_unchecked(ids, |i, j| {
            if i == j {
                Dist::ZERO
            } else {
                Dist::INF
            }
        }));
        let x = Arc::new(Space::point("p"));
        let f = MappedPair::new(x, y, vec![0]).unwrap();
        assert!(matches!(
            augmented_rips(&f, &WeightFn::One, Dist::ONE, DEFAULT_WEIGHT_CAP),
            Err(Error::NotCoarselySurjective(_))
        ));
    }

    #[test]
    fn dropping_augmented_edges_leaves_plain_rips() {
        let y = segment(6);
        let f = MappedPair::identity(&y);
        let sigma = Dist::from_raw(2.0);
        let complex = augmented_rips(&f, &WeightFn::One, sigma, DEFAULT_WEIGHT_CAP).unwrap();
        // plain Rips graph at scale sigma: unit edges between pairs within sigma
        let mut plain = WeightedGraph::new(y.ids().to_vec()).unwrap();
        for i in 0..y.len() as u32 {
            for j in (i + 1)..y.len() as u32 {
                let d = y.dist(i, j);
                if d.is_finite() && d <= sigma {
                    plain.add_edge(i, j, Dist::ONE, EdgeKind::Internal).unwrap();
                }
            }
        }
        let kept: Vec<_> = complex
            .graph
            .edges()
            .filter(|&(_, _, _, k)| k != EdgeKind::Augmented)
            .map(|(u, v, w, _)| (u, v, w))
            .collect();
        let expected: Vec<_> = plain.edges().map(|(u, v, w, _)| (u, v, w)).collect();
        assert_eq!(kept, expected);
    }

    #[test]
    fn ext_qi_holds_on_identity_with_unit_weights() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        let report =
            check_ext_qi(&f, &WeightFn::One, Dist::ONE, DEFAULT_WEIGHT_CAP).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn image_qi_trivial_on_surjective_map() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        let report =
            check_image_qi(&f, &WeightFn::Exp2, Dist::from_raw(2.0), DEFAULT_WEIGHT_CAP).unwrap();
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.doubling_constant, 1.0);
    }

    #[test]
    fn image_qi_rejects_sigma_below_radius() {
        // target is a 3-point segment, image is only the endpoints' midpoint
        let y = segment(2);
        let x = Arc::new(Space::point("p"));
        let f = MappedPair::new(x, y, vec![1]).unwrap();
        assert!(matches!(
            check_image_qi(&f, &WeightFn::Exp2, Dist::ZERO, DEFAULT_WEIGHT_CAP),
            Err(Error::SigmaBelowRadius { .. })
        ));
    }

    #[test]
    fn lower_check_on_identity_with_linear_weights() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        let w = AffineWitness::new(1.0, 0.0).unwrap();
        let report = check_lower(&f, &WeightFn::LinearPlus, w, DEFAULT_WEIGHT_CAP).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn lower_check_rejects_one_on_long_segments() {
        let x = segment(5);
        let f = MappedPair::identity(&x);
        let w = AffineWitness::new(1.0, 0.0).unwrap();
        assert!(matches!(
            check_lower(&f, &WeightFn::One, w, DEFAULT_WEIGHT_CAP),
            Err(Error::WeightBelowIdentity(_))
        ));
    }

    #[test]
    fn precedes_detects_scaling() {
        // d' = 2 d: (a, b) = (1, 0) certifies d < d'
        let family: Vec<FamilyMember> = [4u32, 8, 12]
            .iter()
            .map(|&n| {
                let d = segment(n);
                let ids = (0..=n).map(|i| i.to_string()).collect();
                let dp = Arc::new(Space::from_fn_unchecked(ids, |i, j| {
                    Dist::from_raw(2.0 * (i as f64 - j as f64).abs())
                }));
                FamilyMember { param: n as f64, d, d_prime: dp, window: None }
            })
            .collect();
        let report = precedes_on_family(&family, &[1.0], 0.25).unwrap();
        assert!(report.consistent);
        for trend in &report.per_slope {
            for (_, b) in &trend.offsets {
                assert_eq!(*b, Some(0.0));
            }
        }
    }
}
