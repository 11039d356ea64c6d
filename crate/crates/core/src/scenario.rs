//! Reproducible verification scenarios.
//!
//! Each scenario packages one headline claim into a deterministic batch run:
//! it builds the relevant instances, performs the exact checks, and returns a
//! report (JSON) plus profile artifacts (CSV). A scenario passes only when
//! every check passes; the CLI maps that to the exit status.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::control::{check_affine_upper, fit_min_upper_offset, min_affine_lower, AffineWitness, LowerFit};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::filtration::{
    kernel_stability_profile, pair_witness_distance, quotient_space, quotient_stability_profile,
    zhang_delta, FiltrationProfile, ZhangOutcome,
};
use crate::gallery::{
    comb, comb_retraction, cubes_squares, heisenberg, heisenberg_ball_sizes, lattice_ball_sizes,
    lattice_quotient,
};
use crate::glue::double_glue_comparison;
use crate::instances::{coeq_instance, rips_instance, RipsInstance};
use crate::par::maybe_parallel_rows;
use crate::rips::{
    augmented_rips, check_ext_qi, check_image_qi, check_lower, precedes_on_family,
    synthesize_maximal_metric, FamilyMember, WeightFn, DEFAULT_WEIGHT_CAP,
};
use crate::trend::{fit_line, log_log_slope, strictly_increasing};

pub const SCENARIOS: &[&str] = &[
    "comb-Q",
    "comb-K",
    "heisenberg-K",
    "coeq-sandwich",
    "rips-constants",
    "cubes-window",
    "zhang-projection",
    "maximal-metric-comb",
];

/// Trend slope below which a family of offsets counts as bounded, and at or
/// above twice of which it counts as growing. Divergence assertions in the
/// scenarios use the stricter growth threshold.
pub const TREND_BOUNDED_TOL: f64 = 0.25;
pub const TREND_GROWTH_MIN: f64 = 0.5;

/// |B(R)| for R = 1..=8 in the Heisenberg ball family with generators a, b,
/// z. Regression values from the breadth-first enumeration.
pub const HEISENBERG_BALL_SIZES: [usize; 8] = [7, 25, 63, 133, 245, 413, 651, 975];

#[derive(Debug, Clone, Default)]
pub struct Params {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n_max: Option<i64>,
    pub family: Option<Vec<i64>>,
    pub sigmas: Option<Vec<f64>>,
    pub radius: Option<i64>,
    pub window: Option<i64>,
    pub theta: Option<WeightFn>,
}

impl Params {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(17)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Which claim the check certifies; failures localize to it.
    pub claim: String,
    pub required: String,
    pub observed: String,
    pub pass: bool,
}

fn check(
    name: &str,
    claim: &str,
    required: impl Display,
    observed: impl Display,
    pass: bool,
) -> Check {
    Check {
        name: name.to_string(),
        claim: claim.to_string(),
        required: required.to_string(),
        observed: observed.to_string(),
        pass,
    }
}

#[derive(Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    /// (file name, contents); CSV profiles and auxiliary tables.
    pub artifacts: Vec<(String, String)>,
}

impl ScenarioOutcome {
    pub fn pass(&self) -> bool {
        self.report.pass
    }

    /// Writes the report and artifacts into `dir` (created if missing),
    /// atomically per file. Returns the written paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let report_path = dir.join(format!("{}_report.json", self.report.scenario.replace('-', "_")));
        atomic_write(&report_path, &serde_json::to_string_pretty(&self.report)?)?;
        written.push(report_path);
        for (name, contents) in &self.artifacts {
            let path = dir.join(name);
            atomic_write(&path, contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn finish(
    scenario: &str,
    params: BTreeMap<String, String>,
    checks: Vec<Check>,
    artifacts: Vec<(String, String)>,
) -> ScenarioOutcome {
    let pass = checks.iter().all(|c| c.pass);
    ScenarioOutcome {
        report: ScenarioReport { scenario: scenario.to_string(), params, checks, pass },
        artifacts,
    }
}

fn concat_profiles(profiles: &[FiltrationProfile]) -> String {
    let mut out = String::from("sigma,tau,record_kind,value,window_size,truncation_param\n");
    for p in profiles {
        let s = p.csv_string();
        if let Some((_, rows)) = s.split_once('\n') {
            out.push_str(rows);
        }
    }
    out
}

pub fn run_scenario(name: &str, params: &Params) -> Result<ScenarioOutcome> {
    match name {
        "comb-Q" => comb_q(params),
        "comb-K" => comb_k(params),
        "heisenberg-K" => heisenberg_k(params),
        "coeq-sandwich" => coeq_sandwich(params),
        "rips-constants" => rips_constants(params),
        "cubes-window" => cubes_window(params),
        "zhang-projection" => zhang_projection(params),
        "maximal-metric-comb" => maximal_metric_comb(params),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// comb-Q: quotient filtration of the comb diverges
// ---------------------------------------------------------------------------

fn comb_q(params: &Params) -> Result<ScenarioOutcome> {
    let n_max = params.n_max.unwrap_or(6);
    let family = params.family.clone().unwrap_or_else(|| vec![4, 6, 8, 10]);
    let grid = [Dist::from_raw(2.0), Dist::from_raw(3.0)];
    let mut checks = Vec::new();

    let c = comb(n_max)?;
    let (v, v2) = c
        .locate_pair(2, 5)
        .ok_or_else(|| Error::BadParameter("no tooth pair at gap 3 and stage 5".into()))?;
    let q3 = quotient_space(&c.f, Dist::from_raw(3.0));
    let d3 = q3.space.dist(v, v2);
    checks.push(check(
        "quotient-collapse-at-3",
        "gluing at the pair's taxicab distance collapses it to a unit edge",
        "= 1",
        d3,
        d3 == Dist::ONE,
    ));
    let q2 = quotient_space(&c.f, Dist::from_raw(2.0));
    let d2 = q2.space.dist(v, v2);
    checks.push(check(
        "quotient-lower-bound-at-2",
        "below the gap the pair keeps distance >= 2n/sigma = 5",
        ">= 5",
        d2,
        d2 >= Dist::from_raw(5.0),
    ));

    let mut profiles = Vec::new();
    let mut r23 = Vec::new();
    for &m in &family {
        let cm = comb(m)?;
        let profile = quotient_stability_profile(
            &cm.f,
            &grid,
            Some(&cm.interior),
            Some(m as f64),
        )?;
        let value = profile
            .value(grid[0], grid[1])
            .expect("grid pair recorded");
        r23.push((m as f64, value.value()));
        profiles.push(profile);
    }
    let slope = fit_line(
        &r23.iter().map(|&(m, _)| m).collect::<Vec<_>>(),
        &r23.iter().map(|&(_, r)| r).collect::<Vec<_>>(),
    )
    .slope;
    checks.push(check(
        "bonding-distortion-grows",
        "r(2,3) grows at least linearly across truncations",
        format!(">= {TREND_GROWTH_MIN}"),
        format!("slope {slope:.3} over {r23:?}"),
        slope >= TREND_GROWTH_MIN,
    ));

    let mut params_out = BTreeMap::new();
    params_out.insert("n_max".into(), n_max.to_string());
    params_out.insert("family".into(), format!("{family:?}"));
    Ok(finish(
        "comb-Q",
        params_out,
        checks,
        vec![("comb_q_profiles.csv".into(), concat_profiles(&profiles))],
    ))
}

// ---------------------------------------------------------------------------
// comb-K: kernel filtration of the comb retraction does not stabilise
// ---------------------------------------------------------------------------

fn comb_k(params: &Params) -> Result<ScenarioOutcome> {
    let stage = params.n_max.unwrap_or(5);
    let family = params.family.clone().unwrap_or_else(|| vec![4, 6, 8]);
    let sigma = Dist::from_raw(2.0);
    let tau = Dist::from_raw(3.0);
    let mut checks = Vec::new();

    let cr = comb_retraction(stage)?;
    let (v, v2) = cr
        .comb
        .locate_pair(2, stage)
        .ok_or_else(|| Error::BadParameter("no tooth pair at gap 3".into()))?;
    let image_gap = cr.ray.dist(cr.f.apply(v), cr.f.apply(v2));
    checks.push(check(
        "pair-in-kernel",
        "the located pair lies in the kernel at scale 3",
        "<= 3",
        image_gap,
        image_gap <= tau,
    ));
    let witness = pair_witness_distance(&cr.f, v, v2, sigma);
    checks.push(check(
        "no-nearby-witness",
        "every scale-2 kernel witness sits farther than the tooth height",
        format!("> {stage}"),
        witness,
        witness > Dist::from_raw(stage as f64),
    ));

    let mut profiles = Vec::new();
    let mut values = Vec::new();
    for &m in &family {
        let crm = comb_retraction(m)?;
        let profile = kernel_stability_profile(
            &crm.f,
            &[sigma, tau],
            Some(&crm.comb.interior),
            Some(m as f64),
        )?;
        let v = profile.value(sigma, tau).expect("grid pair recorded");
        values.push(v.value());
        profiles.push(profile);
    }
    checks.push(check(
        "witness-distance-grows",
        "n(2,3) strictly increases across truncations",
        "strictly increasing",
        format!("{values:?}"),
        strictly_increasing(&values),
    ));

    let mut params_out = BTreeMap::new();
    params_out.insert("stage".into(), stage.to_string());
    params_out.insert("family".into(), format!("{family:?}"));
    Ok(finish(
        "comb-K",
        params_out,
        checks,
        vec![("comb_k_profiles.csv".into(), concat_profiles(&profiles))],
    ))
}

// ---------------------------------------------------------------------------
// heisenberg-K: kernel filtration of a central extension stabilises
// ---------------------------------------------------------------------------

fn heisenberg_k(params: &Params) -> Result<ScenarioOutcome> {
    let radius = params.radius.unwrap_or(6);
    let grid: Vec<Dist> = params
        .sigmas
        .clone()
        .unwrap_or_else(|| vec![0.0, 1.0, 2.0, 3.0])
        .into_iter()
        .map(Dist::from_raw)
        .collect();
    let margin = grid.last().map_or(0, |d| d.value() as i64);
    let mut checks = Vec::new();

    let h = heisenberg(radius)?;
    let window = h.interior(margin);
    let profile = kernel_stability_profile(&h.f, &grid, Some(&window), Some(radius as f64))?;
    for &sigma in &grid {
        let n = profile.value(Dist::ZERO, sigma).expect("grid pair recorded");
        checks.push(check(
            &format!("witness-within-sigma-{sigma}"),
            "interior kernel pairs at scale sigma have sup-metric witnesses \
             in the zero-scale kernel within sigma",
            format!("<= {sigma}"),
            n,
            n <= sigma,
        ));
    }

    let sizes = heisenberg_ball_sizes(8);
    checks.push(check(
        "ball-growth-regression",
        "|B(R)| for R = 1..8 matches the stored enumeration",
        format!("{HEISENBERG_BALL_SIZES:?}"),
        format!("{sizes:?}"),
        sizes == HEISENBERG_BALL_SIZES,
    ));

    let rs: Vec<f64> = (4..=8).map(|r| r as f64).collect();
    let h_sizes: Vec<f64> = sizes[3..8].iter().map(|&s| s as f64).collect();
    let z3_sizes: Vec<f64> = lattice_ball_sizes(3, 8)[3..8].iter().map(|&s| s as f64).collect();
    let h_slope = log_log_slope(&rs, &h_sizes);
    let z3_slope = log_log_slope(&rs, &z3_sizes);
    checks.push(check(
        "growth-order-separation",
        "the extension ball family outgrows the rank-three lattice family",
        "> 0.3",
        format!("{:.3} vs {:.3}", h_slope, z3_slope),
        h_slope - z3_slope > 0.3,
    ));

    let mut sizes_csv = String::from("radius,heisenberg,lattice3\n");
    let z3_all = lattice_ball_sizes(3, 8);
    for r in 1..=8usize {
        sizes_csv.push_str(&format!("{},{},{}\n", r, sizes[r - 1], z3_all[r - 1]));
    }

    let mut params_out = BTreeMap::new();
    params_out.insert("radius".into(), radius.to_string());
    params_out.insert("grid".into(), format!("{grid:?}"));
    params_out.insert("window_margin".into(), margin.to_string());
    Ok(finish(
        "heisenberg-K",
        params_out,
        checks,
        vec![
            ("heisenberg_k_profile.csv".into(), profile.csv_string()),
            ("heisenberg_ball_sizes.csv".into(), sizes_csv),
        ],
    ))
}

// ---------------------------------------------------------------------------
// coeq-sandwich: the coequaliser comparison maps verify exactly
// ---------------------------------------------------------------------------

fn coeq_sandwich(params: &Params) -> Result<ScenarioOutcome> {
    let seed = params.seed();
    let trials = params.trials.unwrap_or(100);
    let results = maybe_parallel_rows(trials, |t| {
        let (f, g) = coeq_instance(seed, t as u64);
        let report = double_glue_comparison(&f, &g)?;
        Ok::<_, Error>((t, report))
    });
    let mut failures = Vec::new();
    for r in results {
        let (t, report) = r?;
        if !report.all_pass() {
            failures.push(format!("trial {t}: {report:?}"));
        }
    }
    let checks = vec![check(
        "comparison-maps-verify",
        "r is 1-Lipschitz, s is 2-Lipschitz, r∘s = id, s∘r is 1-close to id",
        format!("0 failures in {trials} trials"),
        format!("{} failures{}", failures.len(), failures.first().map(|f| format!(": {f}")).unwrap_or_default()),
        failures.is_empty(),
    )];
    let mut params_out = BTreeMap::new();
    params_out.insert("seed".into(), seed.to_string());
    params_out.insert("trials".into(), trials.to_string());
    Ok(finish("coeq-sandwich", params_out, checks, vec![]))
}

// ---------------------------------------------------------------------------
// rips-constants: the factorisation constants verify exactly
// ---------------------------------------------------------------------------

/// A scale at which the retraction comparison closes edgewise: large enough
/// that every internal edge's retracted endpoints are connected either by an
/// internal edge (within sigma) or by an augmented edge cheaper than the
/// doubling bound.
fn image_qi_scale(inst: &RipsInstance, theta: &WeightFn) -> Dist {
    let r = inst.radius;
    match theta {
        WeightFn::Exp2 => {
            let diam = inst.x.max_finite_distance().value();
            Dist::from_raw(r.value().max((diam + 1.0).log2().ceil()))
        }
        _ => {
            let image = inst.f.image_indices();
            let mut diam = Dist::ZERO;
            for (a, &u) in image.iter().enumerate() {
                for &v in &image[a + 1..] {
                    let d = inst.y.dist(u, v);
                    if d.is_finite() {
                        diam = diam.max(d);
                    }
                }
            }
            diam.max(r)
        }
    }
}

fn rips_constants(params: &Params) -> Result<ScenarioOutcome> {
    let seed = params.seed();
    let trials = params.trials.unwrap_or(50);
    let results = maybe_parallel_rows(trials, |t| -> Result<Vec<(usize, String, bool)>> {
        let inst = rips_instance(seed, t as u64);
        let mut rows = Vec::new();
        for theta in [WeightFn::Exp2, WeightFn::One] {
            let sigma_ext = Dist::from_raw(inst.radius.value().max(1.0) + (t % 3) as f64);
            let ext = check_ext_qi(&inst.f, &theta, sigma_ext, DEFAULT_WEIGHT_CAP)?;
            rows.push((t, format!("ext-qi/{}", theta.name()), ext.pass()));
            let sigma_img = image_qi_scale(&inst, &theta);
            let img = check_image_qi(&inst.f, &theta, sigma_img, DEFAULT_WEIGHT_CAP)?;
            rows.push((t, format!("image-qi/{}", theta.name()), img.pass()));
            if matches!(theta, WeightFn::Exp2) {
                let offset = fit_min_upper_offset(&inst.f, 1.0)
                    .expect("connected instances admit a slope-1 upper control");
                let lower = check_lower(
                    &inst.f,
                    &theta,
                    AffineWitness::new(1.0, offset)?,
                    DEFAULT_WEIGHT_CAP,
                )?;
                rows.push((t, "lower/exp2".to_string(), lower.pass()));
            }
        }
        Ok(rows)
    });
    let mut table = String::from("trial,check,pass\n");
    let mut failures = 0usize;
    let mut total = 0usize;
    for r in results {
        for (t, name, pass) in r? {
            total += 1;
            failures += usize::from(!pass);
            table.push_str(&format!("{t},{name},{pass}\n"));
        }
    }
    let checks = vec![check(
        "factorisation-constants",
        "quotient-to-image bounds, retraction bounds, and the edge bound \
         rho(w) + w hold with their exact constants",
        format!("0 failures in {total} checks"),
        format!("{failures} failures"),
        failures == 0,
    )];
    let mut params_out = BTreeMap::new();
    params_out.insert("seed".into(), seed.to_string());
    params_out.insert("trials".into(), trials.to_string());
    Ok(finish(
        "rips-constants",
        params_out,
        checks,
        vec![("rips_constants_checks.csv".into(), table)],
    ))
}

// ---------------------------------------------------------------------------
// cubes-window: coarse equivalence without a quasi-isometry
// ---------------------------------------------------------------------------

fn cubes_window(params: &Params) -> Result<ScenarioOutcome> {
    let windows = params.family.clone().unwrap_or_else(|| vec![10, 50, 100, 200]);
    let slopes = params.sigmas.clone().unwrap_or_else(|| vec![1.0, 0.5, 0.1]);
    let mut checks = Vec::new();
    let mut table = String::from("window,slope,offset\n");
    let mut offsets: BTreeMap<String, Vec<f64>> = BTreeMap::new();

    for &n in &windows {
        let cs = cubes_squares(n)?;
        let upper = check_affine_upper(&cs.f, AffineWitness::new(1.0, 0.0)?);
        checks.push(check(
            &format!("one-lipschitz-window-{n}"),
            "the cube-to-square map is 1-Lipschitz on every window",
            "holds",
            if upper.holds { "holds" } else { "violated" },
            upper.holds,
        ));
        for (a, fit) in min_affine_lower(&cs.f, &slopes) {
            match fit {
                LowerFit::Feasible { offset } => {
                    table.push_str(&format!("{n},{a},{offset}\n"));
                    offsets.entry(format!("{a}")).or_default().push(offset);
                }
                LowerFit::Infeasible { p, q } => {
                    return Err(Error::BadParameter(format!(
                        "unexpected infeasible lower fit at ({p}, {q})"
                    )))
                }
            }
        }
    }
    for (slope, bs) in &offsets {
        checks.push(check(
            &format!("lower-offset-diverges-slope-{slope}"),
            "the minimal lower-control offset grows strictly with the window",
            "strictly increasing",
            format!("{bs:?}"),
            strictly_increasing(bs),
        ));
    }

    let mut params_out = BTreeMap::new();
    params_out.insert("windows".into(), format!("{windows:?}"));
    params_out.insert("slopes".into(), format!("{slopes:?}"));
    Ok(finish(
        "cubes-window",
        params_out,
        checks,
        vec![("cubes_window_offsets.csv".into(), table)],
    ))
}

// ---------------------------------------------------------------------------
// zhang-projection: witness law delta(eps) = eps, and kernel stability
// ---------------------------------------------------------------------------

fn zhang_projection(params: &Params) -> Result<ScenarioOutcome> {
    let radius = params.radius.unwrap_or(5);
    let lq = lattice_quotient(2, 1, radius)?;
    let mut checks = Vec::new();
    let mut table = String::from("eps,delta,window_size\n");

    let mut eps_values: Vec<Dist> = vec![Dist::ZERO];
    eps_values.extend(lq.y.realized_distances());
    let mut law_holds = true;
    let mut observed = Vec::new();
    for eps in eps_values {
        let margin = eps.value() as i64;
        if margin > radius {
            continue; // window would be empty on this truncation
        }
        let window = lq.interior(margin);
        let outcome = zhang_delta(&lq.f, Dist::ZERO, eps, Some(&window));
        match outcome {
            ZhangOutcome::Feasible { delta, .. } => {
                table.push_str(&format!(
                    "{},{},{}\n",
                    eps,
                    delta,
                    window.iter().filter(|&&w| w).count()
                ));
                observed.push(format!("delta({eps}) = {delta}"));
                law_holds &= delta == eps;
            }
            ZhangOutcome::Infeasible { x, y_prime } => {
                law_holds = false;
                observed.push(format!("infeasible at ({x}, {y_prime})"));
            }
        }
    }
    checks.push(check(
        "witness-law",
        "the coordinate projection is a coarse quotient at constant 0 with \
         delta(eps) = eps on the interior",
        "delta(eps) = eps for every realized eps",
        observed.join("; "),
        law_holds,
    ));

    let grid: Vec<Dist> = [0.0, 1.0, 2.0, 3.0].map(Dist::from_raw).into();
    let margin = grid.last().unwrap().value() as i64;
    let window = lq.interior(margin);
    let profile = kernel_stability_profile(&lq.f, &grid, Some(&window), Some(radius as f64))?;
    let all_finite = profile.records.iter().all(|r| r.value.is_finite());
    checks.push(check(
        "kernel-stability-follows",
        "the witness law forces finite kernel inclusion densities",
        "all n(sigma, tau) finite",
        format!(
            "{:?}",
            profile.records.iter().map(|r| r.value).collect::<Vec<_>>()
        ),
        all_finite,
    ));

    let mut params_out = BTreeMap::new();
    params_out.insert("radius".into(), radius.to_string());
    Ok(finish(
        "zhang-projection",
        params_out,
        checks,
        vec![
            ("zhang_projection_delta.csv".into(), table),
            ("zhang_projection_profile.csv".into(), profile.csv_string()),
        ],
    ))
}

// ---------------------------------------------------------------------------
// maximal-metric-comb: the comb admits no relatively maximal metric
// ---------------------------------------------------------------------------

fn maximal_metric_comb(params: &Params) -> Result<ScenarioOutcome> {
    let family = params.family.clone().unwrap_or_else(|| vec![4, 6, 8]);
    let sigmas = params.sigmas.clone().unwrap_or_else(|| vec![2.0, 3.0]);
    let theta = params.theta.clone().unwrap_or(WeightFn::Exp2);
    let slopes = [1.0, 2.0, 4.0, 8.0];
    let mut checks = Vec::new();
    let mut table = String::from("sigma,n_max,slope,offset\n");

    for &sigma in &sigmas {
        let sigma_d = Dist::from_raw(sigma);
        let mut members = Vec::new();
        for &m in &family {
            let cm = comb(m)?;
            let complex = augmented_rips(&cm.f, &theta, sigma_d, DEFAULT_WEIGHT_CAP)?;
            members.push(FamilyMember {
                param: m as f64,
                d: complex.space.clone(),
                d_prime: cm.y.clone(),
                window: Some(cm.interior.clone()),
            });
        }
        // divergent direction: the Rips metric is not affinely bounded by the
        // taxicab metric uniformly across truncations
        let diverging = precedes_on_family(&members, &slopes, TREND_BOUNDED_TOL)?;
        for trend in &diverging.per_slope {
            for (p, b) in &trend.offsets {
                table.push_str(&format!(
                    "{sigma},{p},{},{}\n",
                    trend.slope,
                    b.map_or("inf".into(), |v| v.to_string())
                ));
            }
        }
        let all_grow = diverging.per_slope.iter().all(|t| {
            t.trend.map_or(true, |s| s >= TREND_GROWTH_MIN)
        });
        checks.push(check(
            &format!("no-affine-witness-sigma-{sigma}"),
            "no affine bound of the synthesized metric by the taxicab metric \
             holds uniformly across truncations",
            format!("every slope trend >= {TREND_GROWTH_MIN}"),
            format!(
                "{:?}",
                diverging
                    .per_slope
                    .iter()
                    .map(|t| (t.slope, t.trend))
                    .collect::<Vec<_>>()
            ),
            !diverging.consistent && all_grow,
        ));

        // converse direction stays affinely bounded: d_Y <= 2 * del + 0
        let back: Vec<FamilyMember> = members
            .iter()
            .map(|m| FamilyMember {
                param: m.param,
                d: m.d_prime.clone(),
                d_prime: m.d.clone(),
                window: m.window.clone(),
            })
            .collect();
        let bounded = precedes_on_family(&back, &[2.0], TREND_BOUNDED_TOL)?;
        checks.push(check(
            &format!("taxicab-stays-below-sigma-{sigma}"),
            "the taxicab metric is affinely bounded by the synthesized metric \
             with a fixed witness",
            "bounded at slope 2",
            format!("{:?}", bounded.per_slope[0].offsets),
            bounded.consistent,
        ));
    }

    // the factorisation arrows themselves verify on a single truncation
    let c = comb(family.last().copied().unwrap_or(6))?;
    let report = synthesize_maximal_metric(
        &c.f,
        &theta,
        Dist::from_raw(sigmas[0]),
        DEFAULT_WEIGHT_CAP,
        &[1.0, 2.0],
        Some(&c.interior),
    )?;
    checks.push(check(
        "factorisation-arrows",
        "each arrow of the synthesis factorisation verifies its constants",
        "all arrows pass",
        format!("arrows pass: {}", report.arrows_pass()),
        report.arrows_pass(),
    ));

    let mut params_out = BTreeMap::new();
    params_out.insert("family".into(), format!("{family:?}"));
    params_out.insert("sigmas".into(), format!("{sigmas:?}"));
    params_out.insert("theta".into(), theta.name().to_string());
    Ok(finish(
        "maximal-metric-comb",
        params_out,
        checks,
        vec![("maximal_metric_comb_offsets.csv".into(), table)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_scenario_is_rejected() {
        assert!(matches!(
            run_scenario("nope", &Params::default()),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn scenario_names_all_dispatch() {
        for name in SCENARIOS {
            // dispatch only: smallest possible params keep this fast
            let params = Params {
                n_max: Some(5),
                family: Some(vec![4, 5]),
                trials: Some(2),
                radius: Some(2),
                ..Params::default()
            };
            let outcome = run_scenario(name, &params);
            assert!(outcome.is_ok(), "{name}: {:?}", outcome.err());
        }
    }
}
