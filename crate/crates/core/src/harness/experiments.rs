use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actions::ActionModel;
use crate::dynamics::{folner_windows, negative_definite_check, point_masses, roe_transfer, truncated_kernel};
use crate::embed::{distortion, kuratowski_embed, kuratowski_from_metric, profinite_embed};
use crate::error::{Error, Result};
use crate::spaces::{cone_index, compact_cone, Model};
use crate::spectral::{
    distortion_lower_bound, level_graph, schreier_family, spectral_gap, write_spectral_csv, Graph,
};
use crate::warp::{
    faithfulness_radius, mileage_layers, quotient_metric_check, BaseEdgeRule, FaithfulnessStatus, WarpedLevel,
    DEFAULT_COMPLETE_CAP,
};

use super::scenario::{build_action, ActionSpec, ExperimentKind, Scenario, SpaceSpec};

/// Outcome of one declared check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub invariant: String,
    pub passed: bool,
    /// Measured value, or the witness of a failure.
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl AssertionRecord {
    fn new(invariant: &str, passed: bool, detail: String, tolerance: Option<f64>) -> Self {
        AssertionRecord {
            invariant: invariant.to_string(),
            passed,
            detail,
            tolerance,
        }
    }
}

/// CSV text and assertion outcomes of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub assertions: Vec<AssertionRecord>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

/// Run a parsed scenario without touching the filesystem.
pub fn execute(scenario: &Scenario) -> Result<ExperimentOutput> {
    match scenario.kind {
        ExperimentKind::WarpMetric => warp_metric(scenario),
        ExperimentKind::QuotientCheck => quotient_check(scenario),
        ExperimentKind::FaithfulRadius => faithful_radius(scenario),
        ExperimentKind::SchreierFamily => schreier(scenario),
        ExperimentKind::Spectral => spectral(scenario),
        ExperimentKind::Distortion => distortion_experiment(scenario),
        ExperimentKind::EmbedProfinite => embed_profinite(scenario),
        ExperimentKind::KernelCheck => kernel_check(scenario),
        ExperimentKind::RoeTransfer => transfer(scenario),
        ExperimentKind::ConeSlice => cone_slice(scenario),
    }
}

fn cap(s: &Scenario) -> usize {
    s.cap.unwrap_or(DEFAULT_COMPLETE_CAP)
}

fn levels(s: &Scenario) -> Result<&[f64]> {
    if s.params.levels.is_empty() {
        return Err(Error::Config("field `params.levels` must list at least one level".into()));
    }
    Ok(&s.params.levels)
}

fn need<T: Copy>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing field `params.{field}`")))
}

fn space_spec(s: &Scenario) -> Result<&SpaceSpec> {
    s.space
        .as_ref()
        .ok_or_else(|| Error::Config("section `[space]` is required".into()))
}

fn warp_metric(s: &Scenario) -> Result<ExperimentOutput> {
    let action = build_action(s)?;
    let n = action.space().len();
    let mut csv = String::from("level,i,j,dist,oracle\n");
    let mut assertions = Vec::new();
    for &r in levels(s)? {
        let level = WarpedLevel::build(Arc::clone(&action), r, s.rule(), cap(s))?;
        let inv = level.check_invariants();
        assertions.push(AssertionRecord::new(
            &format!("level {r} metric invariants"),
            inv.is_ok(),
            inv.err().map_or_else(|| "ok".into(), |e| e.to_string()),
            None,
        ));
        // rows whose hop layers stop changing equal the warped distances
        let mut oracle: Vec<Option<Vec<f64>>> = vec![None; n];
        if let Some(hops) = s.params.oracle_hops {
            let mut worst = 0.0f64;
            let mut witness = None;
            let mut converged = 0;
            for (x, slot) in oracle.iter_mut().enumerate() {
                let layers = mileage_layers(&action, r, x, hops + 1)?;
                if layers[hops] != layers[hops + 1] {
                    continue;
                }
                converged += 1;
                for (y, m) in layers[hops].iter().enumerate() {
                    let diff = (m - level.dist(x, y)).abs();
                    if diff > worst {
                        worst = diff;
                        witness = Some((x, y));
                    }
                }
                *slot = Some(layers[hops].clone());
            }
            assertions.push(AssertionRecord::new(
                &format!("level {r} agrees with mileage oracle"),
                worst <= 1e-9,
                format!("max diff {worst} over {converged} converged rows, witness {witness:?}"),
                Some(1e-9),
            ));
        }
        for (i, settled) in oracle.iter().enumerate() {
            for j in (i + 1)..n {
                let o = settled.as_ref().map(|row| row[j].to_string()).unwrap_or_default();
                writeln!(csv, "{r},{i},{j},{},{o}", level.dist(i, j)).expect("string write");
            }
        }
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn quotient_check(s: &Scenario) -> Result<ExperimentOutput> {
    let action = build_action(s)?;
    let radius = need(s.params.radius, "radius")?;
    let mut csv = String::from("level,radius,ball_size,exact,max_discrepancy,tolerance\n");
    let mut assertions = Vec::new();
    for &r in levels(s)? {
        let level = WarpedLevel::build(Arc::clone(&action), r, s.rule(), cap(s))?;
        let rep = quotient_metric_check(&level, radius, cap(s))?;
        writeln!(
            csv,
            "{r},{radius},{},{},{},{}",
            rep.ball_size, rep.exact, rep.max_discrepancy, rep.tolerance
        )
        .expect("string write");
        assertions.push(AssertionRecord::new(
            &format!("quotient identity at level {r}"),
            rep.passes(),
            format!("discrepancy {} at pair {:?}", rep.max_discrepancy, rep.witness),
            Some(rep.tolerance),
        ));
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn faithful_radius(s: &Scenario) -> Result<ExperimentOutput> {
    let action = build_action(s)?;
    let schedule = levels(s)?;
    let radii = if s.params.radii.is_empty() { vec![1, 2, 3] } else { s.params.radii.clone() };
    let mut csv = String::from("radius,status,faithful_level,epsilon,max_level_tested,witness_element,witness_point\n");
    let mut assertions = Vec::new();
    let mut previous: Option<f64> = None;
    for &n in &radii {
        let rep = faithfulness_radius(&action, n, schedule, s.rule(), cap(s))?;
        let (we, wp) = match (&rep.fixed_point, rep.levels.last().and_then(|l| l.witness.as_ref())) {
            (Some((g, y)), _) => (g.to_string(), y.to_string()),
            (None, Some((_, g, w))) if rep.status != FaithfulnessStatus::FaithfulAt => (g.to_string(), w.to_string()),
            _ => (String::new(), String::new()),
        };
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{n},{},{},{},{},{we},{wp}",
            rep.status,
            opt(rep.faithful_level),
            rep.epsilon,
            opt(rep.max_level_tested)
        )
        .expect("string write");
        match s.params.expect.as_deref() {
            Some("failure") => assertions.push(AssertionRecord::new(
                &format!("fixed point detected at N={n}"),
                rep.status == FaithfulnessStatus::Failure,
                format!("status {} witness ({we}, {wp})", rep.status),
                None,
            )),
            Some(_) => {
                let ok = rep.status == FaithfulnessStatus::FaithfulAt;
                let monotone = match (previous, rep.faithful_level) {
                    (Some(p), Some(r)) => r >= p,
                    _ => true,
                };
                assertions.push(AssertionRecord::new(
                    &format!("faithful level found at N={n}"),
                    ok,
                    format!("status {} level {}", rep.status, opt(rep.faithful_level)),
                    None,
                ));
                assertions.push(AssertionRecord::new(
                    &format!("faithful levels nondecreasing at N={n}"),
                    monotone,
                    format!("previous {} current {}", opt(previous), opt(rep.faithful_level)),
                    None,
                ));
                previous = rep.faithful_level.or(previous);
            }
            None => {}
        }
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn schreier(s: &Scenario) -> Result<ExperimentOutput> {
    if s.params.moduli.is_empty() {
        return Err(Error::Config("field `params.moduli` must list at least one modulus".into()));
    }
    let fam = schreier_family(&crate::actions::GroupPresentation::sl2(), &s.params.moduli)?;
    let mut buf = Vec::new();
    write_spectral_csv(&mut buf, &fam.reports)?;
    let csv = String::from_utf8(buf).expect("ascii csv");
    let mut assertions = Vec::new();
    for rep in &fam.reports {
        let n = rep.n;
        if is_prime(n) {
            assertions.push(AssertionRecord::new(
                &format!("n={n} orbit has n^2-1 vertices"),
                rep.vertex_count as u64 == n * n - 1,
                format!("{} vertices", rep.vertex_count),
                None,
            ));
        }
        assertions.push(AssertionRecord::new(
            &format!("n={n} connected"),
            rep.components == 1,
            format!("{} components", rep.components),
            None,
        ));
        if let Some(h) = rep.exact_h {
            let ok = rep.cheeger_lower <= h + 1e-12 && h <= rep.cheeger_upper + 1e-12;
            assertions.push(AssertionRecord::new(
                &format!("n={n} Cheeger sandwich"),
                ok,
                format!("{} <= {h} <= {}", rep.cheeger_lower, rep.cheeger_upper),
                None,
            ));
        }
        if let Some(min) = s.params.d_lb_min {
            let d = rep.d_lb.unwrap_or(0.0);
            assertions.push(AssertionRecord::new(
                &format!("n={n} distortion bound exceeds {min}"),
                d > min,
                format!("D_lb = {d}"),
                None,
            ));
        }
    }
    if let Some(floor) = s.params.floor {
        let tol = s.params.floor_tolerance.unwrap_or(1e-6);
        let worst = fam
            .reports
            .iter()
            .min_by(|a, b| a.lambda1_norm.total_cmp(&b.lambda1_norm))
            .expect("nonempty family");
        assertions.push(AssertionRecord::new(
            "family floor at or above baseline",
            fam.family_floor >= floor - tol,
            format!("floor {} at n={} vs baseline {floor}", fam.family_floor, worst.n),
            Some(tol),
        ));
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn spectral(s: &Scenario) -> Result<ExperimentOutput> {
    let action = build_action(s)?;
    let mut csv = String::from("graph,n,vertices,lambda1_norm,lambda1_comb,cheeger_lo,cheeger_hi,d_lb\n");
    let mut assertions = Vec::new();
    let row = |csv: &mut String, name: &str, n: String, g: &Graph| -> Result<(f64, f64)> {
        let rep = spectral_gap(g);
        let d = distortion_lower_bound(g)?;
        writeln!(
            csv,
            "{name},{n},{},{},{},{},{},{d}",
            rep.vertex_count, rep.lambda1_norm, rep.lambda1_comb, rep.cheeger_lower, rep.cheeger_upper
        )
        .expect("string write");
        Ok((rep.lambda1_norm, d))
    };
    let mut gaps = Vec::new();
    for &r in levels(s)? {
        let g = match s.params.points_per_level {
            Some(k) => {
                let mut scaled = s.clone();
                if let Some(space) = scaled.space.as_mut() {
                    space.resolution = Some(((k as f64 * r).round() as usize).max(2));
                }
                level_graph(build_action(&scaled)?.as_ref(), r)
            }
            None => level_graph(&action, r),
        };
        gaps.push((r, row(&mut csv, "level", r.to_string(), &g)?.0));
    }
    if s.params.decreasing == Some(true) {
        let bad = gaps.windows(2).find(|w| w[1].1 >= w[0].1);
        assertions.push(AssertionRecord::new(
            "level-graph gap decreases with the level",
            bad.is_none(),
            match bad {
                Some(w) => format!("lambda1({}) = {} >= lambda1({}) = {}", w[1].0, w[1].1, w[0].0, w[0].1),
                None => format!("{gaps:?}"),
            },
            None,
        ));
    }
    for &c in &s.params.cycles {
        let (_, d) = row(&mut csv, "cycle", c.to_string(), &Graph::cycle(c))?;
        if let Some(base) = s.params.cycle_baseline {
            assertions.push(AssertionRecord::new(
                &format!("C{c} distortion bound below baseline"),
                d < base,
                format!("D_lb = {d} vs {base}"),
                None,
            ));
        }
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn distortion_experiment(s: &Scenario) -> Result<ExperimentOutput> {
    let spec = space_spec(s)?;
    let base = spec.base(s.seed_or_zero())?;
    let space = spec.wrap(&base)?.unwrap_or(base);
    let ps = if s.params.p_values.is_empty() { vec![1.0, 2.0, 4.0] } else { s.params.p_values.clone() };
    let mass = space.total_mass();
    let n = space.len();
    let mut csv = String::from("p,expansion_max,contraction_min,distortion,lipschitz_bound,bound_excess\n");
    let mut assertions = Vec::new();
    let mut spread = Vec::new();
    for &p in &ps {
        let table = kuratowski_embed(&space, p)?;
        let rep = distortion(space.as_ref(), &table)?;
        let bound = mass.powf(1.0 / p);
        let mut excess = f64::NEG_INFINITY;
        let mut witness = (0, 0);
        for i in 0..n {
            for j in (i + 1)..n {
                let e = table.norm_diff(i, j) - bound * space.dist(i, j);
                if e > excess {
                    excess = e;
                    witness = (i, j);
                }
            }
        }
        writeln!(
            csv,
            "{p},{},{},{},{bound},{excess}",
            rep.expansion_max, rep.contraction_min, rep.distortion
        )
        .expect("string write");
        assertions.push(AssertionRecord::new(
            &format!("p={p} Lipschitz bound mass^(1/p)"),
            excess <= 1e-9,
            format!("largest excess {excess} at pair {witness:?}"),
            Some(1e-9),
        ));
        spread.push(rep.distortion);
    }
    if let Some(band) = s.params.band {
        let hi = spread.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = spread.iter().cloned().fold(f64::INFINITY, f64::min);
        assertions.push(AssertionRecord::new(
            "distortions across p within band",
            hi <= band * lo,
            format!("max {hi} min {lo}"),
            Some(band),
        ));
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn embed_profinite(s: &Scenario) -> Result<ExperimentOutput> {
    let space = space_spec(s)?.base(0)?;
    let Model::Profinite(spec) = space.model() else {
        return Err(Error::Config("embed-profinite needs a profinite `[space]`".into()));
    };
    let ps = if s.params.p_values.is_empty() { vec![1.0, 2.0, 4.0] } else { s.params.p_values.clone() };
    let mut csv = String::from("p,depth,expansion_max,contraction_min,closed_form\n");
    let mut assertions = Vec::new();
    for &p in &ps {
        let table = profinite_embed(spec, space.points(), p)?;
        let rep = distortion(space.as_ref(), &table)?;
        let closed = (1.0 - spec.ratio.powf(p)).powf(-1.0 / p);
        writeln!(
            csv,
            "{p},{},{},{},{closed}",
            spec.truncation_level(),
            rep.expansion_max,
            rep.contraction_min
        )
        .expect("string write");
        let err = (rep.expansion_max - closed).abs().max((rep.contraction_min - closed).abs());
        assertions.push(AssertionRecord::new(
            &format!("p={p} stretch equals closed form"),
            err <= 1e-9,
            format!("expansion {} contraction {} closed {closed}", rep.expansion_max, rep.contraction_min),
            Some(1e-9),
        ));
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn kernel_check(s: &Scenario) -> Result<ExperimentOutput> {
    let action = build_action(s)?;
    let lv = levels(s)?;
    let word_radius = need(s.params.word_radius, "word_radius")?;
    let trials = s.params.trials.unwrap_or(1000);
    let mut tables = Vec::with_capacity(lv.len());
    for &r in lv {
        let level = WarpedLevel::build(Arc::clone(&action), r, s.rule(), cap(s))?;
        tables.push(kuratowski_from_metric(&level, action.space().weights().to_vec(), 2.0)?);
    }
    let kernel = truncated_kernel(&action, lv, &tables, word_radius, cap(s))?;
    let rep = negative_definite_check(&kernel, trials, s.seed_or_zero());
    let norm = kernel.normalization_defect();
    let sym = kernel.symmetry_defect();
    let mut csv = String::from("levels,word_radius,trials,skipped,max_form,normalization_defect,symmetry_defect\n");
    writeln!(
        csv,
        "{},{word_radius},{trials},{},{},{norm},{sym}",
        lv.len(),
        rep.skipped,
        rep.max_value
    )
    .expect("string write");
    let mut assertions = vec![
        AssertionRecord::new(
            "quadratic form nonpositive on zero-sum vectors",
            rep.max_value <= 1e-8,
            format!("max {} over {} trials", rep.max_value, rep.trials - rep.skipped),
            Some(1e-8),
        ),
        AssertionRecord::new("h(e, y) = 0", norm == 0.0, format!("max |h(e,y)| = {norm}"), Some(0.0)),
    ];
    if kernel.is_exact() {
        assertions.push(AssertionRecord::new(
            "h symmetric on exact orbits",
            sym == 0.0,
            format!("max defect {sym}"),
            Some(0.0),
        ));
    }
    Ok(ExperimentOutput { csv, assertions })
}

fn transfer(s: &Scenario) -> Result<ExperimentOutput> {
    let action = build_action(s)?;
    let n = action.space().len();
    let width = s.params.half_width.unwrap_or(1);
    let maps = match s.params.maps.as_deref() {
        Some("point") => point_masses(n),
        _ => folner_windows(&action, width),
    };
    let m = s.params.support_radius.unwrap_or(match s.params.maps.as_deref() {
        Some("point") => 0,
        _ => width,
    });
    let mut csv = String::from(crate::dynamics::TransferResult::csv_header());
    csv.push('\n');
    let mut assertions = Vec::new();
    for (k, &r) in levels(s)?.iter().enumerate() {
        let level = WarpedLevel::build(Arc::clone(&action), r, s.rule(), cap(s))?;
        let res = roe_transfer(&level, &maps, m, s.params.delta)?;
        csv.push_str(&res.csv_row(k + 1));
        csv.push('\n');
        assertions.push(AssertionRecord::new(
            &format!("level {r} defect bounded by input variation"),
            res.defect <= res.input_variation + 1e-12,
            format!(
                "defect {} at (y, s) = {:?}, variation {}",
                res.defect, res.defect_witness, res.input_variation
            ),
            Some(1e-12),
        ));
        if let Some(want) = s.params.expect_defect {
            assertions.push(AssertionRecord::new(
                &format!("level {r} defect matches expected value"),
                (res.defect - want).abs() <= 1e-9,
                format!("defect {} expected {want}", res.defect),
                Some(1e-9),
            ));
        }
        if action.is_exact() {
            assertions.push(AssertionRecord::new(
                &format!("level {r} measures are probability vectors"),
                res.mass_deficit_max.abs() <= 1e-9,
                format!("mass deficit {}", res.mass_deficit_max),
                Some(1e-9),
            ));
        }
    }
    Ok(ExperimentOutput { csv, assertions })
}

/// Slice comparison between the warped compact cone and a warped level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSliceReport {
    pub resolution: usize,
    pub slices: usize,
    pub theta: f64,
    /// Nearest available slice `k / slices`.
    pub slice_theta: f64,
    pub scale: f64,
    pub max_discrepancy: f64,
    /// `4 mesh scale Lip`, with the cone net's mesh.
    pub tolerance: f64,
    pub witness: (usize, usize),
}

/// Build the warped cone over `space` at `scale` and the warped base at
/// level `theta * scale`, and compare distances within the slice nearest
/// to `theta`.
pub fn cone_slice_discrepancy(
    space: &SpaceSpec,
    action: &ActionSpec,
    theta: f64,
    scale: f64,
    seed: u64,
    cap: usize,
) -> Result<ConeSliceReport> {
    let slices = space
        .cone_slices
        .ok_or_else(|| Error::Config("missing field `space.cone_slices`".into()))?;
    let mut flat = space.clone();
    flat.cone_slices = None;
    flat.extension = None;
    let base = flat.base(seed)?;
    let act = Arc::new(action.build(Arc::clone(&base))?);
    let cone = Arc::new(compact_cone(&base, slices)?);
    let lifted: Arc<ActionModel> = Arc::new(act.lift(Arc::clone(&cone))?);
    let cone_level = WarpedLevel::build(Arc::clone(&lifted), scale, BaseEdgeRule::Complete, cap)?;
    let flat_level = WarpedLevel::build(act, theta * scale, BaseEdgeRule::Complete, cap)?;
    let k = ((theta * slices as f64).round() as usize).clamp(1, slices);
    let n = base.len();
    let mut worst = (0.0f64, (0, 0));
    for y in 0..n {
        for y2 in (y + 1)..n {
            let d_cone = cone_level.dist(cone_index(n, k, y), cone_index(n, k, y2));
            let diff = (d_cone - flat_level.dist(y, y2)).abs();
            if diff > worst.0 {
                worst = (diff, (y, y2));
            }
        }
    }
    Ok(ConeSliceReport {
        resolution: flat.resolution.unwrap_or(0),
        slices,
        theta,
        slice_theta: k as f64 / slices as f64,
        scale,
        max_discrepancy: worst.0,
        tolerance: 4.0 * cone.mesh() * scale * lifted.max_lipschitz(),
        witness: worst.1,
    })
}

fn cone_slice(s: &Scenario) -> Result<ExperimentOutput> {
    let space = space_spec(s)?;
    let action = s
        .action
        .as_ref()
        .ok_or_else(|| Error::Config("section `[action]` is required".into()))?;
    let theta = need(s.params.theta, "theta")?;
    let scale = need(s.params.scale, "scale")?;
    let mut runs = vec![cone_slice_discrepancy(space, action, theta, scale, s.seed_or_zero(), cap(s))?];
    if s.params.halving == Some(true) {
        let mut fine = space.clone();
        fine.resolution = fine.resolution.map(|r| 2 * r);
        fine.cone_slices = fine.cone_slices.map(|m| 2 * m);
        runs.push(cone_slice_discrepancy(&fine, action, theta, scale, s.seed_or_zero(), cap(s))?);
    }
    let mut csv = String::from("resolution,slices,theta,slice_theta,scale,max_discrepancy,tolerance\n");
    let mut assertions = Vec::new();
    for r in &runs {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.resolution, r.slices, r.theta, r.slice_theta, r.scale, r.max_discrepancy, r.tolerance
        )
        .expect("string write");
        assertions.push(AssertionRecord::new(
            &format!("slice discrepancy within 4 mesh scale Lip (m={})", r.slices),
            r.max_discrepancy <= r.tolerance,
            format!("discrepancy {} at pair {:?}", r.max_discrepancy, r.witness),
            Some(r.tolerance),
        ));
        if s.params.expect_exact == Some(true) {
            assertions.push(AssertionRecord::new(
                &format!("slice equals level exactly (m={})", r.slices),
                r.max_discrepancy == 0.0,
                format!("discrepancy {} at pair {:?}", r.max_discrepancy, r.witness),
                Some(0.0),
            ));
        }
    }
    if let [coarse, fine] = runs.as_slice() {
        assertions.push(AssertionRecord::new(
            "discrepancy at least halves with the mesh",
            fine.max_discrepancy <= coarse.max_discrepancy / 2.0 + 1e-12,
            format!("{} -> {}", coarse.max_discrepancy, fine.max_discrepancy),
            Some(1e-12),
        ));
    }
    Ok(ExperimentOutput { csv, assertions })
}
