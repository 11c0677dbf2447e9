//! Acceptance suite: one line per criterion, with the measured values.
//!
//! Runs without the libtest harness so the report is always printed.
//! Exits nonzero when a criterion fails, except for those listed in
//! `KNOWN_FAILURES`, which are still run and reported as FAIL.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use warpcone::actions::{ActionModel, GroupPresentation, Turn};
use warpcone::dynamics::{folner_windows, negative_definite_check, point_masses, roe_transfer, truncated_kernel};
use warpcone::embed::{distortion, kuratowski_embed, kuratowski_from_metric, profinite_embed};
use warpcone::harness::{cone_slice_discrepancy, run_scenario, ActionKind, ActionSpec, BaseKind, Overrides, SpaceSpec};
use warpcone::spaces::{build_net, compact_cone, one_point_extension, FiniteSpace, Model, Point, ProfiniteSpec};
use warpcone::spectral::{
    distortion_lower_bound, level_graph, schreier_family, schreier_graph, spectral_gap, FamilyReport, Graph,
};
use warpcone::warp::{
    faithfulness_radius, mileage_bruteforce, quotient_metric_check, BaseEdgeRule, FaithfulnessStatus, WarpedLevel,
};

/// Smallest normalized gap over the SL2 Schreier graphs for primes 3 to
/// 47, computed once and committed.
const FAMILY_FLOOR: f64 = 0.018699233292003997;
const FAMILY_TOLERANCE: f64 = 1e-6;
/// Limit of the cycle distortion bound as the length grows.
fn cycle_baseline() -> f64 {
    PI / 6f64.sqrt()
}
const PRIMES: [u64; 14] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
const SCHEDULE: [f64; 6] = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

/// Criteria expected to fail, with the reason kept in the project notes.
const KNOWN_FAILURES: [usize; 1] = [11];

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn family() -> &'static FamilyReport {
    static FAMILY: OnceLock<FamilyReport> = OnceLock::new();
    FAMILY.get_or_init(|| schreier_family(&GroupPresentation::sl2(), &PRIMES).expect("family"))
}

fn circle(n: usize) -> Arc<FiniteSpace> {
    Arc::new(build_net(&Model::Torus { dim: 1 }, n, 0).unwrap())
}

fn grid(n: usize) -> Arc<FiniteSpace> {
    Arc::new(build_net(&Model::Torus { dim: 2 }, n, 0).unwrap())
}

fn rotation(n: usize, turn: Turn) -> Arc<ActionModel> {
    Arc::new(ActionModel::rotation(circle(n), vec![turn]).unwrap())
}

fn level(action: &Arc<ActionModel>, r: f64) -> WarpedLevel {
    WarpedLevel::build(Arc::clone(action), r, BaseEdgeRule::Complete, 5000).unwrap()
}

fn random_turn(rng: &mut ChaCha8Rng) -> Turn {
    if rng.random_bool(0.25) {
        Turn::golden()
    } else {
        let den = rng.random_range(2..=14);
        Turn::rational(rng.random_range(1..den), den).unwrap()
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> Arc<ActionModel> {
    match rng.random_range(0..3) {
        0 => {
            let space = circle(rng.random_range(5..=14));
            let gens = rng.random_range(1..=3);
            let vectors = (0..gens).map(|_| vec![random_turn(rng)]).collect();
            Arc::new(ActionModel::translations(space, vectors).unwrap())
        }
        1 => {
            let gens = rng.random_range(1..=3);
            let vectors = (0..gens).map(|_| vec![random_turn(rng), random_turn(rng)]).collect();
            Arc::new(ActionModel::translations(grid(3), vectors).unwrap())
        }
        _ => Arc::new(ActionModel::sl2_torus(grid(3)).unwrap()),
    }
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut pairs, mut converged, mut worst) = (0usize, 0usize, 0.0f64);
    let instances = 24;
    for i in 0..instances {
        let action = random_instance(&mut rng);
        let n = action.space().len();
        for r in [2.0, 10.0, 50.0] {
            let lv = level(&action, r);
            for x in 0..n {
                let mut m4 = Vec::with_capacity(n);
                let mut m5 = Vec::with_capacity(n);
                for y in 0..n {
                    m4.push(mileage_bruteforce(&action, r, x, y, 4).map_err(|e| e.to_string())?);
                    m5.push(mileage_bruteforce(&action, r, x, y, 5).map_err(|e| e.to_string())?);
                }
                // a row whose fifth hop gains nothing anywhere is fixed for every longer budget
                let settled = m4 == m5;
                for (y, &m) in m4.iter().enumerate() {
                    let d = lv.dist(x, y);
                    pairs += 1;
                    if d > m + 1e-9 {
                        return Err(format!("instance {i}, r={r}: dmat {d} above 4-hop mileage {m} at ({x},{y})"));
                    }
                    if settled {
                        converged += 1;
                        worst = worst.max((d - m).abs());
                    }
                }
            }
        }
    }
    if worst > 1e-9 {
        return Err(format!("max |dmat - mileage| = {worst} on settled pairs"));
    }
    Ok(format!(
        "{instances} instances, {pairs} pairs, {converged} settled within 4 hops, max diff {worst:e}"
    ))
}

fn quotient_identity() -> Check {
    let mut parts = Vec::new();
    let exact: [(&str, Arc<ActionModel>, Vec<f64>, usize); 3] = [
        ("Z/2 antipodal", rotation(16, Turn::rational(1, 2).unwrap()), vec![4.0, 16.0, 64.0], 2),
        ("Z/8 rotation", rotation(16, Turn::rational(1, 8).unwrap()), vec![4.0, 16.0, 64.0], 4),
        ("SL2 n=5", Arc::new(ActionModel::sl2_torus(grid(5)).unwrap()), vec![2.0, 4.0, 8.0], 3),
    ];
    for (name, action, levels, radius) in exact {
        for r in levels {
            let rep = quotient_metric_check(&level(&action, r), radius, 100_000).map_err(|e| e.to_string())?;
            if !rep.exact || rep.max_discrepancy != 0.0 {
                return Err(format!("{name} r={r}: discrepancy {} at {:?}", rep.max_discrepancy, rep.witness));
            }
        }
        parts.push(format!("{name} 0"));
    }
    let golden = rotation(32, Turn::golden());
    let mut ratio = 0.0f64;
    for r in [2.0, 4.0, 8.0] {
        let rep = quotient_metric_check(&level(&golden, r), 3, 100_000).map_err(|e| e.to_string())?;
        if !rep.passes() {
            return Err(format!(
                "golden r={r}: discrepancy {} over budget {}",
                rep.max_discrepancy, rep.tolerance
            ));
        }
        ratio = ratio.max(rep.max_discrepancy / rep.tolerance);
    }
    parts.push(format!("golden snapped net within budget (max {ratio:.3} of it)"));
    Ok(parts.join(", "))
}

fn faithfulness_dichotomy() -> Check {
    let mut parts = Vec::new();
    let free = [
        ("golden", rotation(128, Turn::golden())),
        ("sqrt2", rotation(128, "0.41421356237309503".parse().unwrap())),
    ];
    for (name, action) in &free {
        let mut radii = Vec::new();
        for n in 1..=3 {
            let rep = faithfulness_radius(action, n, &SCHEDULE, BaseEdgeRule::Complete, 100_000)
                .map_err(|e| e.to_string())?;
            match (rep.status, rep.faithful_level) {
                (FaithfulnessStatus::FaithfulAt, Some(r)) => radii.push(r),
                _ => return Err(format!("{name} N={n}: {} up to {:?}", rep.status, rep.max_level_tested)),
            }
        }
        if radii.windows(2).any(|w| w[1] < w[0]) {
            return Err(format!("{name}: R_N decreases: {radii:?}"));
        }
        parts.push(format!("{name} R_1..3 = {radii:?}"));
    }

    let bases: Vec<(&str, Arc<ActionModel>)> = vec![
        ("golden", rotation(16, Turn::golden())),
        ("1/5", rotation(10, Turn::rational(1, 5).unwrap())),
        (
            "translations",
            Arc::new(ActionModel::translations(grid(4), vec![vec![Turn::golden(), Turn::rational(1, 4).unwrap()]]).unwrap()),
        ),
    ];
    let mut witnesses = 0;
    for (name, action) in &bases {
        let base = action.space_arc();
        let wrapped = [
            ("extension", Arc::new(one_point_extension(&base, base.model().diameter()).unwrap())),
            ("cone", Arc::new(compact_cone(&base, 3).unwrap())),
        ];
        for (how, space) in wrapped {
            let lifted = Arc::new(action.lift(Arc::clone(&space)).unwrap());
            for n in 1..=3 {
                let rep = faithfulness_radius(&lifted, n, &SCHEDULE, BaseEdgeRule::Complete, 100_000)
                    .map_err(|e| e.to_string())?;
                let Some((g, y)) = rep.fixed_point.filter(|_| rep.status == FaithfulnessStatus::Failure) else {
                    return Err(format!("{name} {how} N={n}: no fixed-point witness ({})", rep.status));
                };
                if !matches!(space.point(y), Point::Star | Point::Apex) {
                    return Err(format!("{name} {how} N={n}: witness {g} fixes {:?}", space.point(y)));
                }
                witnesses += 1;
            }
        }
    }
    parts.push(format!("{witnesses} failure witnesses at the star or apex"));
    Ok(parts.join("; "))
}

fn expander_family() -> Check {
    let fam = family();
    for rep in &fam.reports {
        if rep.components != 1 {
            return Err(format!("n={} has {} components", rep.n, rep.components));
        }
        if rep.vertex_count as u64 != rep.n * rep.n - 1 {
            return Err(format!("n={} has {} vertices", rep.n, rep.vertex_count));
        }
        if let Some(h) = rep.exact_h {
            if !(rep.cheeger_lower <= h + 1e-12 && h <= rep.cheeger_upper + 1e-12) {
                return Err(format!(
                    "n={}: Cheeger sandwich {} <= {h} <= {} fails",
                    rep.n, rep.cheeger_lower, rep.cheeger_upper
                ));
            }
        }
    }
    if fam.family_floor < FAMILY_FLOOR - FAMILY_TOLERANCE {
        return Err(format!("floor {} below baseline {FAMILY_FLOOR}", fam.family_floor));
    }
    let sandwiches = fam.reports.iter().filter(|r| r.exact_h.is_some()).count();
    Ok(format!(
        "primes 3..47 connected with n^2-1 vertices, floor {:.12} vs baseline {FAMILY_FLOOR:.12}, {sandwiches} exact Cheeger sandwiches",
        fam.family_floor
    ))
}

fn schreier_in_cone() -> Check {
    let mut parts = Vec::new();
    for n in [5u64, 7] {
        let action = Arc::new(ActionModel::sl2_torus(grid(n as usize)).unwrap());
        let sg = schreier_graph(action.group(), n, (1, 0)).map_err(|e| e.to_string())?;
        let net: Vec<usize> = sg
            .vertices()
            .iter()
            .map(|&(a, b)| action.space().find_exact(&Point::lattice(vec![a as i64, b as i64], n as i64)))
            .collect::<Option<_>>()
            .ok_or("orbit point missing from the net")?;
        let hops: Vec<Vec<u32>> = (0..sg.vertex_count()).map(|v| sg.graph().bfs(v)).collect();
        let mut found = None;
        for r in [8.0, 16.0, 32.0, 64.0] {
            let lv = level(&action, r);
            let mut pairs = 0;
            let ok = (0..net.len()).all(|u| {
                (0..net.len()).all(|v| {
                    let h = hops[u][v];
                    if h > 3 {
                        return true;
                    }
                    pairs += 1;
                    lv.dist(net[u], net[v]) == h as f64
                })
            });
            if ok {
                found = Some((r, pairs));
                break;
            }
        }
        match found {
            Some((r, pairs)) => parts.push(format!("n={n} exact at r={r} on {pairs} pairs")),
            None => return Err(format!("n={n}: no tested level matches the Schreier distances")),
        }
    }
    Ok(parts.join(", "))
}

fn profinite_embedding() -> Check {
    let mut worst = 0.0f64;
    for depth in 1..=6 {
        let spec = ProfiniteSpec::dyadic(depth, 0.5).map_err(|e| e.to_string())?;
        let space = build_net(&Model::Profinite(spec.clone()), 2, 0).map_err(|e| e.to_string())?;
        for p in [1.0, 2.0, 4.0] {
            let table = profinite_embed(&spec, space.points(), p).map_err(|e| e.to_string())?;
            let rep = distortion(&space, &table).map_err(|e| e.to_string())?;
            let closed = (1.0 - 2f64.powf(-p)).powf(-1.0 / p);
            let err = (rep.expansion_max - closed).abs().max((rep.contraction_min - closed).abs());
            worst = worst.max(err);
            if err > 1e-9 {
                return Err(format!(
                    "depth {depth} p={p}: stretch in [{}, {}] vs {closed}",
                    rep.contraction_min, rep.expansion_max
                ));
            }
            if p == 1.0 && (rep.expansion_max != 2.0 || rep.contraction_min != 2.0) {
                return Err(format!("depth {depth}: p=1 stretch {} is not exactly 2", rep.expansion_max));
            }
        }
    }
    Ok(format!(
        "depths 1..6, p in {{1,2,4}}: every pair stretched by the closed form (max err {worst:e}), p=1 exactly 2"
    ))
}

fn kuratowski_bounds() -> Check {
    let nets = [
        ("circle 32", build_net(&Model::Torus { dim: 1 }, 32, 0).unwrap()),
        ("grid 6x6", build_net(&Model::Torus { dim: 2 }, 6, 0).unwrap()),
        ("3-torus 3^3", build_net(&Model::Torus { dim: 3 }, 3, 0).unwrap()),
    ];
    let mut parts = Vec::new();
    for (name, space) in &nets {
        let mass = space.total_mass();
        let mut dists = Vec::new();
        for p in [1.0, 2.0, 4.0] {
            let t = kuratowski_embed(space, p).map_err(|e| e.to_string())?;
            let bound = mass.powf(1.0 / p);
            for i in 0..space.len() {
                for j in 0..space.len() {
                    if t.norm_diff(i, j) > bound * space.dist(i, j) + 1e-9 {
                        return Err(format!("{name} p={p}: pair ({i},{j}) exceeds the Lipschitz bound"));
                    }
                }
            }
            dists.push(distortion(space, &t).map_err(|e| e.to_string())?.distortion);
        }
        if space.len() == 32 {
            let hi = dists.iter().cloned().fold(f64::MIN, f64::max);
            let lo = dists.iter().cloned().fold(f64::MAX, f64::min);
            if hi > 1.5 * lo {
                return Err(format!("{name}: distortions {dists:?} exceed the 1.5 band"));
            }
            parts.push(format!("{name} distortions {:.4}/{:.4}/{:.4}", dists[0], dists[1], dists[2]));
        }
    }
    Ok(format!("Lipschitz bound holds entrywise on 3 torus nets; {}", parts.join(", ")))
}

fn negative_type() -> Check {
    let cases: [(&str, Arc<ActionModel>, usize); 3] = [
        ("Z/16 rotation", rotation(16, Turn::rational(1, 16).unwrap()), 4),
        ("SL2 n=5", Arc::new(ActionModel::sl2_torus(grid(5)).unwrap()), 2),
        ("golden", rotation(24, Turn::golden()), 3),
    ];
    let mut parts = Vec::new();
    for (name, action, radius) in cases {
        let levels = [2.0, 4.0, 8.0];
        let tables = levels
            .iter()
            .map(|&r| kuratowski_from_metric(&level(&action, r), action.space().weights().to_vec(), 2.0))
            .collect::<warpcone::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let k = truncated_kernel(&action, &levels, &tables, radius, 100_000).map_err(|e| e.to_string())?;
        let rep = negative_definite_check(&k, 1000, 11);
        if rep.max_value > 1e-8 {
            return Err(format!("{name}: quadratic form reaches {}", rep.max_value));
        }
        if k.normalization_defect() != 0.0 {
            return Err(format!("{name}: h(e, y) = {}", k.normalization_defect()));
        }
        if k.is_exact() && k.symmetry_defect() != 0.0 {
            return Err(format!("{name}: symmetry defect {}", k.symmetry_defect()));
        }
        parts.push(format!("{name} max {:.2e}", rep.max_value));
    }
    Ok(format!("1000 trials each: {}; h(e,.)=0, exact orbits symmetric", parts.join(", ")))
}

fn roe_transfer_check() -> Check {
    let orbit = rotation(101, Turn::rational(10, 101).unwrap());
    let mut parts = Vec::new();
    for f in 1..=2 {
        let lv = level(&orbit, 50.0);
        let res = roe_transfer(&lv, &folner_windows(&orbit, f), f, None).map_err(|e| e.to_string())?;
        let want = 2.0 / (2 * f + 1) as f64;
        if (res.defect - want).abs() > 1e-9 {
            return Err(format!("F={f}: defect {} vs {want}", res.defect));
        }
        if res.defect > res.input_variation + 1e-12 {
            return Err(format!("F={f}: defect above input variation"));
        }
        parts.push(format!("F={f} defect {:.6}", res.defect));
    }
    let mut admissible = 0;
    let others = [
        (rotation(64, Turn::golden()), 0usize),
        (rotation(64, Turn::golden()), 1),
        (rotation(48, Turn::rational(1, 48).unwrap()), 1),
        (rotation(48, Turn::rational(5, 48).unwrap()), 2),
    ];
    for (action, f) in &others {
        for r in [8.0, 32.0] {
            let lv = level(action, r);
            let maps = if *f == 0 { point_masses(action.space().len()) } else { folner_windows(action, *f) };
            match roe_transfer(&lv, &maps, *f, None) {
                Ok(res) => {
                    if res.defect > res.input_variation + 1e-12 {
                        return Err(format!("r={r} F={f}: defect {} above variation {}", res.defect, res.input_variation));
                    }
                    admissible += 1;
                }
                // outside the admissible range for this support radius or level
                Err(_) => continue,
            }
        }
    }
    parts.push(format!("defect <= input variation on {admissible} more admissible instances"));
    Ok(parts.join(", "))
}

fn cone_section() -> Check {
    let circle_spec = |res: usize, slices: usize| SpaceSpec {
        kind: BaseKind::Torus,
        dim: Some(1),
        resolution: Some(res),
        depth: None,
        ratio: None,
        extension: None,
        cone_slices: Some(slices),
    };
    let act = |kind: ActionKind, turns: &[&str]| ActionSpec {
        kind,
        turns: turns.iter().map(|s| s.to_string()).collect(),
        vectors: Vec::new(),
    };
    let mut worst_ratio = 0.0f64;
    for turn in ["golden", "0.41421356237309503"] {
        for theta in [0.25, 1.0 / 3.0, 0.5, 1.0] {
            let rep = cone_slice_discrepancy(&circle_spec(16, 4), &act(ActionKind::Rotation, &[turn]), theta, 8.0, 0, 5000)
                .map_err(|e| e.to_string())?;
            if rep.max_discrepancy > rep.tolerance {
                return Err(format!(
                    "{turn} theta={theta}: discrepancy {} over {}",
                    rep.max_discrepancy, rep.tolerance
                ));
            }
            worst_ratio = worst_ratio.max(rep.max_discrepancy / rep.tolerance);
        }
    }
    let trivial = act(ActionKind::Trivial, &[]);
    for theta in [0.25, 0.5, 1.0] {
        let rep = cone_slice_discrepancy(&circle_spec(16, 4), &trivial, theta, 8.0, 0, 5000).map_err(|e| e.to_string())?;
        if rep.max_discrepancy != 0.0 {
            return Err(format!("trivial theta={theta}: discrepancy {}", rep.max_discrepancy));
        }
    }
    let coarse = cone_slice_discrepancy(&circle_spec(16, 4), &trivial, 1.0 / 3.0, 8.0, 0, 5000).map_err(|e| e.to_string())?;
    let fine = cone_slice_discrepancy(&circle_spec(32, 8), &trivial, 1.0 / 3.0, 8.0, 0, 5000).map_err(|e| e.to_string())?;
    if fine.max_discrepancy > coarse.max_discrepancy / 2.0 + 1e-12 {
        return Err(format!(
            "halving the mesh took {} to {}",
            coarse.max_discrepancy, fine.max_discrepancy
        ));
    }
    Ok(format!(
        "rotations within budget (max {worst_ratio:.3} of it), trivial group exact, off-grid mismatch {:.4} -> {:.4} under halving",
        coarse.max_discrepancy, fine.max_discrepancy
    ))
}

fn amenable_vs_expander() -> Check {
    let mut failures = Vec::new();
    // each level gets its own net, four points per unit of level
    let gaps: Vec<f64> = [8usize, 16, 32, 64]
        .iter()
        .map(|&r| spectral_gap(&level_graph(&rotation(4 * r, Turn::golden()), r as f64)).lambda1_norm)
        .collect();
    if gaps.windows(2).any(|w| w[1] >= w[0]) {
        failures.push(format!("level gaps not decreasing: {gaps:?}"));
    }
    let fam = family();
    if fam.family_floor < FAMILY_FLOOR - FAMILY_TOLERANCE {
        failures.push(format!("family floor {} below baseline", fam.family_floor));
    }
    let low: Vec<String> = fam
        .reports
        .iter()
        .filter(|r| r.d_lb.is_none_or(|d| d <= 1.05))
        .map(|r| format!("n={} D_lb={:.4}", r.n, r.d_lb.unwrap_or(f64::NAN)))
        .collect();
    if !low.is_empty() {
        failures.push(format!("Schreier bound not above 1.05 for {}", low.join(", ")));
    }
    let mut cycles = Vec::new();
    for n in [8, 16, 48, 528, 2208] {
        let d = distortion_lower_bound(&Graph::cycle(n)).map_err(|e| e.to_string())?;
        if d >= cycle_baseline() {
            failures.push(format!("C{n} bound {d} not below baseline"));
        }
        cycles.push(format!("C{n} {d:.4}"));
    }
    let summary = format!(
        "level gaps {:.4} -> {:.4}, floor {:.6}, cycles {} below {:.4}",
        gaps[0],
        gaps[3],
        fam.family_floor,
        cycles.join(" "),
        cycle_baseline()
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn determinism() -> Check {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut configs: Vec<_> = std::fs::read_dir(&root)
        .map_err(|e| format!("{}: {e}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    configs.sort();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for config in &configs {
        let mut bytes = Vec::new();
        for dir in &dirs {
            let overrides = Overrides {
                out: Some(dir.path().to_path_buf()),
                ..Overrides::default()
            };
            let out = run_scenario(config, &overrides).map_err(|e| format!("{}: {e}", config.display()))?;
            bytes.push(std::fs::read(&out.csv_path).unwrap());
        }
        if bytes[0] != bytes[1] {
            return Err(format!("{} produced different CSVs", config.display()));
        }
    }
    Ok(format!("{} scenarios rerun with byte-identical CSVs", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("quotient-metric identity", quotient_identity, Duration::from_secs(60)),
        ("faithfulness dichotomy", faithfulness_dichotomy, Duration::from_secs(120)),
        ("expander family", expander_family, Duration::from_secs(120)),
        ("Schreier graphs inside warped levels", schreier_in_cone, Duration::from_secs(120)),
        ("profinite embedding", profinite_embedding, Duration::from_secs(10)),
        ("Kuratowski bounds", kuratowski_bounds, Duration::from_secs(30)),
        ("negative-type kernel", negative_type, Duration::from_secs(30)),
        ("Roe transfer", roe_transfer_check, Duration::from_secs(30)),
        ("cone-section identity", cone_section, Duration::from_secs(120)),
        ("amenable vs expander contrast", amenable_vs_expander, Duration::from_secs(300)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut unexpected = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= *limit => (true, d),
            Ok(d) => (false, format!("over the {:?} budget; {d}", limit)),
            Err(d) => (false, d),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if !ok && KNOWN_FAILURES.contains(&id) { " (known)" } else { "" };
        println!("[{tag}] {id:>2} {name} ({:.1} s){note}: {detail}", took.as_secs_f64());
        if !ok && !KNOWN_FAILURES.contains(&id) {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed");
        ExitCode::FAILURE
    }
}
