//! Finite nets of compact metric spaces and the cone constructions on them.

mod cone;
mod io;
mod point;
mod profinite;

pub use cone::{compact_cone, cone_index, cone_metric, one_point_extension, ConeParams};
pub use io::{read_space_csv, write_space_csv};
pub use point::Point;
pub use profinite::ProfiniteSpec;

pub(crate) use point::{gcd, lcm, sphere_distance, torus_distance};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of reference samples used to check a net's covering radius.
const TORUS_REFERENCE_SAMPLES: usize = 1024;
const SPHERE_REFERENCE_SAMPLES: usize = 20_000;
/// Exhaustive triangle scans are used up to this many points.
const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 200;
const SAMPLED_TRIANGLES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Torus,
    Sphere3,
    Profinite,
    CompactCone,
    OnePointExt,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Torus => "torus",
            SpaceKind::Sphere3 => "sphere3",
            SpaceKind::Profinite => "profinite",
            SpaceKind::CompactCone => "compact_cone",
            SpaceKind::OnePointExt => "one_point_ext",
        }
    }
}

impl std::fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The continuous model space a net discretizes. Evaluates the model metric
/// on arbitrary payloads, including images of net points that are not
/// themselves net points.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Torus { dim: usize },
    Sphere3,
    Profinite(ProfiniteSpec),
    CompactCone { base: Box<Model>, diameter: f64 },
    OnePointExt { base: Box<Model>, star_distance: f64 },
}

impl Model {
    pub fn kind(&self) -> SpaceKind {
        match self {
            Model::Torus { .. } => SpaceKind::Torus,
            Model::Sphere3 => SpaceKind::Sphere3,
            Model::Profinite(_) => SpaceKind::Profinite,
            Model::CompactCone { .. } => SpaceKind::CompactCone,
            Model::OnePointExt { .. } => SpaceKind::OnePointExt,
        }
    }

    /// Diameter of the continuous model.
    pub fn diameter(&self) -> f64 {
        match self {
            Model::Torus { dim } => *dim as f64 / 2.0,
            Model::Sphere3 => std::f64::consts::PI,
            Model::Profinite(spec) => spec.decay_weights[0],
            Model::CompactCone { diameter, .. } => *diameter,
            Model::OnePointExt {
                base,
                star_distance,
            } => base.diameter().max(*star_distance),
        }
    }

    /// Model distance between two payloads.
    ///
    /// # Panics
    /// If a payload does not belong to this model.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match self {
            Model::Torus { .. } => torus_distance(a, b),
            Model::Sphere3 => match (a, b) {
                (Point::Quat(x), Point::Quat(y)) => sphere_distance(x, y),
                _ => panic!("sphere model given non-quaternion payload"),
            },
            Model::Profinite(spec) => match (a, b) {
                (Point::Profinite { lift: x }, Point::Profinite { lift: y }) => {
                    spec.distance(*x, *y)
                }
                _ => panic!("profinite model given foreign payload"),
            },
            Model::CompactCone { base, diameter } => {
                let (ta, ya) = cone_parts(a);
                let (tb, yb) = cone_parts(b);
                let radial = (ta - tb).abs() * diameter;
                let m = ta.min(tb);
                if m == 0.0 {
                    radial
                } else {
                    radial + m * base.distance(ya.unwrap(), yb.unwrap())
                }
            }
            Model::OnePointExt {
                base,
                star_distance,
            } => match (a, b) {
                (Point::Star, Point::Star) => 0.0,
                (Point::Star, _) | (_, Point::Star) => *star_distance,
                _ => base.distance(a, b),
            },
        }
    }

    /// Parse the CSV tokens written by [`Point::tokens`] back into a payload.
    pub(crate) fn parse_tokens(&self, tokens: &[&str]) -> std::result::Result<Point, String> {
        let float = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));
        match self {
            Model::Torus { dim } => {
                if tokens.len() != *dim {
                    return Err(format!("expected {dim} coordinates, got {}", tokens.len()));
                }
                if tokens.iter().all(|t| t.contains('/')) {
                    let mut num = Vec::with_capacity(*dim);
                    let mut den = 1i64;
                    let mut parts = Vec::with_capacity(*dim);
                    for t in tokens {
                        let (a, b) = t.split_once('/').expect("checked");
                        let a: i64 = a.parse().map_err(|e| format!("bad numerator `{a}`: {e}"))?;
                        let b: i64 = b.parse().map_err(|e| format!("bad denominator `{b}`: {e}"))?;
                        if b <= 0 {
                            return Err(format!("nonpositive denominator in `{t}`"));
                        }
                        den = lcm(den, b);
                        parts.push((a, b));
                    }
                    for (a, b) in parts {
                        num.push(a * (den / b));
                    }
                    Ok(Point::lattice(num, den))
                } else {
                    let c = tokens.iter().map(|t| float(t)).collect::<std::result::Result<_, _>>()?;
                    Ok(Point::torus(c))
                }
            }
            Model::Sphere3 => {
                if tokens.len() != 4 {
                    return Err(format!("expected 4 quaternion components, got {}", tokens.len()));
                }
                let mut q = [0.0; 4];
                for (k, t) in tokens.iter().enumerate() {
                    q[k] = float(t)?;
                }
                Ok(Point::Quat(q))
            }
            Model::Profinite(_) => match tokens {
                [t] => t
                    .parse()
                    .map(|lift| Point::Profinite { lift })
                    .map_err(|e| format!("bad lift `{t}`: {e}")),
                _ => Err("expected a single lift".into()),
            },
            Model::CompactCone { base, .. } => match tokens {
                ["apex"] => Ok(Point::Apex),
                [theta, rest @ ..] => Ok(Point::Cone {
                    theta: float(theta)?,
                    base: Box::new(base.parse_tokens(rest)?),
                }),
                [] => Err("empty cone point".into()),
            },
            Model::OnePointExt { base, .. } => match tokens {
                ["star"] => Ok(Point::Star),
                _ => base.parse_tokens(tokens),
            },
        }
    }
}

fn cone_parts(p: &Point) -> (f64, Option<&Point>) {
    match p {
        Point::Apex => (0.0, None),
        Point::Cone { theta, base } => (*theta, Some(base)),
        _ => panic!("cone model given non-cone payload"),
    }
}

/// A finite net of a compact metric space: payloads, a dense distance
/// matrix, measure weights and a covering radius.
#[derive(Clone, Debug)]
pub struct FiniteSpace {
    model: Model,
    points: Vec<Point>,
    dist: Vec<f64>,
    weights: Vec<f64>,
    mesh: f64,
    /// Points per axis when the net is the full regular torus grid.
    grid: Option<usize>,
}

impl FiniteSpace {
    /// Assemble a space from parts, computing the distance matrix.
    pub fn from_parts(model: Model, points: Vec<Point>, weights: Vec<f64>, mesh: f64) -> Result<Self> {
        Self::assemble(model, points, weights, mesh, None)
    }

    fn assemble(
        model: Model,
        points: Vec<Point>,
        weights: Vec<f64>,
        mesh: f64,
        grid: Option<usize>,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::param("points", "empty net"));
        }
        if weights.len() != n {
            return Err(Error::param(
                "weights",
                format!("{} weights for {n} points", weights.len()),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::param("weights", "weights must be finite and nonnegative"));
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::param("weights", "total mass must be positive"));
        }
        if !(mesh > 0.0) || !mesh.is_finite() {
            return Err(Error::param("mesh", format!("{mesh} is not positive")));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = model.distance(&points[i], &points[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(FiniteSpace {
            model,
            points,
            dist,
            weights,
            mesh,
            grid,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kind(&self) -> SpaceKind {
        self.model.kind()
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }

    /// Row-major `len x len` distance matrix.
    pub fn dist_matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// Largest distance realized on the net.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_exact(&self) -> bool {
        self.points.iter().all(Point::is_exact)
    }

    /// Same net with a different measure.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::param("weights", "length mismatch"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::param("weights", "weights must be nonnegative with positive sum"));
        }
        self.weights = weights;
        Ok(self)
    }

    /// Distance from an arbitrary payload to net point `i`.
    pub fn distance_to(&self, p: &Point, i: usize) -> f64 {
        self.model.distance(p, &self.points[i])
    }

    /// Nearest net point to `p` (ties to the lowest index) and its distance.
    pub fn snap(&self, p: &Point) -> (usize, f64) {
        if let Some(n) = self.grid {
            if let Some(i) = grid_snap(p, n) {
                return (i, self.distance_to(p, i));
            }
        }
        if let Model::Sphere3 = self.model {
            if let Point::Quat(q) = p {
                // geodesic distance is decreasing in the inner product
                let mut best = (0, f64::NEG_INFINITY);
                for (i, x) in self.points.iter().enumerate() {
                    if let Point::Quat(y) = x {
                        let dot = q[0] * y[0] + q[1] * y[1] + q[2] * y[2] + q[3] * y[3];
                        if dot > best.1 {
                            best = (i, dot);
                        }
                    }
                }
                return (best.0, self.distance_to(p, best.0));
            }
        }
        let mut best = (0, f64::INFINITY);
        for i in 0..self.len() {
            let d = self.distance_to(p, i);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Index of a net point whose payload equals `p` exactly.
    pub fn find_exact(&self, p: &Point) -> Option<usize> {
        if let Some(n) = self.grid {
            if let Point::Lattice { den, .. } = p {
                if (n as i64) % den == 0 {
                    let i = grid_snap(p, n)?;
                    return (&self.points[i] == p).then_some(i);
                }
                return None;
            }
        }
        self.points.iter().position(|q| q == p)
    }

    /// Verify the metric axioms: exhaustively up to 200 points, on seeded
    /// random triples above.
    pub fn check_metric(&self, seed: u64) -> Result<()> {
        let n = self.len();
        let scale = self.diameter().max(1.0);
        let slack = 1e-12 * scale;
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::MetricViolation(format!("d({i},{i}) = {}", self.dist(i, i))));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if !(d >= 0.0) || d != self.dist(j, i) {
                    return Err(Error::MetricViolation(format!(
                        "d({i},{j}) = {d}, d({j},{i}) = {}",
                        self.dist(j, i)
                    )));
                }
            }
        }
        let triangle = |i: usize, j: usize, k: usize| -> Result<()> {
            let lhs = self.dist(i, j);
            let rhs = self.dist(i, k) + self.dist(k, j);
            if lhs > rhs + slack {
                return Err(Error::MetricViolation(format!(
                    "d({i},{j}) = {lhs} > d({i},{k}) + d({k},{j}) = {rhs}"
                )));
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..n {
                        triangle(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..SAMPLED_TRIANGLES {
                triangle(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(())
    }

    /// Largest distance from a reference sample of `samples` model points to
    /// the net. Only torus and sphere models can be sampled.
    pub fn sampled_covering_radius(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let p = match &self.model {
                Model::Torus { dim } => Point::torus((0..*dim).map(|_| rng.random::<f64>()).collect()),
                Model::Sphere3 => random_quaternion(&mut rng),
                other => return Err(Error::UnsupportedKind(other.kind().to_string())),
            };
            worst = worst.max(self.snap(&p).1);
        }
        Ok(worst)
    }
}

fn random_quaternion(rng: &mut ChaCha8Rng) -> Point {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n2: f64 = q.iter().map(|c| c * c).sum();
        if n2 > 1e-12 {
            return Point::quat(q);
        }
    }
}

/// Nearest point of the regular grid with `n` points per axis, breaking
/// per-axis ties towards the smaller residue.
fn grid_snap(p: &Point, n: usize) -> Option<usize> {
    let n_i = n as i64;
    let mut index = 0usize;
    let mut stride = 1usize;
    let mut push = |k: i64| {
        index += k as usize * stride;
        stride *= n;
    };
    match p {
        Point::Lattice { num, den } => {
            for &a in num {
                let t = a as i128 * n_i as i128;
                let q = t.div_euclid(*den as i128) as i64;
                let rem = t.rem_euclid(*den as i128) * 2;
                let k = match rem.cmp(&(*den as i128)) {
                    std::cmp::Ordering::Less => q,
                    std::cmp::Ordering::Greater => q + 1,
                    std::cmp::Ordering::Equal => q.rem_euclid(n_i).min((q + 1).rem_euclid(n_i)),
                };
                push(k.rem_euclid(n_i));
            }
        }
        Point::Torus(c) => {
            for &x in c {
                let t = x * n as f64;
                let q = t.floor();
                let frac = t - q;
                let q = q as i64;
                let k = if frac < 0.5 {
                    q
                } else if frac > 0.5 {
                    q + 1
                } else {
                    q.rem_euclid(n_i).min((q + 1).rem_euclid(n_i))
                };
                push(k.rem_euclid(n_i));
            }
        }
        _ => return None,
    }
    Some(index)
}

/// Build a net of a torus, sphere or profinite model.
///
/// * torus: the regular grid with `resolution` points per axis, stored as
///   exact rationals; index `sum_i k_i * resolution^i`.
/// * sphere3: `resolution` unit quaternions chosen by farthest-point
///   selection from a seeded random candidate pool.
/// * profinite: every point of the truncated quotient; `resolution` is not
///   used.
///
/// Compact cones and one-point extensions are built from an existing net
/// with [`compact_cone`] and [`one_point_extension`].
pub fn build_net(model: &Model, resolution: usize, seed: u64) -> Result<FiniteSpace> {
    if resolution < 2 {
        return Err(Error::param("resolution", format!("{resolution} < 2")));
    }
    let space = match model {
        Model::Torus { dim } => {
            if *dim == 0 {
                return Err(Error::param("dim", "torus dimension must be positive"));
            }
            let count = resolution
                .checked_pow(*dim as u32)
                .filter(|&c| c <= 1 << 24)
                .ok_or_else(|| Error::param("resolution", "grid too large"))?;
            let den = resolution as i64;
            let points: Vec<Point> = (0..count)
                .map(|mut idx| {
                    let num = (0..*dim)
                        .map(|_| {
                            let k = (idx % resolution) as i64;
                            idx /= resolution;
                            k
                        })
                        .collect();
                    Point::lattice(num, den)
                })
                .collect();
            let mesh = *dim as f64 / (2.0 * resolution as f64);
            let space = FiniteSpace::assemble(
                model.clone(),
                points,
                vec![1.0 / count as f64; count],
                mesh,
                Some(resolution),
            )?;
            let sampled = space.sampled_covering_radius(TORUS_REFERENCE_SAMPLES, seed)?;
            if sampled > mesh * (1.0 + 1e-12) {
                return Err(Error::MetricViolation(format!(
                    "reference sample at distance {sampled} exceeds grid mesh {mesh}"
                )));
            }
            space
        }
        Model::Sphere3 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pool = (40 * resolution).max(2000);
            let candidates: Vec<[f64; 4]> = (0..pool)
                .map(|_| match random_quaternion(&mut rng) {
                    Point::Quat(q) => q,
                    _ => unreachable!(),
                })
                .collect();
            let mut nearest = vec![f64::INFINITY; pool];
            let mut chosen = Vec::with_capacity(resolution);
            let mut next = 0usize;
            for _ in 0..resolution.min(pool) {
                chosen.push(Point::Quat(candidates[next]));
                let c = candidates[next];
                let mut far = (0, -1.0);
                for (k, q) in candidates.iter().enumerate() {
                    let d = sphere_distance(q, &c);
                    if d < nearest[k] {
                        nearest[k] = d;
                    }
                    if nearest[k] > far.1 {
                        far = (k, nearest[k]);
                    }
                }
                next = far.0;
            }
            let count = chosen.len();
            // provisional mesh; replaced by the certified value below
            let mut space = FiniteSpace::assemble(
                model.clone(),
                chosen,
                vec![1.0 / count as f64; count],
                std::f64::consts::PI,
                None,
            )?;
            space.mesh = space.sampled_covering_radius(SPHERE_REFERENCE_SAMPLES, seed ^ 0x5eed)?;
            space
        }
        Model::Profinite(spec) => {
            spec.validate()?;
            let count = usize::try_from(spec.top_size())
                .ok()
                .filter(|&c| c <= 1 << 16)
                .ok_or_else(|| Error::param("quotient_sizes", "truncated quotient too large"))?;
            let points = (0..count as u64).map(|lift| Point::Profinite { lift }).collect();
            let mesh = spec.decay_weights.last().copied().expect("validated") * spec.ratio;
            FiniteSpace::assemble(model.clone(), points, vec![1.0 / count as f64; count], mesh, None)?
        }
        Model::CompactCone { .. } | Model::OnePointExt { .. } => {
            return Err(Error::UnsupportedKind(model.kind().to_string()));
        }
    };
    Ok(space)
}
