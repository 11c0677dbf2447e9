use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spaces::{gcd, lcm, FiniteSpace, Model, Point, SpaceKind};

use super::{Element, GroupFamily, GroupPresentation};

/// Fraction of a full turn, exact when rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Turn {
    Rational(i64, i64),
    Real(f64),
}

impl Turn {
    pub fn rational(num: i64, den: i64) -> Result<Turn> {
        if den <= 0 {
            return Err(Error::param("turn", format!("denominator {den} must be positive")));
        }
        let g = gcd(num, den).max(1);
        Ok(Turn::Rational(num / g, den / g))
    }

    /// `(sqrt 5 - 1) / 2`.
    pub fn golden() -> Turn {
        Turn::Real((5f64.sqrt() - 1.0) / 2.0)
    }

    pub fn value(self) -> f64 {
        match self {
            Turn::Rational(a, b) => a as f64 / b as f64,
            Turn::Real(x) => x,
        }
    }

    fn neg(self) -> Turn {
        match self {
            Turn::Rational(a, b) => Turn::Rational(-a, b),
            Turn::Real(x) => Turn::Real(-x),
        }
    }

    /// Additive order mod 1, if finite.
    pub fn order(self) -> Option<i64> {
        match self {
            Turn::Rational(_, b) => Some(b),
            Turn::Real(_) => None,
        }
    }
}

impl FromStr for Turn {
    type Err = Error;

    /// Accepts `p/q`, `golden`, or a decimal number.
    fn from_str(s: &str) -> Result<Turn> {
        let s = s.trim();
        if s == "golden" {
            return Ok(Turn::golden());
        }
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| Error::param("turn", format!("bad numerator in `{s}`")))?;
            let b = b.trim().parse().map_err(|_| Error::param("turn", format!("bad denominator in `{s}`")))?;
            return Turn::rational(a, b);
        }
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Turn::Real)
            .ok_or_else(|| Error::param("turn", format!("`{s}` is not p/q, golden or a number")))
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Turn::Rational(a, b) => write!(f, "{a}/{b}"),
            Turn::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Exact action of one generator on point payloads. Cone payloads are
/// mapped slice-wise; the apex and the added star are fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum PointMap {
    Identity,
    /// Torus translation by a vector of turns.
    Translate(Vec<Turn>),
    /// Integer matrix on the 2-torus acting on column vectors.
    Linear([i64; 4]),
    /// Left multiplication by a unit quaternion on the 3-sphere.
    LeftMultiply([f64; 4]),
    /// Translation of profinite lifts mod the truncated quotient size.
    Shift { by: i64, modulus: u64 },
}

impl PointMap {
    pub fn inverse(&self) -> PointMap {
        match self {
            PointMap::Identity => PointMap::Identity,
            PointMap::Translate(v) => PointMap::Translate(v.iter().map(|t| t.neg()).collect()),
            PointMap::Linear(m) => PointMap::Linear([m[3], -m[1], -m[2], m[0]]),
            PointMap::LeftMultiply(q) => PointMap::LeftMultiply([q[0], -q[1], -q[2], -q[3]]),
            PointMap::Shift { by, modulus } => PointMap::Shift {
                by: -by,
                modulus: *modulus,
            },
        }
    }

    /// Image of `p`, or `None` when the payload does not fit the map.
    pub fn apply(&self, p: &Point) -> Option<Point> {
        match p {
            Point::Apex | Point::Star => return Some(p.clone()),
            Point::Cone { theta, base } => {
                return Some(Point::Cone {
                    theta: *theta,
                    base: Box::new(self.apply(base)?),
                })
            }
            _ => {}
        }
        match (self, p) {
            (PointMap::Identity, _) => Some(p.clone()),
            (PointMap::Translate(v), Point::Lattice { num, den }) if v.len() == num.len() => {
                if v.iter().all(|t| matches!(t, Turn::Rational(..))) {
                    let l = v.iter().fold(*den, |acc, t| match t {
                        Turn::Rational(_, b) => lcm(acc, *b),
                        Turn::Real(_) => acc,
                    });
                    let shifted = num
                        .iter()
                        .zip(v)
                        .map(|(&a, t)| match t {
                            Turn::Rational(c, b) => a * (l / den) + c * (l / b),
                            Turn::Real(_) => unreachable!(),
                        })
                        .collect();
                    Some(Point::lattice(shifted, l))
                } else {
                    let c = p.torus_coords()?;
                    Some(Point::torus(c.iter().zip(v).map(|(x, t)| x + t.value()).collect()))
                }
            }
            (PointMap::Translate(v), Point::Torus(c)) if v.len() == c.len() => {
                Some(Point::torus(c.iter().zip(v).map(|(x, t)| x + t.value()).collect()))
            }
            (PointMap::Linear(m), Point::Lattice { num, den }) if num.len() == 2 => Some(Point::lattice(
                vec![m[0] * num[0] + m[1] * num[1], m[2] * num[0] + m[3] * num[1]],
                *den,
            )),
            (PointMap::Linear(m), Point::Torus(c)) if c.len() == 2 => Some(Point::torus(vec![
                m[0] as f64 * c[0] + m[1] as f64 * c[1],
                m[2] as f64 * c[0] + m[3] as f64 * c[1],
            ])),
            (PointMap::LeftMultiply(q), Point::Quat(x)) => Some(Point::quat(quat_mul(q, x))),
            (PointMap::Shift { by, modulus }, Point::Profinite { lift }) => {
                let m = *modulus as i128;
                Some(Point::Profinite {
                    lift: (*lift as i128 + *by as i128).rem_euclid(m) as u64,
                })
            }
            _ => None,
        }
    }
}

pub(crate) fn quat_mul(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [
        x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
        x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
        x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
        x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0],
    ]
}

/// Result of applying a word to a net point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordImage {
    /// Net point nearest to the exact image.
    pub index: usize,
    /// Distance from the exact image to that net point.
    pub snap_error: f64,
    /// Bound on the error of snapping after every letter:
    /// `sum_k (prod_{j > k} Lip(s_j)) * mesh`.
    pub error_bound: f64,
}

/// A group acting on a net through exact generator maps.
#[derive(Clone, Debug)]
pub struct ActionModel {
    name: String,
    group: GroupPresentation,
    space: Arc<FiniteSpace>,
    maps: Vec<PointMap>,
    lipschitz: Vec<f64>,
    /// `images[s][x]`: snapped image of net point `x` under generator `s`.
    images: Vec<Vec<usize>>,
    image_errors: Vec<Vec<f64>>,
    free_flag: bool,
}

impl ActionModel {
    /// Validate the generator maps on every net point and tabulate snapped
    /// images and Lipschitz constants.
    pub fn new(
        name: impl Into<String>,
        group: GroupPresentation,
        space: Arc<FiniteSpace>,
        maps: Vec<PointMap>,
        free_flag: bool,
    ) -> Result<Self> {
        let name = name.into();
        if maps.len() != group.len() {
            return Err(Error::param(
                "generators",
                format!("{} maps for {} generators", maps.len(), group.len()),
            ));
        }
        let n = space.len();
        let mut exact_images = Vec::with_capacity(maps.len());
        for (s, map) in maps.iter().enumerate() {
            let label = &group.generators()[s].label;
            let imgs: Vec<Point> = space
                .points()
                .iter()
                .map(|p| {
                    map.apply(p).ok_or_else(|| {
                        Error::UnsupportedKind(format!("generator {label} on {} payload {p}", space.kind()))
                    })
                })
                .collect::<Result<_>>()?;
            exact_images.push(imgs);
        }
        for (s, map) in maps.iter().enumerate() {
            let inv = &maps[group.generators()[s].inverse];
            for (x, img) in exact_images[s].iter().enumerate() {
                let back = inv.apply(img).expect("same payload class");
                let err = space.distance_to(&back, x);
                if err > 1e-12 {
                    return Err(Error::param(
                        "generators",
                        format!(
                            "map of {} is not inverted by its partner at point {x} (error {err})",
                            group.generators()[s].label
                        ),
                    ));
                }
            }
            let _ = map;
        }
        let model = space.model();
        let lipschitz = exact_images
            .iter()
            .map(|imgs| {
                let mut lip: f64 = 0.0;
                for x in 0..n {
                    for y in (x + 1)..n {
                        let d = space.dist(x, y);
                        if d > 0.0 {
                            lip = lip.max(model.distance(&imgs[x], &imgs[y]) / d);
                        }
                    }
                }
                if n < 2 {
                    1.0
                } else {
                    lip
                }
            })
            .collect();
        let mut images = Vec::with_capacity(maps.len());
        let mut image_errors = Vec::with_capacity(maps.len());
        for imgs in &exact_images {
            let (idx, err): (Vec<usize>, Vec<f64>) = imgs.iter().map(|p| space.snap(p)).unzip();
            images.push(idx);
            image_errors.push(err);
        }
        Ok(ActionModel {
            name,
            group,
            space,
            maps,
            lipschitz,
            images,
            image_errors,
            free_flag,
        })
    }

    /// Trivial group acting by the identity.
    pub fn trivial(space: Arc<FiniteSpace>) -> Result<Self> {
        Self::new("trivial", GroupPresentation::trivial(), space, vec![PointMap::Identity], false)
    }

    /// Torus rotation by a vector of turns. Rational vectors generate a
    /// finite cyclic group, anything else a copy of the integers.
    pub fn rotation(space: Arc<FiniteSpace>, turns: Vec<Turn>) -> Result<Self> {
        expect_torus(&space, turns.len())?;
        let order = turns
            .iter()
            .try_fold(1i64, |acc, t| t.order().map(|o| lcm(acc, o)));
        let label = turns.iter().map(Turn::to_string).collect::<Vec<_>>().join(",");
        let fwd = PointMap::Translate(turns);
        let inv = fwd.inverse();
        match order {
            Some(1) => Self::trivial(space),
            Some(2) => Self::new(format!("rotation({label})"), GroupPresentation::cyclic(2)?, space, vec![fwd], true),
            Some(m) => Self::new(
                format!("rotation({label})"),
                GroupPresentation::cyclic(m)?,
                space,
                vec![fwd, inv],
                true,
            ),
            None => Self::new(
                format!("rotation({label})"),
                GroupPresentation::integers(),
                space,
                vec![fwd, inv],
                true,
            ),
        }
    }

    /// Free group acting through independent torus translations.
    pub fn translations(space: Arc<FiniteSpace>, vectors: Vec<Vec<Turn>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).unwrap_or(0);
        expect_torus(&space, dim)?;
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::param("translations", "vectors of different lengths"));
        }
        let group = GroupPresentation::free(vectors.len())?;
        let mut maps = Vec::new();
        for v in vectors {
            let m = PointMap::Translate(v);
            maps.push(m.inverse());
            maps.insert(maps.len() - 1, m);
        }
        Self::new(format!("translations(F{})", group.len() / 2), group, space, maps, false)
    }

    /// `SL2(Z)` acting linearly on the 2-torus.
    pub fn sl2_torus(space: Arc<FiniteSpace>) -> Result<Self> {
        expect_torus(&space, 2)?;
        let group = GroupPresentation::sl2();
        let maps = group
            .generators()
            .iter()
            .map(|g| match &g.element {
                Element::Mat2(m) => PointMap::Linear(*m),
                _ => unreachable!(),
            })
            .collect();
        Self::new("sl2-torus", group, space, maps, false)
    }

    /// Free rotation group acting on the 3-sphere by left multiplication.
    pub fn free_rotations_s3(space: Arc<FiniteSpace>) -> Result<Self> {
        if space.kind() != SpaceKind::Sphere3 && !lifted_from(&space, SpaceKind::Sphere3) {
            return Err(Error::UnsupportedKind(space.kind().to_string()));
        }
        let group = GroupPresentation::free_rotations();
        let maps = group
            .generators()
            .iter()
            .map(|g| match &g.element {
                Element::Quat { q, e } => {
                    let s = 5f64.powf(*e as f64 / 2.0);
                    PointMap::LeftMultiply([q[0] as f64 / s, q[1] as f64 / s, q[2] as f64 / s, q[3] as f64 / s])
                }
                _ => unreachable!(),
            })
            .collect();
        let free = space.kind() == SpaceKind::Sphere3;
        Self::new("free-rotations-s3", group, space, maps, free)
    }

    /// The integers acting on a truncated profinite completion by `+1`.
    pub fn profinite_shift(space: Arc<FiniteSpace>) -> Result<Self> {
        let modulus = match space.model() {
            Model::Profinite(spec) => spec.top_size(),
            other => return Err(Error::UnsupportedKind(other.kind().to_string())),
        };
        let fwd = PointMap::Shift { by: 1, modulus };
        let inv = fwd.inverse();
        Self::new("profinite-shift", GroupPresentation::integers(), space, vec![fwd, inv], true)
    }

    /// The same group and generator maps acting on another net, typically a
    /// compact cone or one-point extension built over this action's space.
    /// Freeness is dropped for those, which carry a fixed point.
    pub fn lift(&self, space: Arc<FiniteSpace>) -> Result<Self> {
        let free = self.free_flag
            && !matches!(space.kind(), SpaceKind::CompactCone | SpaceKind::OnePointExt);
        Self::new(
            format!("{} on {}", self.name, space.kind()),
            self.group.clone(),
            space,
            self.maps.clone(),
            free,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &GroupPresentation {
        &self.group
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FiniteSpace> {
        Arc::clone(&self.space)
    }

    pub fn maps(&self) -> &[PointMap] {
        &self.maps
    }

    pub fn generator_count(&self) -> usize {
        self.maps.len()
    }

    /// Declared freeness. Metadata for tests only.
    pub fn free_flag(&self) -> bool {
        self.free_flag
    }

    /// Largest `d(sx, sy) / d(x, y)` over net pairs, on exact images.
    pub fn generator_lipschitz(&self, s: usize) -> f64 {
        self.lipschitz[s]
    }

    pub fn max_lipschitz(&self) -> f64 {
        self.lipschitz.iter().copied().fold(1.0, f64::max)
    }

    /// Snapped image of net point `x` under generator `s`.
    #[inline]
    pub fn image(&self, s: usize, x: usize) -> usize {
        self.images[s][x]
    }

    pub fn image_error(&self, s: usize, x: usize) -> f64 {
        self.image_errors[s][x]
    }

    /// Largest snapping error over all generator images.
    pub fn snap_error_max(&self) -> f64 {
        self.image_errors
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Exact image of a payload under a word applied left to right.
    pub fn apply_payload(&self, word: &[usize], p: &Point) -> Point {
        word.iter().fold(p.clone(), |q, &s| {
            self.maps[s].apply(&q).expect("validated payload class")
        })
    }

    /// Apply a word to net point `x` exactly, then snap once.
    pub fn apply_word(&self, word: &[usize], x: usize) -> WordImage {
        let img = self.apply_payload(word, self.space.point(x));
        let (index, snap_error) = self.space.snap(&img);
        let mut bound = 0.0;
        for &s in word {
            bound = bound * self.lipschitz[s] + self.space.mesh();
        }
        if word.is_empty() {
            bound = 0.0;
        }
        WordImage {
            index,
            snap_error,
            error_bound: bound,
        }
    }

    /// True when every generator maps the net onto itself exactly.
    pub fn is_exact(&self) -> bool {
        self.image_errors.iter().flatten().all(|&e| e == 0.0)
    }

    /// Identity element's family, for callers that branch on the group type.
    pub fn family(&self) -> GroupFamily {
        self.group.family()
    }
}

fn expect_torus(space: &FiniteSpace, dim: usize) -> Result<()> {
    let base_dim = match space.model() {
        Model::Torus { dim } => Some(*dim),
        Model::CompactCone { base, .. } | Model::OnePointExt { base, .. } => match base.as_ref() {
            Model::Torus { dim } => Some(*dim),
            _ => None,
        },
        _ => None,
    };
    match base_dim {
        Some(d) if d == dim => Ok(()),
        Some(d) => Err(Error::param("turns", format!("{dim} components for a {d}-torus"))),
        None => Err(Error::UnsupportedKind(space.kind().to_string())),
    }
}

fn lifted_from(space: &FiniteSpace, kind: SpaceKind) -> bool {
    match space.model() {
        Model::CompactCone { base, .. } | Model::OnePointExt { base, .. } => base.kind() == kind,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_net, one_point_extension};

    fn circle(n: usize) -> Arc<FiniteSpace> {
        Arc::new(build_net(&Model::Torus { dim: 1 }, n, 0).unwrap())
    }

    #[test]
    fn rotation_preserves_grid() {
        let a = ActionModel::rotation(circle(8), vec![Turn::rational(1, 8).unwrap()]).unwrap();
        assert_eq!(a.group().len(), 2);
        let img = a.apply_word(&[0], 0);
        assert_eq!((img.index, img.snap_error), (1, 0.0));
        assert_eq!(a.apply_word(&[], 5).index, 5);
        assert_eq!(a.generator_lipschitz(0), 1.0);
        assert!(a.is_exact());
    }

    #[test]
    fn antipodal_is_an_involution() {
        let a = ActionModel::rotation(circle(16), vec![Turn::rational(1, 2).unwrap()]).unwrap();
        assert_eq!(a.group().len(), 1);
        assert_eq!(a.image(0, 3), 11);
    }

    #[test]
    fn shear_on_lattice_is_exact() {
        let t2 = Arc::new(build_net(&Model::Torus { dim: 2 }, 5, 0).unwrap());
        let a = ActionModel::sl2_torus(t2).unwrap();
        // T (x, y) = (x + y, y) on column vectors; T (1/5, 0) = (1/5, 0)
        let x = a.space().find_exact(&Point::lattice(vec![1, 0], 5)).unwrap();
        let img = a.apply_word(&[0], x);
        assert_eq!(img.snap_error, 0.0);
        assert_eq!(img.index, x);
        let y = a.space().find_exact(&Point::lattice(vec![0, 1], 5)).unwrap();
        let img = a.apply_word(&[0], y);
        assert_eq!(a.space().point(img.index), &Point::lattice(vec![1, 1], 5));
        let lip = a.generator_lipschitz(0);
        assert!((1.0..=2.0).contains(&lip), "{lip}");
    }

    #[test]
    fn golden_rotation_snaps_with_error() {
        let a = ActionModel::rotation(circle(16), vec![Turn::golden()]).unwrap();
        assert!(!a.is_exact());
        assert!(a.snap_error_max() <= a.space().mesh() + 1e-15);
        let w = a.apply_word(&[0, 0, 0], 0);
        assert!(w.snap_error <= a.space().mesh());
        assert!((w.error_bound - 3.0 * a.space().mesh()).abs() < 1e-15);
    }

    #[test]
    fn trivial_action_fixes_everything() {
        let a = ActionModel::trivial(circle(4)).unwrap();
        assert_eq!(a.generator_lipschitz(0), 1.0);
        assert!((0..4).all(|x| a.image(0, x) == x));
    }

    #[test]
    fn lift_to_extension_fixes_star() {
        let base = circle(8);
        let a = ActionModel::rotation(Arc::clone(&base), vec![Turn::rational(1, 8).unwrap()]).unwrap();
        let ext = Arc::new(one_point_extension(&base, 0.5).unwrap());
        let b = a.lift(ext).unwrap();
        assert!(!b.free_flag());
        assert_eq!(b.image(0, 8), 8);
        assert_eq!(b.image(0, 2), 3);
    }

    #[test]
    fn free_rotations_are_isometries() {
        let s3 = Arc::new(build_net(&Model::Sphere3, 60, 1).unwrap());
        let a = ActionModel::free_rotations_s3(s3).unwrap();
        for s in 0..4 {
            assert!((a.generator_lipschitz(s) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn parses_turns() {
        assert_eq!("3/12".parse::<Turn>().unwrap(), Turn::Rational(1, 4));
        assert_eq!("golden".parse::<Turn>().unwrap(), Turn::golden());
        assert!("x".parse::<Turn>().is_err());
    }
}
