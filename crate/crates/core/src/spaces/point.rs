use std::fmt;

/// Coordinate payload of a net point.
///
/// Torus points built on a grid are kept as exact rationals so that
/// integer and rational actions map grid points to grid points with zero
/// error. Irrational actions promote them to [`Point::Torus`].
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    /// Torus point with coordinates `num[i] / den`, reduced mod 1.
    Lattice { num: Vec<i64>, den: i64 },
    /// Torus point with real coordinates in `[0, 1)`.
    Torus(Vec<f64>),
    /// Unit quaternion `(w, x, y, z)` on the 3-sphere.
    Quat([f64; 4]),
    /// Point of a truncated profinite completion, stored as its canonical
    /// integer lift; digit `j` is `lift mod m_j`.
    Profinite { lift: u64 },
    /// Point `(theta, y)` of a compact cone with `theta` in `(0, 1]`.
    Cone { theta: f64, base: Box<Point> },
    /// Apex of a compact cone (`theta = 0`).
    Apex,
    /// Added fixed point of a one-point extension.
    Star,
}

impl Point {
    pub fn lattice(num: Vec<i64>, den: i64) -> Point {
        assert!(den > 0, "lattice denominator must be positive");
        let mut num: Vec<i64> = num.into_iter().map(|a| a.rem_euclid(den)).collect();
        let mut g = den;
        for &a in &num {
            g = gcd(g, a);
        }
        let g = g.max(1);
        for a in &mut num {
            *a /= g;
        }
        Point::Lattice { num, den: den / g }
    }

    pub fn torus(coords: Vec<f64>) -> Point {
        Point::Torus(coords.into_iter().map(wrap_unit).collect())
    }

    pub fn quat(q: [f64; 4]) -> Point {
        let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        Point::Quat([q[0] / n, q[1] / n, q[2] / n, q[3] / n])
    }

    /// Real torus coordinates, if this is a torus point.
    pub fn torus_coords(&self) -> Option<Vec<f64>> {
        match self {
            Point::Lattice { num, den } => {
                Some(num.iter().map(|&a| a as f64 / *den as f64).collect())
            }
            Point::Torus(c) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Point::Lattice { .. } | Point::Profinite { .. } | Point::Apex | Point::Star => true,
            Point::Cone { base, .. } => base.is_exact(),
            Point::Torus(_) | Point::Quat(_) => false,
        }
    }

    /// Serialize to whitespace-free CSV tokens.
    pub(crate) fn tokens(&self) -> Vec<String> {
        match self {
            Point::Lattice { num, den } => num.iter().map(|a| format!("{a}/{den}")).collect(),
            Point::Torus(c) => c.iter().map(|x| format!("{x}")).collect(),
            Point::Quat(q) => q.iter().map(|x| format!("{x}")).collect(),
            Point::Profinite { lift } => vec![format!("{lift}")],
            Point::Cone { theta, base } => {
                let mut t = vec![format!("{theta}")];
                t.extend(base.tokens());
                t
            }
            Point::Apex => vec!["apex".into()],
            Point::Star => vec!["star".into()],
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Apex => write!(f, "apex"),
            Point::Star => write!(f, "*"),
            Point::Cone { theta, base } => write!(f, "({theta}, {base})"),
            _ => write!(f, "({})", self.tokens().join(", ")),
        }
    }
}

pub(crate) fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Flat ℓ¹ distance on the torus with coordinate-wise wraparound.
pub(crate) fn torus_distance(a: &Point, b: &Point) -> f64 {
    match (a, b) {
        (Point::Lattice { num: na, den: da }, Point::Lattice { num: nb, den: db }) => {
            debug_assert_eq!(na.len(), nb.len());
            let l = lcm(*da, *db) as i128;
            let (fa, fb) = (l / *da as i128, l / *db as i128);
            let mut total: i128 = 0;
            for (&x, &y) in na.iter().zip(nb) {
                let d = (x as i128 * fa - y as i128 * fb).rem_euclid(l);
                total += d.min(l - d);
            }
            total as f64 / l as f64
        }
        _ => {
            let ca = a.torus_coords().expect("torus point");
            let cb = b.torus_coords().expect("torus point");
            ca.iter()
                .zip(&cb)
                .map(|(x, y)| {
                    let d = (x - y).rem_euclid(1.0);
                    d.min(1.0 - d)
                })
                .sum()
        }
    }
}

/// Geodesic (great-circle) distance between unit quaternions on the 3-sphere.
pub(crate) fn sphere_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for k in 0..4 {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        sum += (a[k] + b[k]) * (a[k] + b[k]);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}
