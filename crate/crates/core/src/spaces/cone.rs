use serde::{Deserialize, Serialize};

use super::{FiniteSpace, Model, Point};
use crate::error::{Error, Result};

/// Slice and level parameters of a cone point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub theta: f64,
    pub scale: f64,
    pub diameter: f64,
}

impl ConeParams {
    pub fn new(theta: f64, scale: f64, diameter: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::param("theta", format!("{theta} not in (0,1]")));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::param("scale", format!("{scale} is not positive")));
        }
        if !(diameter > 0.0) || !diameter.is_finite() {
            return Err(Error::param("diameter", format!("{diameter} is not positive")));
        }
        Ok(ConeParams {
            theta,
            scale,
            diameter,
        })
    }

    /// Effective level of the slice: `theta * scale`.
    pub fn level(&self) -> f64 {
        self.theta * self.scale
    }
}

/// ℓ¹ cone distance `|r - r'| diam(Y) + min(r, r') d(y, y')` between
/// `(r, y)` and `(r', y')`, with `y`, `y'` indices into `base`.
///
/// With `compact` set the radial coordinates are slice parameters in
/// `[0, 1]` and every point with radial coordinate 0 is the apex.
pub fn cone_metric(a: (f64, usize), b: (f64, usize), base: &FiniteSpace, compact: bool) -> Result<f64> {
    for (r, y) in [a, b] {
        if !(r >= 0.0) {
            return Err(Error::param("radial coordinate", format!("{r} is negative")));
        }
        if !compact && r == 0.0 {
            return Err(Error::param("radial coordinate", "must be positive on the open cone"));
        }
        if compact && r > 1.0 {
            return Err(Error::param("theta", format!("{r} > 1 on the compact cone")));
        }
        if y >= base.len() {
            return Err(Error::param("base point", format!("index {y} out of range")));
        }
    }
    let diam = base.model().diameter();
    let m = a.0.min(b.0);
    let spread = if m == 0.0 { 0.0 } else { m * base.dist(a.1, b.1) };
    Ok((a.0 - b.0).abs() * diam + spread)
}

/// Net of the compact cone `[0,1] x Y / {0} x Y` over `base`: the apex
/// (index 0, weight 0) followed by `slices` copies of the base net at
/// `theta = k / slices`, slice-major.
pub fn compact_cone(base: &FiniteSpace, slices: usize) -> Result<FiniteSpace> {
    if slices == 0 {
        return Err(Error::param("slices", "need at least one slice"));
    }
    let diameter = base.model().diameter();
    let model = Model::CompactCone {
        base: Box::new(base.model().clone()),
        diameter,
    };
    let mut points = Vec::with_capacity(1 + slices * base.len());
    let mut weights = Vec::with_capacity(points.capacity());
    points.push(Point::Apex);
    weights.push(0.0);
    let mass = base.total_mass();
    for k in 1..=slices {
        let theta = k as f64 / slices as f64;
        for (p, w) in base.points().iter().zip(base.weights()) {
            points.push(Point::Cone {
                theta,
                base: Box::new(p.clone()),
            });
            weights.push(w / (mass * slices as f64));
        }
    }
    let mesh = diameter / (2.0 * slices as f64) + base.mesh();
    FiniteSpace::from_parts(model, points, weights, mesh)
}

/// Index of the net point `(k / slices, y)` in a [`compact_cone`] net.
pub fn cone_index(base_len: usize, k: usize, y: usize) -> usize {
    debug_assert!(k >= 1);
    1 + (k - 1) * base_len + y
}

/// `Y ⊔ {*}` with `*` at distance `star_distance` from every base point.
/// The star is appended last and carries weight 0.
pub fn one_point_extension(base: &FiniteSpace, star_distance: f64) -> Result<FiniteSpace> {
    let diam = base.diameter();
    if !(star_distance > 0.0) || !star_distance.is_finite() {
        return Err(Error::param("star_distance", format!("{star_distance} is not positive")));
    }
    if 2.0 * star_distance < diam {
        return Err(Error::MetricViolation(format!(
            "star distance {star_distance} is below half the base diameter {diam}"
        )));
    }
    let model = Model::OnePointExt {
        base: Box::new(base.model().clone()),
        star_distance,
    };
    let mut points = base.points().to_vec();
    points.push(Point::Star);
    let mut weights = base.weights().to_vec();
    weights.push(0.0);
    FiniteSpace::from_parts(model, points, weights, base.mesh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_net, ProfiniteSpec};

    fn circle(n: usize) -> FiniteSpace {
        build_net(&Model::Torus { dim: 1 }, n, 0).unwrap()
    }

    fn two_points() -> FiniteSpace {
        let spec = ProfiniteSpec {
            quotient_sizes: vec![2],
            decay_weights: vec![1.0],
            ratio: 0.5,
        };
        build_net(&Model::Profinite(spec), 2, 0).unwrap()
    }

    #[test]
    fn cone_metric_cases() {
        let y = circle(8);
        assert_eq!(cone_metric((1.0, 0), (1.0, 3), &y, false).unwrap(), y.dist(0, 3));
        assert_eq!(cone_metric((2.0, 1), (5.0, 1), &y, false).unwrap(), 3.0 * 0.5);
        assert_eq!(cone_metric((0.0, 2), (0.25, 5), &y, true).unwrap(), 0.25 * 0.5);
        assert_eq!(cone_metric((0.0, 2), (0.0, 5), &y, true).unwrap(), 0.0);
        assert!(cone_metric((-1.0, 0), (1.0, 0), &y, false).is_err());
        assert!(cone_metric((1.5, 0), (1.0, 0), &y, true).is_err());
    }

    #[test]
    fn slice_of_compact_cone_is_scaled_base() {
        let y = circle(8);
        let c = compact_cone(&y, 4).unwrap();
        assert_eq!(c.len(), 33);
        c.check_metric(1).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let i = cone_index(8, 2, a);
                let j = cone_index(8, 2, b);
                assert_eq!(c.dist(i, j), 0.5 * y.dist(a, b));
            }
        }
        assert_eq!(c.dist(0, cone_index(8, 4, 3)), 0.5);
    }

    #[test]
    fn two_point_extension() {
        let y = two_points();
        assert_eq!(y.dist(0, 1), 1.0);
        let e = one_point_extension(&y, 1.0).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.dist(2, 0), 1.0);
        assert_eq!(e.dist(2, 1), 1.0);
        assert_eq!(e.weights()[2], 0.0);
        e.check_metric(0).unwrap();
        assert!(one_point_extension(&y, 0.4).is_err());
    }

    #[test]
    fn extension_of_torus_net_passes_triangle_scan() {
        let y = build_net(&Model::Torus { dim: 2 }, 4, 0).unwrap();
        let e = one_point_extension(&y, 0.5).unwrap();
        e.check_metric(0).unwrap();
        let c = circle(16);
        let e = one_point_extension(&c, c.diameter()).unwrap();
        assert!((0..16).all(|i| e.dist(16, i) == 0.5));
    }
}
