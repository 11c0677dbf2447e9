use std::fmt;
use std::sync::Arc;

use crate::actions::{ActionModel, Element, WordBall};
use crate::error::{Error, Result};

use super::{BaseEdgeRule, ProductGraph, WarpedLevel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaithfulnessStatus {
    /// Some scheduled level passed; it is reported as `R_N`.
    FaithfulAt,
    /// A nontrivial element of `B(e, N)` fixes a net point.
    Failure,
    /// No scheduled level passed.
    Undetermined,
}

impl fmt::Display for FaithfulnessStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaithfulnessStatus::FaithfulAt => "faithful_at",
            FaithfulnessStatus::Failure => "failure",
            FaithfulnessStatus::Undetermined => "undetermined",
        })
    }
}

/// Outcome of one scheduled level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelVerdict {
    pub level: f64,
    pub injective: bool,
    /// Largest `|d¹ - d_Γ ∘ π|` over the checked pairs.
    pub max_discrepancy: f64,
    pub tolerance: f64,
    /// First offending pair, as `(center, element, point)`.
    pub witness: Option<(usize, Element, usize)>,
}

impl LevelVerdict {
    pub fn passes(&self) -> bool {
        self.injective && self.max_discrepancy <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulnessReport {
    pub radius: usize,
    /// Half the least displacement `d(y, γy)` over `γ ∈ B(e, 2N) \ {e}`
    /// and net points `y`, on exact images.
    pub epsilon: f64,
    pub status: FaithfulnessStatus,
    /// `R_N` when `status` is `FaithfulAt`.
    pub faithful_level: Option<f64>,
    /// Fixed point `(γ, y)` with `γ ≠ e` when `status` is `Failure`.
    pub fixed_point: Option<(Element, usize)>,
    pub max_level_tested: Option<f64>,
    pub levels: Vec<LevelVerdict>,
}

/// Least scheduled level at which the projection `(γ, x) ↦ snap(γx)` is
/// injective and distance preserving on `N`-balls of `d¹`.
///
/// Nontrivial elements of `B(e, N)` fixing a net point are reported as a
/// failure before any level is built. At each level the check runs over
/// all pairs at `d¹`-distance at most `2N`, which contains every pair
/// lying in a common `N`-ball; by equivariance each pair is moved so its
/// first point is `(e, z)`. Distances must agree to `1e-9` when the action
/// maps the net onto itself and to `2 (2N) Lip mesh r` otherwise.
pub fn faithfulness_radius(
    action: &Arc<ActionModel>,
    radius: usize,
    schedule: &[f64],
    rule: BaseEdgeRule,
    cap: usize,
) -> Result<FaithfulnessReport> {
    if radius == 0 {
        return Err(Error::param("N", "ball radius must be at least 1"));
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] <= 0.0 {
        return Err(Error::param("schedule", "levels must be positive and increasing"));
    }
    let space = action.space();
    let n = space.len();
    let ball = action.group().word_ball(2 * radius, cap)?;

    let epsilon = match scan_displacements(action, &ball, radius) {
        Ok(eps) => eps,
        Err(fixed) => {
            return Ok(FaithfulnessReport {
                radius,
                epsilon: 0.0,
                status: FaithfulnessStatus::Failure,
                faithful_level: None,
                fixed_point: Some(fixed),
                max_level_tested: None,
                levels: Vec::new(),
            })
        }
    };

    let exact = action.is_exact();
    let bound = 2.0 * radius as f64;
    let mut levels = Vec::new();
    for &r in schedule {
        let level = WarpedLevel::build(Arc::clone(action), r, rule, usize::MAX)?;
        let graph = ProductGraph::with_ball(action, r, ball.clone());
        let tolerance = if exact {
            1e-9
        } else {
            2.0 * bound * action.max_lipschitz() * space.mesh() * r
        };
        let mut verdict = LevelVerdict {
            level: r,
            injective: true,
            max_discrepancy: 0.0,
            tolerance,
            witness: None,
        };
        for z in 0..n {
            let d = graph.distances_from(0, z, bound + 1e-9);
            for (v, &dv) in d.iter().enumerate() {
                if !dv.is_finite() || v == z {
                    continue;
                }
                let (g, w) = (v / n, v % n);
                let p = graph.image(g, w);
                if p == z {
                    verdict.injective = false;
                    verdict.witness.get_or_insert((z, ball.element(g).clone(), w));
                }
                let disc = (dv - level.dist(z, p)).abs();
                if disc > verdict.max_discrepancy {
                    verdict.max_discrepancy = disc;
                    if disc > tolerance {
                        verdict.witness.get_or_insert((z, ball.element(g).clone(), w));
                    }
                }
            }
        }
        let passed = verdict.passes();
        levels.push(verdict);
        if passed {
            return Ok(FaithfulnessReport {
                radius,
                epsilon,
                status: FaithfulnessStatus::FaithfulAt,
                faithful_level: Some(r),
                fixed_point: None,
                max_level_tested: Some(r),
                levels,
            });
        }
    }
    Ok(FaithfulnessReport {
        radius,
        epsilon,
        status: FaithfulnessStatus::Undetermined,
        faithful_level: None,
        fixed_point: None,
        max_level_tested: schedule.last().copied(),
        levels,
    })
}

/// Half the least displacement `d(y, γy)` over `γ ∈ ball \ {e}`, or the
/// first element of length at most `fixed_radius` fixing a net point.
fn scan_displacements(
    action: &ActionModel,
    ball: &WordBall,
    fixed_radius: usize,
) -> std::result::Result<f64, (Element, usize)> {
    let space = action.space();
    let mut epsilon = f64::INFINITY;
    for g in 1..ball.len() {
        for (y, p) in space.points().iter().enumerate() {
            let img = action.apply_payload(ball.word(g), p);
            if ball.length(g) <= fixed_radius && img == *p {
                return Err((ball.element(g).clone(), y));
            }
            epsilon = epsilon.min(space.distance_to(&img, y) / 2.0);
        }
    }
    Ok(epsilon)
}

/// Half the least displacement `d(y, γy)` over nontrivial `γ ∈ B(e, 2N)`
/// and net points `y`: balls of a smaller radius around the points
/// `γy`, `γ ∈ B(e, N)`, are pairwise disjoint for isometric actions.
pub fn injectivity_threshold(action: &ActionModel, radius: usize, cap: usize) -> Result<f64> {
    let ball = action.group().word_ball(2 * radius, cap)?;
    Ok(scan_displacements(action, &ball, 0).unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::Turn;
    use crate::spaces::{build_net, one_point_extension, Model};

    const SCHEDULE: [f64; 5] = [4.0, 8.0, 16.0, 32.0, 64.0];

    #[test]
    fn trivial_group_is_faithful_at_first_level() {
        let space = Arc::new(build_net(&Model::Torus { dim: 1 }, 12, 0).unwrap());
        let a = Arc::new(ActionModel::trivial(space).unwrap());
        for n in 1..=3 {
            let rep = faithfulness_radius(&a, n, &SCHEDULE, BaseEdgeRule::Complete, 1000).unwrap();
            assert_eq!(rep.status, FaithfulnessStatus::FaithfulAt);
            assert_eq!(rep.faithful_level, Some(4.0));
        }
    }

    #[test]
    fn star_is_a_fixed_point() {
        let base = Arc::new(build_net(&Model::Torus { dim: 1 }, 16, 0).unwrap());
        let a = ActionModel::rotation(Arc::clone(&base), vec![Turn::golden()]).unwrap();
        let ext = Arc::new(one_point_extension(&base, 0.5).unwrap());
        let lifted = Arc::new(a.lift(ext).unwrap());
        let rep = faithfulness_radius(&lifted, 1, &SCHEDULE, BaseEdgeRule::Complete, 1000).unwrap();
        assert_eq!(rep.status, FaithfulnessStatus::Failure);
        let (g, y) = rep.fixed_point.unwrap();
        assert_eq!(y, 16);
        assert_eq!(g, Element::Int(-1));
    }

    #[test]
    fn golden_rotation_radii_are_nondecreasing() {
        let space = Arc::new(build_net(&Model::Torus { dim: 1 }, 128, 0).unwrap());
        let a = Arc::new(ActionModel::rotation(space, vec![Turn::golden()]).unwrap());
        let mut prev = 0.0;
        for n in 1..=2 {
            let rep = faithfulness_radius(&a, n, &SCHEDULE, BaseEdgeRule::Complete, 1000).unwrap();
            assert_eq!(rep.status, FaithfulnessStatus::FaithfulAt, "{:?}", rep.levels);
            let r = rep.faithful_level.unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }
}
