use std::collections::HashMap;

use crate::actions::{ActionModel, Element, WordBall};
use crate::error::{Error, Result};
use crate::warp::{injectivity_threshold, WarpedLevel};

/// Word-ball cap for the transfer and its threshold scan.
pub const TRANSFER_BALL_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferParams {
    /// Support radius `m` of the input maps, in level units.
    pub support_radius: usize,
    /// Ball radius `δ` in base units; the level-`r` radius is `r δ`.
    pub delta: f64,
    /// Injectivity threshold for `B(e, m + 2)`.
    pub epsilon: f64,
    pub level: f64,
}

/// Measures `C^y` on `B(e, m + 2)` and their equivariance defect.
#[derive(Clone, Debug)]
pub struct TransferResult {
    pub params: TransferParams,
    pub ball: WordBall,
    /// `measures[y][g] = C^y(γ_g)`.
    pub measures: Vec<Vec<f64>>,
    /// `max_y 1 - Σ_γ C^y(γ)`.
    pub mass_deficit_max: f64,
    /// `max_{y,s} |C^y s⁻¹ - C^{sy}|_1`.
    pub defect: f64,
    /// `(y, generator)` realizing the defect.
    pub defect_witness: (usize, usize),
    /// `max_{y,s} |A(y) - A(sy)|_1`, the bound the defect must respect.
    pub input_variation: f64,
}

impl TransferResult {
    pub fn csv_header() -> &'static str {
        "n,m,r,delta,defect,mass_deficit_max"
    }

    pub fn csv_row(&self, n: usize) -> String {
        let p = &self.params;
        format!(
            "{n},{},{},{},{},{}",
            p.support_radius, p.level, p.delta, self.defect, self.mass_deficit_max
        )
    }
}

/// Default `δ`: three times the net's mesh, in base units.
pub fn default_delta(action: &ActionModel) -> f64 {
    3.0 * action.space().mesh()
}

/// Push the probability vectors `maps[y]` (over the net, supported in the
/// level ball of radius `m` about `y`) to measures on the group:
/// `C^y(γ)` is the mass of `maps[y]` within `δ` of `γy`, for `γ ∈ B(e, m+2)`.
///
/// Mass that lands in no ball is reported as a deficit and not
/// renormalized. `δ` must lie below the injectivity threshold, and the
/// `δ`-balls around distinct `γy` must not share a net point.
pub fn roe_transfer(
    level: &WarpedLevel,
    maps: &[Vec<f64>],
    support_radius: usize,
    delta: Option<f64>,
) -> Result<TransferResult> {
    let action = level.action();
    let space = action.space();
    let group = action.group();
    let n = space.len();
    if maps.len() != n {
        return Err(Error::param("maps", format!("{} maps for {n} points", maps.len())));
    }
    for (y, a) in maps.iter().enumerate() {
        if a.len() != n || a.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::param("maps", format!("map at {y} is not a nonnegative vector on the net")));
        }
        let total: f64 = a.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("maps", format!("map at {y} has mass {total}")));
        }
        if let Some(x) = (0..n).find(|&x| a[x] > 0.0 && level.dist(y, x) > support_radius as f64 + 1e-9) {
            return Err(Error::param(
                "maps",
                format!("map at {y} charges {x} at level distance {}", level.dist(y, x)),
            ));
        }
    }
    let radius = support_radius + 2;
    let delta = delta.unwrap_or_else(|| default_delta(action));
    if !(delta > 0.0) {
        return Err(Error::param("delta", "must be positive"));
    }
    let epsilon = injectivity_threshold(action, radius, TRANSFER_BALL_CAP)?;
    if delta >= epsilon {
        return Err(Error::DeltaAboveThreshold { delta, epsilon, radius });
    }
    let ball = group.word_ball(radius, TRANSFER_BALL_CAP)?;

    let mut measures = Vec::with_capacity(n);
    let mut mass_deficit_max = 0.0f64;
    for (y, map) in maps.iter().enumerate() {
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut c = vec![0.0; ball.len()];
        for (g, slot) in c.iter_mut().enumerate() {
            let img = action.apply_payload(ball.word(g), space.point(y));
            for x in 0..n {
                if space.distance_to(&img, x) < delta {
                    if let Some(h) = owner[x] {
                        return Err(Error::Injectivity(format!(
                            "balls about {}y and {}y share net point {x} (y = {y})",
                            ball.element(h),
                            ball.element(g)
                        )));
                    }
                    owner[x] = Some(g);
                    *slot += map[x];
                }
            }
        }
        mass_deficit_max = mass_deficit_max.max(1.0 - c.iter().sum::<f64>());
        measures.push(c);
    }

    let mut defect = 0.0f64;
    let mut defect_witness = (0, 0);
    let mut input_variation = 0.0f64;
    for y in 0..n {
        for (s, gen) in group.generators().iter().enumerate() {
            let sy = action.image(s, y);
            // (C^y s⁻¹)(γ) = C^y(γ s): the mass at γ_g moves to γ_g s⁻¹
            let s_inv = group.inverse(&gen.element);
            let mut diff: HashMap<Element, f64> = HashMap::new();
            for (g, &w) in measures[y].iter().enumerate() {
                if w != 0.0 {
                    *diff.entry(group.mul(ball.element(g), &s_inv)).or_default() += w;
                }
            }
            for (g, &w) in measures[sy].iter().enumerate() {
                if w != 0.0 {
                    *diff.entry(ball.element(g).clone()).or_default() -= w;
                }
            }
            let l1: f64 = diff.values().map(|v| v.abs()).sum();
            if l1 > defect {
                defect = l1;
                defect_witness = (y, s);
            }
            let var: f64 = maps[y].iter().zip(&maps[sy]).map(|(a, b)| (a - b).abs()).sum();
            input_variation = input_variation.max(var);
        }
    }

    Ok(TransferResult {
        params: TransferParams {
            support_radius,
            delta,
            epsilon,
            level: level.level(),
        },
        ball,
        measures,
        mass_deficit_max,
        defect,
        defect_witness,
        input_variation,
    })
}

/// `A(y)`: uniform on `{snap(s^j y) : |j| <= half_width}` for the first
/// generator `s`, one vector per net point.
pub fn folner_windows(action: &ActionModel, half_width: usize) -> Vec<Vec<f64>> {
    let n = action.space().len();
    let s = action.group().forward_generators().next().expect("at least one generator");
    let s_inv = action.group().generators()[s].inverse;
    let share = 1.0 / (2 * half_width + 1) as f64;
    (0..n)
        .map(|y| {
            let mut a = vec![0.0; n];
            a[y] += share;
            for j in 1..=half_width {
                a[action.apply_word(&vec![s; j], y).index] += share;
                a[action.apply_word(&vec![s_inv; j], y).index] += share;
            }
            a
        })
        .collect()
}

/// `A(y) = δ_y`.
pub fn point_masses(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|y| {
            let mut a = vec![0.0; n];
            a[y] = 1.0;
            a
        })
        .collect()
}
