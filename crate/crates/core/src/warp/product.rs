use std::collections::BinaryHeap;

use crate::actions::{ActionModel, Element, WordBall};
use crate::error::{Error, Result};

use super::paths::Item;
use super::WarpedLevel;

/// The metric `d¹` on `B(e, L) x net` at level `r`: unit edges
/// `(γ, x) -- (sγ, x)` and fibre edges `(γ, x) -- (γ, x')` of weight
/// `r d(γx, γx')`, with `γx` the exact (unsnapped) image.
///
/// Paths are confined to the ball; a path leaving `B(e, L)` would cost more
/// than `L`, so distances up to `L - |γ|` from a vertex `(γ, x)` are exact.
#[derive(Clone, Debug)]
pub struct ProductGraph<'a> {
    action: &'a ActionModel,
    level: f64,
    ball: WordBall,
    /// `fibre[γ][x * n + x'] = r d(γx, γx')`.
    fibre: Vec<Vec<f64>>,
    /// `left[γ][s]`: ball index of `s γ`, if inside the ball.
    left: Vec<Vec<Option<usize>>>,
    /// Snapped images `snap(γx)` and their errors.
    images: Vec<Vec<usize>>,
    image_errors: Vec<Vec<f64>>,
}

impl<'a> ProductGraph<'a> {
    pub fn new(action: &'a ActionModel, level: f64, radius: usize, cap: usize) -> Result<Self> {
        let ball = action.group().word_ball(radius, cap)?;
        Ok(Self::with_ball(action, level, ball))
    }

    pub fn with_ball(action: &'a ActionModel, level: f64, ball: WordBall) -> Self {
        let space = action.space();
        let model = space.model();
        let n = space.len();
        let group = action.group();
        let mut fibre = Vec::with_capacity(ball.len());
        let mut left = Vec::with_capacity(ball.len());
        let mut images = Vec::with_capacity(ball.len());
        let mut image_errors = Vec::with_capacity(ball.len());
        for g in 0..ball.len() {
            let word = ball.word(g);
            let exact: Vec<_> = space
                .points()
                .iter()
                .map(|p| action.apply_payload(word, p))
                .collect();
            let mut f = vec![0.0; n * n];
            if word.is_empty() {
                for (slot, d) in f.iter_mut().zip(space.dist_matrix()) {
                    *slot = level * d;
                }
            } else {
                for x in 0..n {
                    for y in (x + 1)..n {
                        let d = level * model.distance(&exact[x], &exact[y]);
                        f[x * n + y] = d;
                        f[y * n + x] = d;
                    }
                }
            }
            fibre.push(f);
            left.push(
                group
                    .generators()
                    .iter()
                    .map(|s| ball.position(&group.mul(&s.element, ball.element(g))))
                    .collect(),
            );
            let (idx, err): (Vec<usize>, Vec<f64>) = exact.iter().map(|p| space.snap(p)).unzip();
            images.push(idx);
            image_errors.push(err);
        }
        ProductGraph {
            action,
            level,
            ball,
            fibre,
            left,
            images,
            image_errors,
        }
    }

    pub fn ball(&self) -> &WordBall {
        &self.ball
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn fibre_len(&self) -> usize {
        self.action.space().len()
    }

    /// Net index of `snap(γx)` for ball element `g`.
    pub fn image(&self, g: usize, x: usize) -> usize {
        self.images[g][x]
    }

    pub fn image_error(&self, g: usize, x: usize) -> f64 {
        self.image_errors[g][x]
    }

    /// `d¹` from `(g, x)` to every vertex `(h, y)` (index `h * n + y`),
    /// exploring only paths of length at most `bound`.
    pub fn distances_from(&self, g: usize, x: usize, bound: f64) -> Vec<f64> {
        let n = self.fibre_len();
        let mut dist = vec![f64::INFINITY; self.ball.len() * n];
        let src = g * n + x;
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Item { dist: 0.0, node: src });
        while let Some(Item { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            let (h, y) = (node / n, node % n);
            let row = &self.fibre[h][y * n..(y + 1) * n];
            for (z, &w) in row.iter().enumerate() {
                let c = d + w;
                let v = h * n + z;
                if c <= bound && c < dist[v] {
                    dist[v] = c;
                    heap.push(Item { dist: c, node: v });
                }
            }
            for &k in self.left[h].iter().flatten() {
                let c = d + 1.0;
                let v = k * n + y;
                if c <= bound && c < dist[v] {
                    dist[v] = c;
                    heap.push(Item { dist: c, node: v });
                }
            }
        }
        dist
    }
}

/// `d¹((γ, x), (γ', x'))` at level `r`, over paths inside `B(e, radius)`.
pub fn d1_distance(
    action: &ActionModel,
    level: f64,
    a: (&Element, usize),
    b: (&Element, usize),
    radius: usize,
    cap: usize,
) -> Result<f64> {
    let graph = ProductGraph::new(action, level, radius, cap)?;
    let n = graph.fibre_len();
    let locate = |g: &Element, x: usize| -> Result<usize> {
        if x >= n {
            return Err(Error::param("point", format!("index {x} out of range")));
        }
        graph
            .ball()
            .position(g)
            .ok_or_else(|| Error::param("element", format!("{g} is outside B(e, {radius})")))
    };
    let ga = locate(a.0, a.1)?;
    let gb = locate(b.0, b.1)?;
    Ok(graph.distances_from(ga, a.1, f64::INFINITY)[gb * n + b.1])
}

/// Outcome of comparing the warped level with `inf_γ d¹((e,x), (γ, γ⁻¹x'))`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientReport {
    pub max_discrepancy: f64,
    /// `2 L Lip mesh r`; zero when the action maps the net onto itself.
    pub tolerance: f64,
    /// Pair realizing the largest discrepancy.
    pub witness: (usize, usize),
    pub exact: bool,
    pub ball_size: usize,
}

impl QuotientReport {
    pub fn passes(&self) -> bool {
        self.max_discrepancy <= self.tolerance
    }
}

/// Compare the warped distances of `level` with the quotient of `d¹`
/// over `B(e, radius)`, on every pair of net points.
pub fn quotient_metric_check(level: &WarpedLevel, radius: usize, cap: usize) -> Result<QuotientReport> {
    let action = level.action();
    let space = action.space();
    let n = space.len();
    let graph = ProductGraph::new(action, level.level(), radius, cap)?;
    let group = action.group();
    let ball = graph.ball();
    // snap(γ⁻¹ x') for every ball element
    let inverse_images: Vec<Vec<usize>> = (0..ball.len())
        .map(|g| {
            let inv_word: Vec<usize> = ball
                .word(g)
                .iter()
                .rev()
                .map(|&s| group.generators()[s].inverse)
                .collect();
            space
                .points()
                .iter()
                .map(|p| space.snap(&action.apply_payload(&inv_word, p)).0)
                .collect()
        })
        .collect();
    let mut worst = (0.0f64, (0usize, 0usize));
    for x in 0..n {
        let d = graph.distances_from(0, x, f64::INFINITY);
        for x2 in 0..n {
            let q = (0..ball.len())
                .map(|g| d[g * n + inverse_images[g][x2]])
                .fold(f64::INFINITY, f64::min);
            let disc = (q - level.dist(x, x2)).abs();
            if disc > worst.0 {
                worst = (disc, (x, x2));
            }
        }
    }
    let exact = action.is_exact();
    let tolerance = if exact {
        0.0
    } else {
        2.0 * radius as f64 * action.max_lipschitz() * space.mesh() * level.level()
    };
    Ok(QuotientReport {
        max_discrepancy: worst.0,
        tolerance,
        witness: worst.1,
        exact,
        ball_size: ball.len(),
    })
}
