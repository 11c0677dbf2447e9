use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::actions::{ActionModel, GroupPresentation, WordBall};
use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};

/// Largest support drawn for one random trial.
const MAX_TRIAL_SUPPORT: usize = 8;

/// `h(γ, y) = Σ_n 2^{-n} |F_n(y) - F_n(γy)|²` over a word ball, from one
/// embedding per level.
#[derive(Clone, Debug)]
pub struct KernelData {
    levels: Vec<f64>,
    /// `2^{-n}` for `n = 1, 2, ...`.
    weights: Vec<f64>,
    /// Per level, `k(x, x') = |F(x) - F(x')|²`, row-major over the net.
    k_tables: Vec<Vec<f64>>,
    group: GroupPresentation,
    ball: WordBall,
    /// `images[g][y]`: net index of `γ_g y`.
    images: Vec<Vec<usize>>,
    /// `h[g * n + y]`.
    h: Vec<f64>,
    points: usize,
    exact: bool,
}

impl KernelData {
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self, level: usize, x: usize, x2: usize) -> f64 {
        self.k_tables[level][x * self.points + x2]
    }

    pub fn ball(&self) -> &WordBall {
        &self.ball
    }

    pub fn point_count(&self) -> usize {
        self.points
    }

    /// Whether every orbit point was hit exactly, without snapping.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `h(γ_g, y)` for ball index `g`.
    pub fn h(&self, g: usize, y: usize) -> f64 {
        self.h[g * self.points + y]
    }

    pub fn image(&self, g: usize, y: usize) -> usize {
        self.images[g][y]
    }

    /// `max_y |h(e, y)|`.
    pub fn normalization_defect(&self) -> f64 {
        (0..self.points).map(|y| self.h(0, y).abs()).fold(0.0, f64::max)
    }

    /// `max |h(γ, y) - h(γ⁻¹, γy)|` over the ball.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for g in 0..self.ball.len() {
            let inv = self
                .ball
                .position(&self.group.inverse(self.ball.element(g)))
                .expect("word balls are symmetric");
            for y in 0..self.points {
                let diff = self.h(g, y) - self.h(inv, self.image(g, y));
                worst = worst.max(diff.abs());
            }
        }
        worst
    }

    /// `min h(γ, y)` over `|γ| = ℓ` and all `y`, for `ℓ = 0..=radius`.
    pub fn growth_profile(&self) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; self.ball.radius() + 1];
        for g in 0..self.ball.len() {
            let l = self.ball.length(g);
            for y in 0..self.points {
                out[l] = out[l].min(self.h(g, y));
            }
        }
        out
    }
}

/// Kernel of the given per-level embeddings on the action's net.
pub fn truncated_kernel(
    action: &ActionModel,
    levels: &[f64],
    embeddings: &[EmbeddingTable],
    word_radius: usize,
    cap: usize,
) -> Result<KernelData> {
    let n = action.space().len();
    if levels.is_empty() || levels.len() != embeddings.len() {
        return Err(Error::param(
            "embeddings",
            format!("{} tables for {} levels", embeddings.len(), levels.len()),
        ));
    }
    if let Some(t) = embeddings.iter().find(|t| t.len() != n) {
        return Err(Error::param(
            "embeddings",
            format!("table has {} points, the net has {n}", t.len()),
        ));
    }
    let weights: Vec<f64> = (1..=levels.len() as i32).map(|k| 2f64.powi(-k)).collect();
    let k_tables: Vec<Vec<f64>> = embeddings
        .iter()
        .map(|t| {
            (0..n * n)
                .into_par_iter()
                .map(|k| t.norm_diff(k / n, k % n).powi(2))
                .collect()
        })
        .collect();
    let ball = action.group().word_ball(word_radius, cap)?;
    let images: Vec<Vec<usize>> = (0..ball.len())
        .map(|g| (0..n).map(|y| action.apply_word(ball.word(g), y).index).collect())
        .collect();
    let h = (0..ball.len() * n)
        .into_par_iter()
        .map(|k| {
            let (g, y) = (k / n, k % n);
            let z = images[g][y];
            weights
                .iter()
                .zip(&k_tables)
                .map(|(w, table)| w * table[y * n + z])
                .sum()
        })
        .collect();
    Ok(KernelData {
        levels: levels.to_vec(),
        weights,
        k_tables,
        group: action.group().clone(),
        ball,
        images,
        h,
        points: n,
        exact: action.is_exact(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativeTypeReport {
    /// Largest value of `Σ λ_γ λ_γ' h(γ'γ⁻¹, γy)` seen.
    pub max_value: f64,
    pub trials: usize,
    /// Trials dropped because some `γ'γ⁻¹` left the ball.
    pub skipped: usize,
}

/// Evaluate the quadratic form of `h` on random zero-sum vectors supported
/// on the ball, at every base point.
pub fn negative_definite_check(kernel: &KernelData, trials: usize, seed: u64) -> NegativeTypeReport {
    let ball = &kernel.ball;
    let group = &kernel.group;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = NegativeTypeReport {
        max_value: f64::NEG_INFINITY,
        trials,
        skipped: 0,
    };
    if ball.len() < 2 {
        report.max_value = 0.0;
        return report;
    }
    for _ in 0..trials {
        let size = rng.random_range(2..=ball.len().min(MAX_TRIAL_SUPPORT));
        let support = sample(&mut rng, ball.len(), size).into_vec();
        let mut lambda: Vec<f64> = (0..size).map(|_| rng.sample(StandardNormal)).collect();
        let mean = lambda.iter().sum::<f64>() / size as f64;
        lambda.iter_mut().for_each(|l| *l -= mean);

        // quotient[a][b] = ball index of γ_b γ_a⁻¹
        let quotient: Option<Vec<Vec<usize>>> = support
            .iter()
            .map(|&a| {
                let inv = group.inverse(ball.element(a));
                support
                    .iter()
                    .map(|&b| ball.position(&group.mul(ball.element(b), &inv)))
                    .collect()
            })
            .collect();
        let Some(quotient) = quotient else {
            report.skipped += 1;
            continue;
        };
        for y in 0..kernel.points {
            let mut form = 0.0;
            for (i, &a) in support.iter().enumerate() {
                let ay = kernel.image(a, y);
                for (j, row) in quotient[i].iter().enumerate() {
                    form += lambda[i] * lambda[j] * kernel.h(*row, ay);
                }
            }
            report.max_value = report.max_value.max(form);
        }
    }
    if report.max_value == f64::NEG_INFINITY {
        report.max_value = 0.0;
    }
    report
}
