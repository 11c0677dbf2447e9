use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated tower of cyclic quotients `Z/m_1 <- Z/m_2 <- ... <- Z/m_n`
/// with the first-disagreement metric `d = a_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfiniteSpec {
    /// `|G_1| <= |G_2| <= ...`, each dividing the next.
    pub quotient_sizes: Vec<u64>,
    /// `a_1 > a_2 > ...`, one per level.
    pub decay_weights: Vec<f64>,
    /// Geometric decay ratio `lambda` in `(0, 1)`; also used to extend
    /// `a_j` past the truncation level.
    pub ratio: f64,
}

impl ProfiniteSpec {
    /// Dyadic tower `G_j = Z/2^j` with `a_j = ratio^j`.
    pub fn dyadic(depth: usize, ratio: f64) -> Result<Self> {
        if depth == 0 || depth > 40 {
            return Err(Error::param("depth", format!("{depth} not in 1..=40")));
        }
        let spec = ProfiniteSpec {
            quotient_sizes: (1..=depth as u32).map(|j| 1u64 << j).collect(),
            decay_weights: (1..=depth as i32).map(|j| ratio.powi(j)).collect(),
            ratio,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn truncation_level(&self) -> usize {
        self.quotient_sizes.len()
    }

    /// Number of points of the finite quotient at the truncation level.
    pub fn top_size(&self) -> u64 {
        *self.quotient_sizes.last().expect("validated spec is nonempty")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.quotient_sizes.len();
        if n == 0 {
            return Err(Error::param("quotient_sizes", "empty tower"));
        }
        if self.decay_weights.len() != n {
            return Err(Error::param(
                "decay_weights",
                format!("{} weights for {n} levels", self.decay_weights.len()),
            ));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::param("ratio", format!("{} not in (0,1)", self.ratio)));
        }
        if self.quotient_sizes[0] < 2 {
            return Err(Error::param("quotient_sizes", "first quotient must be nontrivial"));
        }
        for w in self.quotient_sizes.windows(2) {
            if w[1] % w[0] != 0 || w[1] <= w[0] {
                return Err(Error::param(
                    "quotient_sizes",
                    format!("{} does not properly divide {}", w[0], w[1]),
                ));
            }
        }
        if self.decay_weights.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::param("decay_weights", "weights must be positive"));
        }
        for (j, w) in self.decay_weights.windows(2).enumerate() {
            if w[1] > self.ratio * w[0] * (1.0 + 1e-12) {
                return Err(Error::param(
                    "decay_weights",
                    format!(
                        "a_{} = {} exceeds ratio * a_{} = {}",
                        j + 2,
                        w[1],
                        j + 1,
                        self.ratio * w[0]
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Digits `(g_1, ..., g_n)` of a canonical lift.
    pub fn digits(&self, lift: u64) -> Vec<u64> {
        self.quotient_sizes.iter().map(|&m| lift % m).collect()
    }

    /// Level (1-based) of the first disagreeing digit, or `None` if equal.
    pub fn first_disagreement(&self, a: u64, b: u64) -> Option<usize> {
        self.quotient_sizes
            .iter()
            .position(|&m| a % m != b % m)
            .map(|j| j + 1)
    }

    pub fn distance(&self, a: u64, b: u64) -> f64 {
        match self.first_disagreement(a, b) {
            Some(j) => self.decay_weights[j - 1],
            None => 0.0,
        }
    }

    /// `sum_{i > n} a_i^p` for the geometric extension `a_{n+k} = a_n ratio^k`.
    pub fn tail_power_sum(&self, p: f64) -> f64 {
        let an = *self.decay_weights.last().expect("validated");
        let lp = self.ratio.powf(p);
        an.powf(p) * lp / (1.0 - lp)
    }
}
