//! Explicit embeddings of finite metric spaces into weighted `L^p` spaces
//! and measurement of their distortion.

mod constructions;

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::FiniteSpace;
use crate::spectral::Graph;
use crate::warp::WarpedLevel;

pub use constructions::{
    koopman_translation_embed, kuratowski_embed, kuratowski_from_metric, profinite_embed, CayleyTable,
};

/// Number of logarithmic distance buckets for the control envelopes.
pub const RHO_BUCKETS: usize = 32;

/// Finite metric given by its distance matrix.
pub trait MetricMatrix: Sync {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl MetricMatrix for FiniteSpace {
    fn len(&self) -> usize {
        FiniteSpace::len(self)
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        FiniteSpace::dist(self, i, j)
    }
}

impl MetricMatrix for WarpedLevel {
    fn len(&self) -> usize {
        WarpedLevel::len(self)
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        WarpedLevel::dist(self, i, j)
    }
}

/// Row-major distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMetric {
    n: usize,
    d: Vec<f64>,
}

impl DenseMetric {
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::param("d", format!("{} entries for {n} points", d.len())));
        }
        if d.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::param("d", "distances must be finite and nonnegative"));
        }
        Ok(DenseMetric { n, d })
    }

    /// Hop metric of a connected graph.
    pub fn from_graph(graph: &Graph) -> Result<Self> {
        let d = graph.distance_matrix();
        if d.contains(&u32::MAX) {
            return Err(Error::param("graph", "must be connected"));
        }
        Self::new(graph.vertex_count(), d.into_iter().map(f64::from).collect())
    }
}

impl MetricMatrix for DenseMetric {
    fn len(&self) -> usize {
        self.n
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// One coordinate vector per point, measured with the weighted `p`-norm
/// `(Σ_k w_k |v_k|^p)^{1/p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    vectors: Vec<Vec<f64>>,
    p: f64,
    weights: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(vectors: Vec<Vec<f64>>, p: f64, weights: Vec<f64>) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::param("p", format!("{p} is not a finite exponent >= 1")));
        }
        let dim = weights.len();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::param("weights", "must be finite and nonnegative"));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::param(
                    "vectors",
                    format!("point {i} has {} coordinates, expected {dim}", v.len()),
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::param("vectors", format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(EmbeddingTable { vectors, p, weights })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn norm_diff(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.vectors[i], &self.vectors[j]);
        let sum: f64 = a
            .iter()
            .zip(b)
            .zip(&self.weights)
            .map(|((x, y), w)| w * (x - y).abs().powf(self.p))
            .sum();
        sum.powf(1.0 / self.p)
    }

    /// Header `id,c0,c1,...` then one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.dim()).map(|k| format!("c{k}")).collect();
        writeln!(out, "id,{}", header.join(","))?;
        for (i, v) in self.vectors.iter().enumerate() {
            let row: Vec<String> = v.iter().map(f64::to_string).collect();
            writeln!(out, "{i},{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Control envelope sample: every pair with base distance in the bucket
/// ending at `distance` has image distance in `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoSample {
    pub distance: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub expansion_max: f64,
    pub contraction_min: f64,
    pub distortion: f64,
    /// Distinct pairs at base distance 0, left out of the ratios.
    pub duplicates: usize,
    pub pairs: usize,
    /// Monotone envelopes: `lower` is a running minimum taken from the far
    /// end, `upper` a running maximum from the near end.
    pub rho_samples: Vec<RhoSample>,
}

impl DistortionReport {
    pub fn csv_header() -> &'static str {
        "pairs,duplicates,expansion_max,contraction_min,distortion"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.pairs, self.duplicates, self.expansion_max, self.contraction_min, self.distortion
        )
    }
}

#[derive(Clone, Copy)]
struct Scan {
    expansion: f64,
    contraction: f64,
    duplicates: usize,
    pairs: usize,
}

/// Exact scan of `|F(x) - F(y)| / d(x, y)` over all pairs.
pub fn distortion<M: MetricMatrix + ?Sized>(metric: &M, table: &EmbeddingTable) -> Result<DistortionReport> {
    let n = metric.len();
    if table.len() != n {
        return Err(Error::param(
            "table",
            format!("{} vectors for {n} points", table.len()),
        ));
    }
    if n < 2 {
        return Err(Error::param("metric", "need at least two points"));
    }
    let rows: Vec<(Scan, Vec<(f64, f64)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut scan = Scan {
                expansion: 0.0,
                contraction: f64::INFINITY,
                duplicates: 0,
                pairs: 0,
            };
            let mut samples = Vec::with_capacity(n - i - 1);
            for j in (i + 1)..n {
                let d = metric.dist(i, j);
                let f = table.norm_diff(i, j);
                if d <= 0.0 {
                    scan.duplicates += 1;
                    continue;
                }
                scan.pairs += 1;
                let ratio = f / d;
                scan.expansion = scan.expansion.max(ratio);
                scan.contraction = scan.contraction.min(ratio);
                samples.push((d, f));
            }
            (scan, samples)
        })
        .collect();

    let mut total = Scan {
        expansion: 0.0,
        contraction: f64::INFINITY,
        duplicates: 0,
        pairs: 0,
    };
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for (s, samples) in &rows {
        total.expansion = total.expansion.max(s.expansion);
        total.contraction = total.contraction.min(s.contraction);
        total.duplicates += s.duplicates;
        total.pairs += s.pairs;
        for &(d, _) in samples {
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
    }
    if total.pairs == 0 {
        return Err(Error::param("metric", "every pair is at distance 0"));
    }

    let edges: Vec<f64> = if dmax > dmin {
        let ratio = (dmax / dmin).ln();
        (1..=RHO_BUCKETS)
            .map(|k| dmin * (ratio * k as f64 / RHO_BUCKETS as f64).exp())
            .collect()
    } else {
        vec![dmax]
    };
    let mut lower = vec![f64::INFINITY; edges.len()];
    let mut upper = vec![f64::NEG_INFINITY; edges.len()];
    for (_, samples) in &rows {
        for &(d, f) in samples {
            let b = edges.partition_point(|&e| e < d).min(edges.len() - 1);
            lower[b] = lower[b].min(f);
            upper[b] = upper[b].max(f);
        }
    }
    let mut rho: Vec<RhoSample> = edges
        .iter()
        .zip(lower.iter().zip(&upper))
        .filter(|(_, (lo, _))| lo.is_finite())
        .map(|(&distance, (&lower, &upper))| RhoSample { distance, lower, upper })
        .collect();
    for k in (0..rho.len().saturating_sub(1)).rev() {
        rho[k].lower = rho[k].lower.min(rho[k + 1].lower);
    }
    for k in 1..rho.len() {
        rho[k].upper = rho[k].upper.max(rho[k - 1].upper);
    }

    let distortion = if total.contraction > 0.0 {
        total.expansion / total.contraction
    } else {
        f64::INFINITY
    };
    Ok(DistortionReport {
        expansion_max: total.expansion,
        contraction_min: total.contraction,
        distortion,
        duplicates: total.duplicates,
        pairs: total.pairs,
        rho_samples: rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometric_table_has_distortion_one() {
        let m = DenseMetric::new(3, vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        let t = EmbeddingTable::new(vec![vec![0.0], vec![1.0], vec![2.0]], 1.0, vec![1.0]).unwrap();
        let rep = distortion(&m, &t).unwrap();
        assert_eq!(rep.distortion, 1.0);
        assert_eq!(rep.pairs, 3);
    }

    #[test]
    fn duplicates_are_counted() {
        let m = DenseMetric::new(3, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let t = EmbeddingTable::new(vec![vec![0.0], vec![0.0], vec![1.0]], 2.0, vec![1.0]).unwrap();
        let rep = distortion(&m, &t).unwrap();
        assert_eq!(rep.duplicates, 1);
        assert_eq!(rep.pairs, 2);
    }

    #[test]
    fn envelopes_are_monotone() {
        let g = Graph::cycle(20);
        let m = DenseMetric::from_graph(&g).unwrap();
        // squash the circle onto a segment
        let vectors = (0..20).map(|i| vec![(i as f64 - 10.0).abs()]).collect();
        let t = EmbeddingTable::new(vectors, 1.0, vec![1.0]).unwrap();
        let rep = distortion(&m, &t).unwrap();
        assert!(rep.distortion >= 1.0);
        for w in rep.rho_samples.windows(2) {
            assert!(w[0].lower <= w[1].lower && w[0].upper <= w[1].upper);
            assert!(w[0].distance < w[1].distance);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(EmbeddingTable::new(vec![vec![0.0]], 0.5, vec![1.0]).is_err());
        assert!(EmbeddingTable::new(vec![vec![0.0, 1.0]], 1.0, vec![1.0]).is_err());
        assert!(EmbeddingTable::new(vec![vec![f64::NAN]], 1.0, vec![1.0]).is_err());
    }
}
