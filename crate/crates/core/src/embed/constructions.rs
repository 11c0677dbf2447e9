use crate::error::{Error, Result};
use crate::spaces::{FiniteSpace, Point, ProfiniteSpec};

use super::{EmbeddingTable, MetricMatrix};

/// `x ↦ (d(x, y))_y` in `L^p` of the net's weights.
pub fn kuratowski_embed(space: &FiniteSpace, p: f64) -> Result<EmbeddingTable> {
    kuratowski_from_metric(space, space.weights().to_vec(), p)
}

/// Kuratowski map of an arbitrary finite metric with coordinate weights.
pub fn kuratowski_from_metric<M: MetricMatrix + ?Sized>(metric: &M, weights: Vec<f64>, p: f64) -> Result<EmbeddingTable> {
    let n = metric.len();
    if weights.len() != n {
        return Err(Error::param("weights", format!("{} weights for {n} points", weights.len())));
    }
    if !(weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::param("weights", "total mass must be positive"));
    }
    let vectors = (0..n).map(|x| (0..n).map(|y| metric.dist(x, y)).collect()).collect();
    EmbeddingTable::new(vectors, p, weights)
}

/// Tower embedding with coordinates indexed by `G_1 ⊔ ... ⊔ G_n`, each of
/// unit weight: level `j` puts `2^{-1/p} a_j` at the digit `g_j`.
///
/// Levels past the truncation are lumped into one more block indexed by
/// `G_n`, carrying `(Σ_{i>n} a_i^p / 2)^{1/p}` at the top digit. Distinct
/// lifts keep distinct digits at every deeper level, so the block adds
/// exactly the missing tail of the infinite sum to every pairwise norm.
pub fn profinite_embed(spec: &ProfiniteSpec, points: &[Point], p: f64) -> Result<EmbeddingTable> {
    spec.validate()?;
    let lifts = points
        .iter()
        .map(|pt| match pt {
            Point::Profinite { lift } if *lift < spec.top_size() => Ok(*lift),
            other => Err(Error::param("points", format!("{other:?} is not a tower point"))),
        })
        .collect::<Result<Vec<u64>>>()?;
    let top = spec.top_size() as usize;
    let offsets: Vec<usize> = spec
        .quotient_sizes
        .iter()
        .scan(0usize, |acc, &m| {
            let at = *acc;
            *acc += m as usize;
            Some(at)
        })
        .collect();
    let tail_at = offsets.last().expect("validated") + top;
    let dim = tail_at + top;
    let scale = 2f64.powf(-1.0 / p);
    let tail = (spec.tail_power_sum(p) / 2.0).powf(1.0 / p);
    let vectors = lifts
        .iter()
        .map(|&lift| {
            let mut v = vec![0.0; dim];
            for (j, digit) in spec.digits(lift).into_iter().enumerate() {
                v[offsets[j] + digit as usize] = scale * spec.decay_weights[j];
            }
            v[tail_at + lift as usize] = tail;
            v
        })
        .collect();
    EmbeddingTable::new(vectors, p, vec![1.0; dim])
}

/// Finite group by multiplication table, with a metric on its elements.
/// Element 0 is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct CayleyTable {
    order: usize,
    product: Vec<usize>,
    dist: Vec<f64>,
}

impl CayleyTable {
    pub fn new(order: usize, product: Vec<usize>, dist: Vec<f64>) -> Result<Self> {
        if order == 0 || product.len() != order * order || dist.len() != order * order {
            return Err(Error::param("table", "sizes must match the order"));
        }
        if product.iter().any(|&k| k >= order) {
            return Err(Error::param("product", "entry out of range"));
        }
        if (0..order).any(|g| product[g] != g || product[g * order] != g) {
            return Err(Error::param("product", "element 0 is not the identity"));
        }
        Ok(CayleyTable { order, product, dist })
    }

    /// `Z/n` with the circle metric `min(k, n - k) / n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "order must be positive"));
        }
        let product = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let dist = (0..n * n)
            .map(|k| {
                let diff = (k / n + n - k % n) % n;
                diff.min(n - diff) as f64 / n as f64
            })
            .collect();
        Self::new(n, product, dist)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.product[a * self.order + b]
    }

    /// Largest `|d(γg, γg') - d(g, g')|` over all triples.
    pub fn left_invariance_defect(&self) -> f64 {
        let n = self.order;
        let mut worst = 0.0f64;
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let moved = self.dist(self.mul(c, a), self.mul(c, b));
                    worst = worst.max((moved - self.dist(a, b)).abs());
                }
            }
        }
        worst
    }
}

impl MetricMatrix for CayleyTable {
    fn len(&self) -> usize {
        self.order
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.order + j]
    }
}

/// `ι(g) = (c(hg))_h`, with `h` carrying the uniform probability weight.
///
/// Fails with [`Error::NotInvariant`] when the group metric is not left
/// invariant, since then the pairwise norms of `ι` cannot control it.
pub fn koopman_translation_embed(group: &CayleyTable, base: &EmbeddingTable) -> Result<EmbeddingTable> {
    let n = group.order();
    if base.len() != n {
        return Err(Error::param("base", format!("{} vectors for a group of order {n}", base.len())));
    }
    let defect = group.left_invariance_defect();
    if defect > 1e-12 {
        return Err(Error::NotInvariant(format!(
            "group metric moves by {defect} under left translation"
        )));
    }
    let k = base.dim();
    let weights: Vec<f64> = (0..n)
        .flat_map(|_| base.weights().iter().map(|w| w / n as f64))
        .collect();
    let vectors = (0..n)
        .map(|g| {
            let mut v = Vec::with_capacity(n * k);
            for h in 0..n {
                v.extend_from_slice(base.vector(group.mul(h, g)));
            }
            v
        })
        .collect();
    EmbeddingTable::new(vectors, base.p(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{ActionModel, Turn};
    use crate::embed::{distortion, DenseMetric};
    use crate::spaces::{build_net, Model};
    use std::sync::Arc;

    #[test]
    fn two_point_kuratowski_is_isometric() {
        let m = DenseMetric::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let t = kuratowski_from_metric(&m, vec![0.5, 0.5], p).unwrap();
            assert!((t.norm_diff(0, 1) - 1.0).abs() < 1e-15);
        }
        assert!(kuratowski_from_metric(&m, vec![0.5, 0.5], 0.9).is_err());
    }

    #[test]
    fn kuratowski_lipschitz_bound() {
        let space = build_net(&Model::Torus { dim: 1 }, 32, 0).unwrap();
        let mass = space.total_mass();
        for p in [1.0, 2.0, 4.0] {
            let t = kuratowski_embed(&space, p).unwrap();
            for i in 0..32 {
                for j in 0..32 {
                    assert!(t.norm_diff(i, j) <= mass.powf(1.0 / p) * space.dist(i, j) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn kuratowski_is_equivariant_on_exact_orbits() {
        let space = Arc::new(build_net(&Model::Torus { dim: 1 }, 8, 0).unwrap());
        let a = ActionModel::rotation(Arc::clone(&space), vec![Turn::rational(1, 8).unwrap()]).unwrap();
        let t = kuratowski_embed(&space, 2.0).unwrap();
        let (fwd, back) = (0, a.group().generators()[0].inverse);
        for x in 0..8 {
            let gx = a.image(fwd, x);
            for y in 0..8 {
                assert_eq!(t.vector(gx)[y], t.vector(x)[a.image(back, y)]);
            }
        }
    }

    #[test]
    fn profinite_closed_forms() {
        let spec = ProfiniteSpec::dyadic(5, 0.5).unwrap();
        let points: Vec<Point> = (0..32).map(|lift| Point::Profinite { lift }).collect();
        let m = build_net(&Model::Profinite(spec.clone()), 2, 0).unwrap();
        let t1 = profinite_embed(&spec, &points, 1.0).unwrap();
        let rep = distortion(&m, &t1).unwrap();
        assert_eq!(rep.expansion_max, 2.0);
        assert_eq!(rep.contraction_min, 2.0);
        let t2 = profinite_embed(&spec, &points, 2.0).unwrap();
        let rep = distortion(&m, &t2).unwrap();
        assert!((rep.expansion_max - 0.75f64.powf(-0.5)).abs() < 1e-12);
        assert_eq!(t2.norm_diff(7, 7), 0.0);
    }

    #[test]
    fn cyclic_table() {
        let g = CayleyTable::cyclic(6).unwrap();
        assert_eq!(g.mul(4, 5), 3);
        assert_eq!(g.dist(1, 5), 2.0 / 6.0);
        assert_eq!(g.left_invariance_defect(), 0.0);
    }

    #[test]
    fn koopman_is_invariant_and_keeps_distortion() {
        for n in 2..=16 {
            let g = CayleyTable::cyclic(n).unwrap();
            let base = kuratowski_from_metric(&g, vec![1.0 / n as f64; n], 2.0).unwrap();
            let iota = koopman_translation_embed(&g, &base).unwrap();
            for a in 0..n {
                for b in 0..n {
                    let want = iota.norm_diff(0, (b + n - a) % n);
                    assert!((iota.norm_diff(a, b) - want).abs() < 1e-12);
                }
            }
            let d_iota = distortion(&g, &iota).unwrap().distortion;
            let d_base = distortion(&g, &base).unwrap().distortion;
            assert!((d_iota - d_base).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn koopman_identity_is_a_permuted_base_table() {
        let g = CayleyTable::cyclic(5).unwrap();
        let base = kuratowski_from_metric(&g, vec![0.2; 5], 1.0).unwrap();
        let iota = koopman_translation_embed(&g, &base).unwrap();
        let mut got = iota.vector(0).to_vec();
        let mut want: Vec<f64> = base.vectors().iter().flatten().copied().collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        assert_eq!(got, want);
    }

    #[test]
    fn koopman_rejects_non_invariant_metric() {
        let mut g = CayleyTable::cyclic(4).unwrap();
        g.dist[1] = 0.9;
        g.dist[4] = 0.9;
        let base = kuratowski_from_metric(&g, vec![0.25; 4], 1.0).unwrap();
        assert!(matches!(koopman_translation_embed(&g, &base), Err(Error::NotInvariant(_))));
    }
}
