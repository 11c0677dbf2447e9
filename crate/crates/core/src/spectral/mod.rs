//! Schreier graphs, Laplacian spectral gaps, Cheeger bounds and the
//! Poincaré-type distortion bound for graph metrics.

mod graph;
mod schreier;

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::actions::{ActionModel, GroupPresentation};
use crate::error::{Error, Result};

pub use graph::Graph;
pub use schreier::{schreier_graph, SchreierGraph};

/// Above this many vertices the gap comes from the deflated power method.
pub const DENSE_LIMIT: usize = 5000;
/// Largest vertex count for the exhaustive conductance scan.
pub const EXACT_CHEEGER_LIMIT: usize = 20;

const POWER_TOLERANCE: f64 = 1e-8;
const POWER_MAX_ITERATIONS: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    /// Family parameter (the modulus for Schreier graphs, 0 otherwise).
    pub n: u64,
    pub vertex_count: usize,
    pub components: usize,
    pub lambda1_norm: f64,
    pub lambda1_comb: f64,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
    pub exact_h: Option<f64>,
    pub d_lb: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheegerBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact_h: Option<f64>,
}

impl CheegerBounds {
    pub fn sandwich_holds(&self) -> bool {
        self.exact_h
            .is_none_or(|h| self.lower <= h + 1e-12 && h <= self.upper + 1e-12)
    }
}

/// Reports for a family, ordered by parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub reports: Vec<SpectralReport>,
    /// Least normalized `λ₁` over the family.
    pub family_floor: f64,
}

/// Second-smallest eigenvalue of both Laplacians.
///
/// Disconnected graphs report `λ₁ = 0` along with their component count.
pub fn spectral_gap(graph: &Graph) -> SpectralReport {
    let components = graph.component_count();
    let (norm, comb) = if components > 1 || graph.vertex_count() < 2 {
        (0.0, 0.0)
    } else if graph.vertex_count() <= DENSE_LIMIT {
        let norm = second_smallest(graph.normalized_laplacian());
        let comb = if graph.is_regular() {
            graph.degrees()[0] * norm
        } else {
            second_smallest(graph.combinatorial_laplacian())
        };
        (norm, comb)
    } else {
        (power_gap(graph, true), power_gap(graph, false))
    };
    let bounds = bounds_from(norm, None);
    SpectralReport {
        n: 0,
        vertex_count: graph.vertex_count(),
        components,
        lambda1_norm: norm,
        lambda1_comb: comb,
        cheeger_lower: bounds.lower,
        cheeger_upper: bounds.upper,
        exact_h: None,
        d_lb: None,
    }
}

/// `λ/2 ≤ h ≤ sqrt(2λ)` for the normalized gap `λ`, with the conductance
/// `h` computed by scanning every cut when `exact` is set and the graph is
/// small enough.
pub fn cheeger_bounds(graph: &Graph, exact: bool) -> CheegerBounds {
    let lambda = spectral_gap(graph).lambda1_norm;
    let h = (exact && graph.vertex_count() <= EXACT_CHEEGER_LIMIT).then(|| conductance(graph));
    bounds_from(lambda, h)
}

fn bounds_from(lambda: f64, exact_h: Option<f64>) -> CheegerBounds {
    CheegerBounds {
        lower: lambda / 2.0,
        upper: (2.0 * lambda).sqrt(),
        exact_h,
    }
}

/// `min |E(S, S^c)| / vol(S)` over cuts with `0 < vol(S) ≤ vol(V)/2`.
fn conductance(graph: &Graph) -> f64 {
    let n = graph.vertex_count();
    if n < 2 {
        return 0.0;
    }
    let deg = graph.degrees();
    let total: f64 = deg.iter().sum();
    let cut_edges: Vec<(usize, usize)> = graph.edges().iter().copied().filter(|(u, v)| u != v).collect();
    let mut best = f64::INFINITY;
    for mask in 1u32..((1u32 << n) - 1) {
        let vol: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| deg[i]).sum();
        if vol == 0.0 || vol > total / 2.0 {
            continue;
        }
        let cut = cut_edges
            .iter()
            .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
            .count();
        best = best.min(cut as f64 / vol);
    }
    best
}

/// `sqrt(λ₁ · Σ d(u,v)² / (|V| |E|))` with `λ₁` the combinatorial gap, the
/// sum over unordered pairs of hop distances and `|E|` the non-loop edges.
/// No embedding of the graph metric into Hilbert space that does not
/// contract distances has smaller distortion.
pub fn distortion_lower_bound(graph: &Graph) -> Result<f64> {
    let n = graph.vertex_count();
    if graph.component_count() != 1 {
        return Err(Error::param("graph", "must be connected"));
    }
    let edges = graph.non_loop_edge_count();
    if edges == 0 {
        return Ok(0.0);
    }
    let lambda = spectral_gap(graph).lambda1_comb;
    let d = graph.distance_matrix();
    let mut sum = 0.0;
    for u in 0..n {
        for v in (u + 1)..n {
            let x = d[u * n + v] as f64;
            sum += x * x;
        }
    }
    Ok((lambda * sum / (n as f64 * edges as f64)).sqrt())
}

/// Spectral report of the Schreier graph on the orbit of `(1, 0)` for each
/// modulus, computed in parallel. `exact_h` is filled for small graphs.
pub fn schreier_family(group: &GroupPresentation, moduli: &[u64]) -> Result<FamilyReport> {
    let mut reports = moduli
        .par_iter()
        .map(|&n| {
            let sch = schreier_graph(group, n, (1, 0))?;
            let g = sch.graph();
            let mut rep = spectral_gap(g);
            rep.n = n;
            if g.vertex_count() <= EXACT_CHEEGER_LIMIT {
                rep.exact_h = Some(conductance(g));
            }
            rep.d_lb = distortion_lower_bound(g).ok();
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by_key(|r| r.n);
    let family_floor = reports.iter().map(|r| r.lambda1_norm).fold(f64::INFINITY, f64::min);
    Ok(FamilyReport { reports, family_floor })
}

/// Graph on the action's net at level `r`: one edge `{x, snap(sx)}` per
/// point and forward generator, plus every base pair with `r d(x, y) <= 1`.
pub fn level_graph(action: &ActionModel, level: f64) -> Graph {
    let space = action.space();
    let n = space.len();
    let mut g = Graph::new(n);
    for x in 0..n {
        for s in action.group().forward_generators() {
            g.add_edge(x, action.image(s, x));
        }
    }
    for x in 0..n {
        for y in (x + 1)..n {
            if level * space.dist(x, y) <= 1.0 {
                g.add_edge(x, y);
            }
        }
    }
    g
}

/// Header plus one row per report.
pub fn write_spectral_csv<W: Write>(mut out: W, reports: &[SpectralReport]) -> Result<()> {
    writeln!(out, "n,vertices,lambda1_norm,lambda1_comb,cheeger_lo,cheeger_hi,d_lb")?;
    for r in reports {
        let d_lb = r.d_lb.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.vertex_count, r.lambda1_norm, r.lambda1_comb, r.cheeger_lower, r.cheeger_upper, d_lb
        )?;
    }
    Ok(())
}

fn second_smallest(m: DMatrix<f64>) -> f64 {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1].max(0.0)
}

/// Gap of a connected graph by power iteration on `c I - L` restricted to
/// the complement of the kernel vector.
fn power_gap(graph: &Graph, normalized: bool) -> f64 {
    let n = graph.vertex_count();
    let deg = graph.degrees();
    let scale: Vec<f64> = if normalized {
        deg.iter().map(|&d| 1.0 / d.sqrt()).collect()
    } else {
        vec![1.0; n]
    };
    let mut kernel: Vec<f64> = if normalized { deg.iter().map(|d| d.sqrt()).collect() } else { vec![1.0; n] };
    normalize(&mut kernel);
    let shift = if normalized { 2.0 } else { 2.0 * deg.iter().cloned().fold(0.0, f64::max) };

    let apply = |x: &[f64], y: &mut [f64]| {
        // y = (shift I - L) x
        for i in 0..n {
            let diag = if normalized { 1.0 } else { deg[i] };
            y[i] = (shift - diag) * x[i];
        }
        for &(u, v) in graph.edges() {
            let w = scale[u] * scale[v];
            y[u] += w * x[v];
            y[v] += w * x[u];
        }
    };
    let deflate = |x: &mut [f64]| {
        let dot: f64 = x.iter().zip(&kernel).map(|(a, b)| a * b).sum();
        for (a, b) in x.iter_mut().zip(&kernel) {
            *a -= dot * b;
        }
    };

    // deterministic start, orthogonal to the kernel after deflation
    let mut x: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * 0.618_033_988_749).fract() - 0.5).collect();
    deflate(&mut x);
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut mu = 0.0;
    for _ in 0..POWER_MAX_ITERATIONS {
        apply(&x, &mut y);
        deflate(&mut y);
        let next: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        normalize(&mut y);
        std::mem::swap(&mut x, &mut y);
        if (next - mu).abs() < POWER_TOLERANCE {
            mu = next;
            break;
        }
        mu = next;
    }
    (shift - mu).max(0.0)
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|a| *a /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn small_spectra() {
        let k2 = spectral_gap(&Graph::complete(2));
        assert!(close(k2.lambda1_comb, 2.0) && close(k2.lambda1_norm, 2.0));
        assert!(close(spectral_gap(&Graph::complete(3)).lambda1_comb, 3.0));
        let c4 = spectral_gap(&Graph::cycle(4));
        assert!(close(c4.lambda1_norm, 1.0));
    }

    #[test]
    fn disconnected_reports_zero_gap() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]);
        let rep = spectral_gap(&g);
        assert_eq!(rep.components, 2);
        assert_eq!(rep.lambda1_norm, 0.0);
        assert!(distortion_lower_bound(&g).is_err());
    }

    #[test]
    fn cheeger_examples() {
        let b = cheeger_bounds(&Graph::complete(2), true);
        assert!(close(b.lower, 1.0) && close(b.upper, 2.0));
        assert_eq!(b.exact_h, Some(1.0));
        let b = cheeger_bounds(&Graph::cycle(4), true);
        assert!(close(b.lower, 0.5) && close(b.upper, 2f64.sqrt()));
        assert_eq!(b.exact_h, Some(0.5));
    }

    #[test]
    fn distortion_bound_examples() {
        assert!(close(distortion_lower_bound(&Graph::complete(4)).unwrap(), 1.0));
        assert!(close(distortion_lower_bound(&Graph::cycle(4)).unwrap(), 1.5f64.sqrt()));
        assert!(close(distortion_lower_bound(&Graph::complete(2)).unwrap(), 1.0));
    }

    #[test]
    fn cycle_distortion_bounds_match_reference() {
        for (n, want) in [(8, 1.2692173586403506), (16, 1.2792927933070424), (48, 1.2821904978068215)] {
            let got = distortion_lower_bound(&Graph::cycle(n)).unwrap();
            assert!(close(got, want), "C{n}: {got}");
        }
    }

    fn random_connected(rng: &mut ChaCha8Rng) -> Graph {
        let n = rng.random_range(2..=16);
        let mut g = Graph::new(n);
        for v in 1..n {
            let u = rng.random_range(0..v);
            g.add_edge(u, v);
        }
        for _ in 0..rng.random_range(0..2 * n) {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            g.add_edge(u, v);
        }
        g
    }

    #[test]
    fn cheeger_sandwich_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_connected(&mut rng);
            let b = cheeger_bounds(&g, true);
            assert!(b.exact_h.is_some());
            assert!(b.sandwich_holds(), "{b:?} on {:?}", g.edges());
        }
    }

    #[test]
    fn laplacian_kernel_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let g = random_connected(&mut rng);
            let n = g.vertex_count();
            let l = g.combinatorial_laplacian();
            let eig = l.clone().symmetric_eigenvalues();
            assert!(eig.iter().all(|&x| x > -1e-9));
            let ones = nalgebra::DVector::from_element(n, 1.0);
            assert!((l * ones).norm() < 1e-8);
        }
    }

    #[test]
    fn power_method_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = random_connected(&mut rng);
            if g.vertex_count() < 3 {
                continue;
            }
            let dense = spectral_gap(&g);
            let norm = power_gap(&g, true);
            let comb = power_gap(&g, false);
            assert!((dense.lambda1_norm - norm).abs() < 1e-5, "{} vs {norm}", dense.lambda1_norm);
            assert!((dense.lambda1_comb - comb).abs() < 1e-4, "{} vs {comb}", dense.lambda1_comb);
        }
    }

    #[test]
    fn schreier_family_matches_reference() {
        let want = [
            (3, 8, 0.35961179679779265, 0.9879722479588512),
            (5, 24, 0.07517120105906915, 0.8748597040053567),
            (7, 48, 0.06310125408009942, 0.987555030395878),
            (11, 120, 0.044181273807811075, 1.0791036574759845),
            (13, 168, 0.038307261175101956, 1.1241293028953807),
        ];
        let moduli: Vec<u64> = want.iter().map(|w| w.0).collect();
        let fam = schreier_family(&GroupPresentation::sl2(), &moduli).unwrap();
        for (rep, &(n, v, lambda, d_lb)) in fam.reports.iter().zip(&want) {
            assert_eq!((rep.n, rep.vertex_count), (n, v));
            assert!(close(rep.lambda1_norm, lambda), "n={n}: {}", rep.lambda1_norm);
            assert!(close(rep.lambda1_comb, 4.0 * lambda));
            assert!(close(rep.d_lb.unwrap(), d_lb), "n={n}: {:?}", rep.d_lb);
        }
        assert!(close(fam.family_floor, 0.038307261175101956));
        assert!(fam.reports[0].exact_h.is_some());
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        let mut rep = spectral_gap(&Graph::complete(2));
        rep.d_lb = Some(1.0);
        write_spectral_csv(&mut buf, &[rep]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 2);
        assert!(s.lines().nth(1).unwrap().starts_with("0,2,2"));
    }
}
