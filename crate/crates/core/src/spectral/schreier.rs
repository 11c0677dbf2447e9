use std::collections::{HashMap, VecDeque};

use crate::actions::{Element, GroupFamily, GroupPresentation};
use crate::error::{Error, Result};

use super::Graph;

/// Orbit graph of a residue pair under a generating set acting mod `n`.
#[derive(Clone, Debug)]
pub struct SchreierGraph {
    modulus: u64,
    vertices: Vec<(u64, u64)>,
    /// `(from, to, generator label)`, one per vertex and forward generator.
    labelled: Vec<(usize, usize, String)>,
    graph: Graph,
}

impl SchreierGraph {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn vertices(&self) -> &[(u64, u64)] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn labelled_edges(&self) -> &[(usize, usize, String)] {
        &self.labelled
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn position(&self, v: (u64, u64)) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }
}

fn act(g: &Element, v: (u64, u64), n: u64) -> (u64, u64) {
    match g {
        Element::Mat2([a, b, c, d]) => {
            let n = n as i128;
            let (x, y) = (v.0 as i128, v.1 as i128);
            let x2 = (*a as i128 * x + *b as i128 * y).rem_euclid(n);
            let y2 = (*c as i128 * x + *d as i128 * y).rem_euclid(n);
            (x2 as u64, y2 as u64)
        }
        _ => v,
    }
}

/// Schreier graph on the orbit of `basepoint` in `(Z/n)^2`.
///
/// Vertices are listed in breadth-first order over all generators. Every
/// vertex gets one edge per forward generator, so an involution pairs each
/// vertex twice and a generator fixing a vertex leaves a loop; the result is
/// `2|S|`-regular for `S` the forward generators.
pub fn schreier_graph(group: &GroupPresentation, n: u64, basepoint: (u64, u64)) -> Result<SchreierGraph> {
    if !matches!(group.family(), GroupFamily::Sl2 | GroupFamily::Trivial) {
        return Err(Error::UnsupportedKind(format!(
            "{} does not act on residue pairs",
            group.name
        )));
    }
    if n < 2 {
        return Err(Error::param("n", "modulus must be at least 2"));
    }
    let base = (basepoint.0 % n, basepoint.1 % n);
    if base == (0, 0) {
        return Err(Error::param("basepoint", "must be nonzero mod n"));
    }
    let gens = group.generators();
    let mut index = HashMap::from([(base, 0usize)]);
    let mut vertices = vec![base];
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for s in gens {
            let w = act(&s.element, v, n);
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(w) {
                slot.insert(vertices.len());
                vertices.push(w);
                queue.push_back(w);
            }
        }
    }
    let mut graph = Graph::new(vertices.len());
    let mut labelled = Vec::new();
    for (i, &v) in vertices.iter().enumerate() {
        for s in group.forward_generators() {
            let j = index[&act(&gens[s].element, v, n)];
            graph.add_edge(i, j);
            labelled.push((i, j, gens[s].label.clone()));
        }
    }
    Ok(SchreierGraph {
        modulus: n,
        vertices,
        labelled,
        graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_two_orbit() {
        let s = schreier_graph(&GroupPresentation::sl2(), 2, (1, 0)).unwrap();
        let mut v = s.vertices().to_vec();
        v.sort();
        assert_eq!(v, vec![(0, 1), (1, 0), (1, 1)]);
        let at = |p| s.position(p).unwrap();
        let has = |a, b, l: &str| {
            s.labelled_edges()
                .iter()
                .any(|(u, w, lab)| *u == at(a) && *w == at(b) && lab == l)
        };
        assert!(has((1, 0), (1, 0), "T"));
        assert!(has((0, 1), (1, 1), "T") && has((1, 1), (0, 1), "T"));
        assert!(has((1, 0), (0, 1), "R") && has((1, 1), (1, 1), "R"));
    }

    #[test]
    fn prime_orbits_are_everything_but_zero() {
        for p in [3u64, 5, 7, 11, 13] {
            let s = schreier_graph(&GroupPresentation::sl2(), p, (1, 0)).unwrap();
            assert_eq!(s.vertex_count() as u64, p * p - 1);
            assert!(s.graph().degrees().iter().all(|&d| d == 4.0));
            assert_eq!(s.graph().component_count(), 1);
        }
    }

    #[test]
    fn trivial_group_has_one_vertex() {
        let s = schreier_graph(&GroupPresentation::trivial(), 9, (1, 0)).unwrap();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.graph().edges(), &[(0, 0)]);
        assert_eq!(s.graph().degrees(), vec![2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let g = GroupPresentation::sl2();
        assert!(schreier_graph(&g, 1, (1, 0)).is_err());
        assert!(schreier_graph(&g, 5, (5, 10)).is_err());
        assert!(schreier_graph(&GroupPresentation::integers(), 5, (1, 0)).is_err());
    }
}
