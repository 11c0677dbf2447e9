//! Single-source shortest paths on dense and sparse nonnegative graphs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Item {
    pub dist: f64,
    pub node: usize,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    // reversed so BinaryHeap pops the smallest distance, then lowest node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// O(n^2) Dijkstra on a dense row-major weight matrix. `out` receives
/// the distances from `src`.
pub(crate) fn dense_dijkstra(w: &[f64], n: usize, src: usize, out: &mut [f64]) {
    let mut done = vec![false; n];
    out.fill(f64::INFINITY);
    out[src] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for (v, &d) in out.iter().enumerate() {
            if !done[v] && d < best {
                best = d;
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let row = &w[u * n..(u + 1) * n];
        for v in 0..n {
            if !done[v] {
                let c = best + row[v];
                if c < out[v] {
                    out[v] = c;
                }
            }
        }
    }
}

/// Heap Dijkstra on adjacency lists.
pub(crate) fn sparse_dijkstra(adj: &[Vec<(usize, f64)>], src: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item { dist: 0.0, node: src });
    while let Some(Item { dist, node }) = heap.pop() {
        if dist > out[node] {
            continue;
        }
        for &(v, w) in &adj[node] {
            let c = dist + w;
            if c < out[v] {
                out[v] = c;
                heap.push(Item { dist: c, node: v });
            }
        }
    }
}
