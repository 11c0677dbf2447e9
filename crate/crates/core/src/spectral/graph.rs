use std::collections::VecDeque;

use nalgebra::DMatrix;

/// Undirected multigraph with loops. A loop adds 2 to the degree of its
/// vertex and 2 to the diagonal of the adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u}, {v}) out of range");
        self.edges.push((u, v));
    }

    pub fn cycle(n: usize) -> Self {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges joining distinct vertices, counted with multiplicity.
    pub fn non_loop_edge_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u != v).count()
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1.0;
            d[v] += 1.0;
        }
        d
    }

    pub fn is_regular(&self) -> bool {
        let d = self.degrees();
        d.iter().all(|&x| x == d[0])
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] += 1.0;
            a[(v, u)] += 1.0;
        }
        a
    }

    /// `D - A`.
    pub fn combinatorial_laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        for (i, d) in self.degrees().into_iter().enumerate() {
            l[(i, i)] += d;
        }
        l
    }

    /// `I - D^{-1/2} A D^{-1/2}`; isolated vertices get a zero row.
    pub fn normalized_laplacian(&self) -> DMatrix<f64> {
        let deg = self.degrees();
        let inv: Vec<f64> = deg.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
        let a = self.adjacency();
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let id = if i == j && deg[i] > 0.0 { 1.0 } else { 0.0 };
            id - inv[i] * a[(i, j)] * inv[j]
        })
    }

    pub(crate) fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj
    }

    pub fn component_count(&self) -> usize {
        let adj = self.neighbours();
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Hop distances from `src`; `u32::MAX` marks unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        bfs_with(&self.neighbours(), src)
    }

    /// All-pairs hop distances, row-major.
    pub fn distance_matrix(&self) -> Vec<u32> {
        let adj = self.neighbours();
        (0..self.n).flat_map(|s| bfs_with(&adj, s)).collect()
    }
}

fn bfs_with(adj: &[Vec<usize>], src: usize) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    d[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if d[v] == u32::MAX {
                d[v] = d[u] + 1;
                queue.push_back(v);
            }
        }
    }
    d
}
