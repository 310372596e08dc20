//! Simple undirected graphs over dense vertex ids.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {count} vertices")]
    VertexOutOfRange { vertex: Vertex, count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("repeated edge {0}-{1}")]
    RepeatedEdge(Vertex, Vertex),
    #[error("adjacency is not symmetric: {0} lists {1} but not vice versa")]
    Asymmetric(Vertex, Vertex),
}

/// A finite simple undirected graph.
///
/// Neighbor lists keep insertion order, which solvers use for tie-breaking.
/// Equality ignores that order. The graph is immutable once built.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count() == other.vertex_count() && self.edges() == other.edges()
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n] }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, count: n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adjacency[u].contains(&v) {
                return Err(GraphError::RepeatedEdge(u.min(v), u.max(v)));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Graph { adjacency })
    }

    /// Builds a graph from explicit neighbor lists, checking simplicity and
    /// symmetry with a full scan.
    pub fn from_adjacency(adjacency: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        let n = adjacency.len();
        for (u, nbrs) in adjacency.iter().enumerate() {
            for (i, &v) in nbrs.iter().enumerate() {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, count: n });
                }
                if v == u {
                    return Err(GraphError::SelfLoop(u));
                }
                if nbrs[..i].contains(&v) {
                    return Err(GraphError::RepeatedEdge(u.min(v), u.max(v)));
                }
                if !adjacency[v].contains(&u) {
                    return Err(GraphError::Asymmetric(u, v));
                }
            }
        }
        Ok(Graph { adjacency })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn star(leaves: usize) -> Self {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u].contains(&v)
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.vertex_count()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<_> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn adjacency(&self) -> &[Vec<Vertex>] {
        &self.adjacency
    }

    /// Component index per vertex, numbered in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(other.adjacency.iter().map(|nbrs| nbrs.iter().map(|v| v + shift).collect()));
        Graph { adjacency }
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let mut counts = BTreeMap::new();
        for &d in &degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        DegreeProfile { degrees, counts }
    }

    /// Length of a shortest cycle, or `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            dist.fill(usize::MAX);
            dist[root] = 0;
            parent[root] = usize::MAX;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                if let Some(b) = best {
                    // Any cycle closed from here has length >= 2*dist[u].
                    if 2 * dist[u] >= b {
                        break;
                    }
                }
                for &v in &self.adjacency[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn is_triangle_free(&self) -> bool {
        self.girth().map_or(true, |g| g >= 4)
    }

    /// Greedy clique: a cheap, sound lower bound on any proper coloring.
    pub fn greedy_clique(&self) -> Vec<Vertex> {
        let mut best: Vec<Vertex> = Vec::new();
        let mut order: Vec<Vertex> = self.vertices().collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        for &seed in &order {
            let mut clique = vec![seed];
            let mut cands: Vec<Vertex> = self.adjacency[seed].clone();
            cands.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
            for v in cands {
                if clique.iter().all(|&c| self.has_edge(c, v)) {
                    clique.push(v);
                }
            }
            if clique.len() > best.len() {
                best = clique;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub counts: BTreeMap<usize, usize>,
}

impl DegreeProfile {
    pub fn degree_sum(&self) -> usize {
        self.degrees.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid44() -> Graph {
        let idx = |r: usize, c: usize| (r % 4) * 4 + (c % 4);
        let mut edges = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                edges.push((idx(r, c), idx(r, c + 1)));
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
        Graph::from_edges(16, edges).unwrap()
    }

    #[test]
    fn rejects_loops_and_repeats() {
        assert_eq!(Graph::from_edges(2, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::from_edges(2, [(0, 1), (1, 0)]), Err(GraphError::RepeatedEdge(0, 1)));
        assert!(matches!(Graph::from_edges(2, [(0, 2)]), Err(GraphError::VertexOutOfRange { .. })));
        assert_eq!(Graph::from_adjacency(vec![vec![1], vec![]]), Err(GraphError::Asymmetric(0, 1)));
    }

    #[test]
    fn girth_examples() {
        assert_eq!(Graph::complete(7).girth(), Some(3));
        assert_eq!(grid44().girth(), Some(4));
        assert_eq!(Graph::path(3).girth(), None);
        assert_eq!(Graph::cycle(9).girth(), Some(9));
        assert_eq!(Graph::empty(4).girth(), None);
    }

    #[test]
    fn degree_profiles() {
        let k7 = Graph::complete(7).degree_profile();
        assert!(k7.degrees.iter().all(|&d| d == 6));
        assert_eq!(k7.counts, BTreeMap::from([(6, 7)]));
        let grid = grid44().degree_profile();
        assert_eq!(grid.counts, BTreeMap::from([(4, 16)]));
        assert_eq!(grid.degree_sum(), 2 * 32);
        let star = Graph::star(5).degree_profile();
        assert_eq!(star.counts, BTreeMap::from([(1, 5), (5, 1)]));
    }

    #[test]
    fn components_and_union() {
        let g = Graph::cycle(4).disjoint_union(&Graph::path(2));
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.components(), vec![0, 0, 0, 0, 1, 1]);
        assert!(!g.is_connected());
        assert!(Graph::cycle(5).is_connected());
    }

    #[test]
    fn greedy_clique_finds_k4_in_wheel() {
        let mut edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5).map(|i| (i, 5)));
        edges.push((0, 2));
        let g = Graph::from_edges(6, edges).unwrap();
        assert_eq!(g.greedy_clique().len(), 4);
        assert_eq!(grid44().greedy_clique().len(), 2);
    }
}
