//! Undirected labelled graphs, breadth-first shortest-path trees and diameters.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Edge `a`-`b`. `label_ab` is read when traversing from `a` to `b`,
/// `label_ba` in the opposite direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub label_ab: usize,
    pub label_ba: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// (neighbour, edge index), sorted.
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for (i, &(a, b)) in edges.iter().enumerate() {
            g.add_edge(a, b, 2 * i, 2 * i + 1);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize, label_ab: usize, label_ba: usize) -> usize {
        assert!(a < self.n && b < self.n, "edge endpoint out of range");
        let id = self.edges.len();
        self.edges.push(Edge { a, b, label_ab, label_ba });
        insert_sorted(&mut self.adj[a], (b, id));
        if a != b {
            insert_sorted(&mut self.adj[b], (a, id));
        }
        id
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Label read when walking edge `e` starting from `from`.
    pub fn label_from(&self, e: usize, from: usize) -> usize {
        let edge = &self.edges[e];
        if edge.a == from {
            edge.label_ab
        } else {
            edge.label_ba
        }
    }

    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &(w, _) in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components as a component id per vertex, plus the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().1 == 1
    }

    pub fn eccentricity(&self, v: usize) -> Result<usize> {
        self.bfs_distances(v).into_iter().map(|d| d.ok_or(Error::Disconnected)).try_fold(0, |m, d| Ok(m.max(d?)))
    }
}

fn insert_sorted(list: &mut Vec<(usize, usize)>, item: (usize, usize)) {
    let pos = list.binary_search(&item).unwrap_or_else(|p| p);
    list.insert(pos, item);
}

/// Exact diameter by BFS from every vertex.
pub fn graph_diameter(g: &Graph) -> Result<usize> {
    (0..g.num_vertices()).try_fold(0, |m, v| Ok(m.max(g.eccentricity(v)?)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    pub root: usize,
    /// `(parent, edge index)` for every vertex except the root.
    pub parent: Vec<Option<(usize, usize)>>,
    pub depth: Vec<usize>,
    /// Labels read along the tree path from the root to each vertex.
    pub access_words: Vec<Vec<usize>>,
}

impl SpanningTree {
    pub fn tree_edges(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self.parent.iter().flatten().map(|&(_, e)| e).collect();
        e.sort_unstable();
        e
    }

    pub fn as_graph(&self, n: usize) -> Graph {
        let mut t = Graph::new(n);
        for (v, p) in self.parent.iter().enumerate() {
            if let Some((u, e)) = p {
                t.add_edge(*u, v, *e, *e);
            }
        }
        t
    }

    pub fn diameter(&self) -> usize {
        graph_diameter(&self.as_graph(self.parent.len())).expect("tree is connected")
    }

    /// Tree path between two vertices, as a vertex sequence.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let up = |mut v: usize| {
            let mut p = vec![v];
            while let Some((u, _)) = self.parent[v] {
                v = u;
                p.push(v);
            }
            p
        };
        let pa = up(a);
        let pb = up(b);
        let mut i = pa.len();
        let mut j = pb.len();
        while i > 0 && j > 0 && pa[i - 1] == pb[j - 1] {
            i -= 1;
            j -= 1;
        }
        let mut path: Vec<usize> = pa[..=i].to_vec();
        path.extend(pb[..j].iter().rev());
        path
    }
}

/// Breadth-first shortest-path tree. Each vertex's parent is the
/// lowest-index neighbour one level closer to the root (lowest edge index
/// among parallel edges).
pub fn shortest_path_tree(g: &Graph, root: usize) -> Result<SpanningTree> {
    let dist = g.bfs_distances(root);
    let dist: Vec<usize> = dist.into_iter().map(|d| d.ok_or(Error::Disconnected)).collect::<Result<_>>()?;
    let n = g.num_vertices();
    let mut parent = vec![None; n];
    for v in 0..n {
        if v == root {
            continue;
        }
        parent[v] = g.neighbors(v).iter().copied().find(|&(u, _)| dist[u] + 1 == dist[v]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut access_words = vec![Vec::new(); n];
    for &v in &order {
        if let Some((u, e)) = parent[v] {
            let mut w = access_words[u].clone();
            w.push(g.label_from(e, u));
            access_words[v] = w;
        }
    }
    Ok(SpanningTree { root, parent, depth: dist, access_words })
}

/// Random connected simple graph: a random spanning tree plus `extra` chords.
pub fn random_connected_graph<R: Rng>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (a, b) = (order[i].min(order[j]), order[i].max(order[j]));
        pairs.insert((a, b));
    }
    let max_edges = n * (n.saturating_sub(1)) / 2;
    let target = (pairs.len() + extra).min(max_edges);
    while pairs.len() < target {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    Graph::from_edges(n, &pairs.into_iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    #[test]
    fn diameters() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(graph_diameter(&k4).unwrap(), 1);
        assert_eq!(graph_diameter(&cycle(8)).unwrap(), 4);
        assert_eq!(graph_diameter(&cycle(9)).unwrap(), 4);
        let split = Graph::from_edges(3, &[(0, 1)]);
        assert!(matches!(graph_diameter(&split), Err(Error::Disconnected)));
        assert!(shortest_path_tree(&split, 0).is_err());
    }

    #[test]
    fn path_tree_is_the_path() {
        let p = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let t = shortest_path_tree(&p, 0).unwrap();
        assert_eq!(t.diameter(), 4);
        assert_eq!(t.access_words[4], vec![0, 2, 4, 6]);
    }

    #[test]
    fn cycle_tree_bound() {
        let g = cycle(6);
        for root in 0..6 {
            let t = shortest_path_tree(&g, root).unwrap();
            assert!(t.diameter() <= 2 * graph_diameter(&g).unwrap());
            assert_eq!(t.tree_edges().len(), 5);
        }
        let t = shortest_path_tree(&g, 0).unwrap();
        // vertex 3 is reached through its lower neighbour 2
        assert_eq!(t.parent[3].unwrap().0, 2);
        assert_eq!(t.path(2, 4), vec![2, 1, 0, 5, 4]);
    }
}
