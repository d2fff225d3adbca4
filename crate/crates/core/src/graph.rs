use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuple::Vertex;

/// A simple graph on `0..n` with optional direction and vertex colors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    directed: bool,
    colors: Option<Vec<u32>>,
    adj: Vec<bool>,
}

impl Graph {
    /// Undirected edges are normalized to `(min, max)`; duplicates collapse.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        Self::build(n, edges, false, None)
    }

    pub fn directed(n: usize, arcs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        Self::build(n, arcs, true, None)
    }

    pub fn build(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
        directed: bool,
        colors: Option<Vec<u32>>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut adj = vec![false; n * n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let e = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            set.insert(e);
            adj[u * n + v] = true;
            if !directed {
                adj[v * n + u] = true;
            }
        }
        if let Some(c) = &colors {
            if c.len() != n {
                return Err(Error::InvalidGraph(format!(
                    "{} colors given for {n} vertices",
                    c.len()
                )));
            }
        }
        Ok(Self {
            n,
            edges: set,
            directed,
            colors,
            adj,
        })
    }

    pub fn with_colors(self, colors: Vec<u32>) -> Result<Self> {
        Self::build(self.n, self.edges, self.directed, Some(colors))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn colors(&self) -> Option<&[u32]> {
        self.colors.as_deref()
    }

    pub fn color(&self, v: Vertex) -> u32 {
        self.colors.as_ref().map_or(0, |c| c[v])
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u * self.n + v]
    }

    /// Out-neighbors in increasing order.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).count()
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    fn bfs(&self, s: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let d = dist[u].unwrap();
            for (v, dv) in dist.iter_mut().enumerate() {
                if dv.is_none() && (self.has_edge(u, v) || self.has_edge(v, u)) {
                    *dv = Some(d + 1);
                    q.push_back(v);
                }
            }
        }
        dist
    }

    /// Weak connectivity; the empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    pub fn is_bipartite(&self) -> bool {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for v in 0..self.n {
                    if !(self.has_edge(u, v) || self.has_edge(v, u)) {
                        continue;
                    }
                    match side[v] {
                        None => {
                            side[v] = side[u].map(|b| !b);
                            q.push_back(v);
                        }
                        Some(b) if Some(b) == side[u] => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Length of a shortest cycle of the underlying undirected graph.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            let mut parent = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for v in 0..self.n {
                    if !(self.has_edge(u, v) || self.has_edge(v, u)) {
                        continue;
                    }
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        q.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Image of the graph under the vertex map `v ↦ perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        let colors = self.colors.as_ref().map(|c| {
            let mut out = vec![0; self.n];
            for v in 0..self.n {
                out[perm[v]] = c[v];
            }
            out
        });
        Self::build(
            self.n,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
            self.directed,
            colors,
        )
    }

    pub fn complement(&self) -> Self {
        let n = self.n;
        let edges = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && (self.directed || u < v) && !self.has_edge(u, v));
        Self::build(n, edges.collect::<Vec<_>>(), self.directed, self.colors.clone())
            .expect("complement of a valid graph is valid")
    }
}

/// Serialized form: `{"n":…, "edges":[[u,v],…]}` plus optional fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        Self {
            n: g.n,
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            directed: g.directed,
            colors: g.colors.clone(),
        }
    }
}

impl TryFrom<GraphDoc> for Graph {
    type Error = Error;

    fn try_from(d: GraphDoc) -> Result<Self> {
        Graph::build(d.n, d.edges.into_iter().map(|[u, v]| (u, v)), d.directed, d.colors)
    }
}
