//! Bipartite incidence graphs and their left-side walk metric.
//!
//! Distances between left vertices are always even: a left-left path
//! alternates sides, so the graph metric restricted to the left side is twice
//! the hop count in the shared-neighbour ("two-step") graph.

use std::collections::VecDeque;

use thiserror::Error;

use crate::complex::VertexId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BipartiteError {
    #[error("edge ({0}, {1}) out of range")]
    EdgeOutOfRange(u32, u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("left index {0} out of range")]
    IndexOutOfRange(u32),
    #[error("graph has no vertices")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    /// Even graph distance between two left vertices.
    Finite(usize),
    Disconnected,
}

/// Simple bipartite graph with ordered sides and 0/1 incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: Vec<VertexId>,
    right: Vec<String>,
    left_adj: Vec<Vec<u32>>,
    right_adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn new(
        left: Vec<VertexId>,
        right: Vec<String>,
        edges: &[(u32, u32)],
    ) -> Result<Self, BipartiteError> {
        let mut left_adj = vec![Vec::new(); left.len()];
        let mut right_adj = vec![Vec::new(); right.len()];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, w) in edges {
            if u as usize >= left.len() || w as usize >= right.len() {
                return Err(BipartiteError::EdgeOutOfRange(u, w));
            }
            if !seen.insert((u, w)) {
                return Err(BipartiteError::DuplicateEdge(u, w));
            }
            left_adj[u as usize].push(w);
            right_adj[w as usize].push(u);
        }
        for adj in left_adj.iter_mut().chain(right_adj.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(BipartiteGraph {
            left,
            right,
            left_adj,
            right_adj,
            edge_count: edges.len(),
        })
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn left_label(&self, u: u32) -> &VertexId {
        &self.left[u as usize]
    }

    pub fn right_label(&self, w: u32) -> &str {
        &self.right[w as usize]
    }

    pub fn left_neighbors(&self, u: u32) -> &[u32] {
        &self.left_adj[u as usize]
    }

    pub fn right_neighbors(&self, w: u32) -> &[u32] {
        &self.right_adj[w as usize]
    }

    pub fn left_degree(&self, u: u32) -> usize {
        self.left_adj[u as usize].len()
    }

    pub fn right_degree(&self, w: u32) -> usize {
        self.right_adj[w as usize].len()
    }

    /// True when every left vertex sees every right vertex.
    pub fn is_complete(&self) -> bool {
        self.left_adj
            .iter()
            .all(|adj| adj.len() == self.right.len())
    }

    /// Two-step hop counts from `origin` to every left vertex (`None` when
    /// unreachable). The B-metric distance is twice the hop count.
    pub fn left_hops(&self, origin: u32) -> Result<Vec<Option<u32>>, BipartiteError> {
        if origin as usize >= self.left.len() {
            return Err(BipartiteError::IndexOutOfRange(origin));
        }
        let mut hops = vec![None; self.left.len()];
        hops[origin as usize] = Some(0);
        let mut queue = VecDeque::from([origin]);
        while let Some(u) = queue.pop_front() {
            let next = hops[u as usize].expect("queued vertices are labelled") + 1;
            for &w in &self.left_adj[u as usize] {
                for &v in &self.right_adj[w as usize] {
                    if hops[v as usize].is_none() {
                        hops[v as usize] = Some(next);
                        queue.push_back(v);
                    }
                }
            }
        }
        Ok(hops)
    }

    /// Graph distance between two left vertices (always even).
    pub fn distance_left(&self, u: u32, v: u32) -> Result<Distance, BipartiteError> {
        if v as usize >= self.left.len() {
            return Err(BipartiteError::IndexOutOfRange(v));
        }
        let hops = self.left_hops(u)?;
        Ok(match hops[v as usize] {
            Some(h) => Distance::Finite(2 * h as usize),
            None => Distance::Disconnected,
        })
    }

    /// Connected components of the left side under the two-step relation.
    /// Left vertices with no neighbours form singleton components.
    pub fn left_components(&self) -> Vec<Vec<u32>> {
        let mut assigned = vec![false; self.left.len()];
        let mut components = Vec::new();
        for start in 0..self.left.len() as u32 {
            if assigned[start as usize] {
                continue;
            }
            let hops = self.left_hops(start).expect("start index in range");
            let mut comp: Vec<u32> = (0..self.left.len() as u32)
                .filter(|&v| hops[v as usize].is_some())
                .collect();
            comp.sort_unstable();
            for &v in &comp {
                assigned[v as usize] = true;
            }
            components.push(comp);
        }
        components
    }

    pub fn is_left_connected(&self) -> bool {
        self.left_components().len() <= 1
    }
}
