//! Core graph representation: immutable undirected weighted graphs in
//! compressed adjacency form, induced subgraphs, connected components, and
//! community aggregation (supernode construction).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::quality::Partition;

/// Immutable undirected weighted graph over dense vertex ids `0..n`.
///
/// Parallel edges are merged at construction; self-loops are stored
/// separately from the adjacency. A self-loop of weight `w` contributes `2w`
/// to its vertex degree, so the sum of all degrees equals `total_weight_2m`
/// on aggregated graphs too.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    self_loops: Vec<f64>,
    degrees: Vec<f64>,
    total_weight_2m: f64,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate `(u, v)` entries (in
    /// either orientation) are merged by summing weights; `u == v` entries
    /// accumulate into the vertex self-loop.
    pub fn from_edges(n: usize, edges: &[(u32, u32, f64)]) -> Result<Graph> {
        let mut self_loops = vec![0.0f64; n];
        let mut undirected: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u as usize >= n {
                return Err(Error::VertexOutOfRange { id: u, n });
            }
            if v as usize >= n {
                return Err(Error::VertexOutOfRange { id: v, n });
            }
            if !(w > 0.0) {
                return Err(Error::NonpositiveWeight { u, v, w });
            }
            if u == v {
                self_loops[u as usize] += w;
            } else {
                undirected.push((u.min(v), u.max(v), w));
            }
        }
        // Canonical sort; weight bits break ties so merged sums are
        // evaluated in a reproducible order.
        undirected.sort_unstable_by(|a, b| {
            (a.0, a.1, a.2.to_bits()).cmp(&(b.0, b.1, b.2.to_bits()))
        });
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(undirected.len());
        for (u, v, w) in undirected {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }

        let mut counts = vec![0usize; n];
        for &(u, v, _) in &merged {
            counts[u as usize] += 1;
            counts[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        let mut weights = vec![0.0f64; offsets[n]];
        for &(u, v, w) in &merged {
            targets[cursor[u as usize]] = v;
            weights[cursor[u as usize]] = w;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            weights[cursor[v as usize]] = w;
            cursor[v as usize] += 1;
        }

        let mut degrees = vec![0.0f64; n];
        for v in 0..n {
            let mut d = 2.0 * self_loops[v];
            for idx in offsets[v]..offsets[v + 1] {
                d += weights[idx];
            }
            degrees[v] = d;
        }
        let total_weight_2m = degrees.iter().sum();

        Ok(Graph {
            offsets,
            targets,
            weights,
            self_loops,
            degrees,
            total_weight_2m,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.self_loops.len()
    }

    /// Number of distinct off-loop edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Off-loop neighbors of `v` with edge weights.
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let lo = self.offsets[v as usize];
        let hi = self.offsets[v as usize + 1];
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    pub fn neighbor_count(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Weighted degree `d(v)`, counting a self-loop of weight `w` as `2w`.
    pub fn degree(&self, v: u32) -> f64 {
        self.degrees[v as usize]
    }

    pub fn self_loop(&self, v: u32) -> f64 {
        self.self_loops[v as usize]
    }

    /// Cached `Σ_i d(i)`, i.e. twice the total edge weight.
    pub fn total_weight_2m(&self) -> f64 {
        self.total_weight_2m
    }

    pub fn has_self_loops(&self) -> bool {
        self.self_loops.iter().any(|&w| w > 0.0)
    }

    /// Distinct edges `(u, v, w)` with `u <= v`; self-loops included once.
    pub fn edges(&self) -> Vec<(u32, u32, f64)> {
        let n = self.vertex_count();
        let mut out = Vec::with_capacity(self.edge_count() + n / 8);
        for u in 0..n as u32 {
            if self.self_loops[u as usize] > 0.0 {
                out.push((u, u, self.self_loops[u as usize]));
            }
            for (v, w) in self.neighbors(u) {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1usize;
        while let Some(v) = stack.pop() {
            for (u, _) in self.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }
}

/// An ordered (ascending) list of distinct vertex ids of some graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    ids: Vec<u32>,
}

impl VertexSet {
    /// Sorts `ids`, rejecting duplicates and ids outside `[0, n)`.
    pub fn new(mut ids: Vec<u32>, n: usize) -> Result<VertexSet> {
        ids.sort_unstable();
        for window in ids.windows(2) {
            if window[0] == window[1] {
                return Err(Error::DuplicateVertex(window[0]));
            }
        }
        if let Some(&last) = ids.last() {
            if last as usize >= n {
                return Err(Error::VertexOutOfRange { id: last, n });
            }
        }
        Ok(VertexSet { ids })
    }

    /// All vertices of `g`.
    pub fn full(g: &Graph) -> VertexSet {
        VertexSet {
            ids: (0..g.vertex_count() as u32).collect(),
        }
    }

    pub(crate) fn from_sorted(ids: Vec<u32>) -> VertexSet {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet { ids }
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.ids.iter().copied()
    }
}

/// An induced subgraph together with the vertex maps to and from its parent.
#[derive(Debug, Clone)]
pub struct SubgraphMap {
    pub sub: Graph,
    to_parent: Vec<u32>,
    from_parent: HashMap<u32, u32>,
}

impl SubgraphMap {
    pub fn to_parent(&self, sub_id: u32) -> u32 {
        self.to_parent[sub_id as usize]
    }

    pub fn from_parent(&self, parent_id: u32) -> Option<u32> {
        self.from_parent.get(&parent_id).copied()
    }

    pub fn parent_ids(&self) -> &[u32] {
        &self.to_parent
    }
}

/// Builds the subgraph of `g` induced by `c`. The order of `c` defines the
/// sub ids `0..|c|`; every sub-edge corresponds to a parent edge of equal
/// weight.
pub fn induced_subgraph(g: &Graph, c: &VertexSet) -> Result<SubgraphMap> {
    if c.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let to_parent: Vec<u32> = c.ids().to_vec();
    let mut from_parent = HashMap::with_capacity(to_parent.len());
    for (sub_id, &parent) in to_parent.iter().enumerate() {
        if parent as usize >= g.vertex_count() {
            return Err(Error::VertexOutOfRange {
                id: parent,
                n: g.vertex_count(),
            });
        }
        from_parent.insert(parent, sub_id as u32);
    }
    let mut edges = Vec::new();
    for (sub_u, &u) in to_parent.iter().enumerate() {
        if g.self_loop(u) > 0.0 {
            edges.push((sub_u as u32, sub_u as u32, g.self_loop(u)));
        }
        for (v, w) in g.neighbors(u) {
            if v > u {
                if let Some(&sub_v) = from_parent.get(&v) {
                    edges.push((sub_u as u32, sub_v, w));
                }
            }
        }
    }
    let sub = Graph::from_edges(to_parent.len(), &edges)?;
    Ok(SubgraphMap {
        sub,
        to_parent,
        from_parent,
    })
}

/// Splits `V(g)` into maximal connected sets, each sorted ascending, the
/// list ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut members = vec![start];
        seen[start as usize] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for (u, _) in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    members.push(u);
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        components.push(VertexSet::from_sorted(members));
    }
    components
}

/// Restriction of `connected_components` to the subgraph induced by `c`,
/// with results expressed in parent ids.
pub fn connected_components_within(g: &Graph, c: &VertexSet) -> Result<Vec<VertexSet>> {
    let sub = induced_subgraph(g, c)?;
    Ok(connected_components(&sub.sub)
        .into_iter()
        .map(|comp| {
            let mut ids: Vec<u32> = comp.iter().map(|s| sub.to_parent(s)).collect();
            ids.sort_unstable();
            VertexSet::from_sorted(ids)
        })
        .collect())
}

/// Consolidates each community of `p` into a single supernode. Intra-community
/// edge weight accumulates into supernode self-loops (contributing `2w` to the
/// supernode degree); inter-community weight accumulates onto the edge between
/// the corresponding supernodes. `total_weight_2m` is preserved.
pub fn aggregate(g: &Graph, p: &Partition) -> Result<Graph> {
    if p.len() != g.vertex_count() {
        return Err(Error::PartitionSizeMismatch {
            expected: g.vertex_count(),
            got: p.len(),
        });
    }
    let k = p.community_count();
    let mut loops = vec![0.0f64; k];
    let mut inter: HashMap<(u32, u32), f64> = HashMap::new();
    for v in 0..g.vertex_count() as u32 {
        loops[p.community_of(v) as usize] += g.self_loop(v);
    }
    for u in 0..g.vertex_count() as u32 {
        let cu = p.community_of(u);
        for (v, w) in g.neighbors(u) {
            if v <= u {
                continue;
            }
            let cv = p.community_of(v);
            if cu == cv {
                loops[cu as usize] += w;
            } else {
                *inter.entry((cu.min(cv), cu.max(cv))).or_insert(0.0) += w;
            }
        }
    }
    let mut edges: Vec<(u32, u32, f64)> = inter.into_iter().map(|((a, b), w)| (a, b, w)).collect();
    for (c, &w) in loops.iter().enumerate() {
        if w > 0.0 {
            edges.push((c as u32, c as u32, w));
        }
    }
    Graph::from_edges(k, &edges)
}
