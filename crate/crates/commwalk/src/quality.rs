//! Partition quality: modularity (global and per-community), the incremental
//! move gain used by the local optimizers, and normalized mutual information.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Assignment of every vertex to exactly one community, with community ids
/// dense in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assign: Vec<u32>,
    count: usize,
}

impl Partition {
    /// Each vertex in its own community.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            assign: (0..n as u32).collect(),
            count: n,
        }
    }

    /// Accepts a dense assignment: every id in `0..max+1` must occur.
    pub fn from_assign(assign: Vec<u32>) -> Result<Partition> {
        if assign.is_empty() {
            return Err(Error::EmptyInput);
        }
        let count = *assign.iter().max().unwrap() as usize + 1;
        let mut seen = vec![false; count];
        for &c in &assign {
            seen[c as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::SparseCommunityIds(missing as u32));
        }
        Ok(Partition { assign, count })
    }

    /// Renumbers arbitrary labels to dense community ids by first appearance.
    pub fn from_labels(labels: &[u32]) -> Partition {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut assign = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = remap.len() as u32;
            let id = *remap.entry(l).or_insert(next);
            assign.push(id);
        }
        Partition {
            assign,
            count: remap.len(),
        }
    }

    /// Builds a partition of `n` vertices from disjoint covering communities.
    pub fn from_communities(n: usize, communities: &[VertexSet]) -> Result<Partition> {
        let mut assign = vec![u32::MAX; n];
        for (c, members) in communities.iter().enumerate() {
            for v in members.iter() {
                if v as usize >= n {
                    return Err(Error::VertexOutOfRange { id: v, n });
                }
                if assign[v as usize] != u32::MAX {
                    return Err(Error::DuplicateVertex(v));
                }
                assign[v as usize] = c as u32;
            }
        }
        if assign.iter().any(|&c| c == u32::MAX) {
            return Err(Error::PartitionSizeMismatch {
                expected: n,
                got: communities.iter().map(|c| c.len()).sum(),
            });
        }
        Ok(Partition {
            assign,
            count: communities.len(),
        })
    }

    pub fn community_of(&self, v: u32) -> u32 {
        self.assign[v as usize]
    }

    pub fn assign(&self) -> &[u32] {
        &self.assign
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    /// Member lists in community-id order.
    pub fn communities(&self) -> Vec<VertexSet> {
        let mut members = vec![Vec::new(); self.count];
        for (v, &c) in self.assign.iter().enumerate() {
            members[c as usize].push(v as u32);
        }
        members.into_iter().map(VertexSet::from_sorted).collect()
    }
}

/// Per-community running sums that make move-gain evaluation `O(deg(i))`:
/// `sigma_in` is twice the intra-community edge weight (self-loops counted
/// as `2w`), `sigma_tot` the sum of member degrees.
#[derive(Debug, Clone)]
pub struct CommunityStats {
    sigma_in: Vec<f64>,
    sigma_tot: Vec<f64>,
}

impl CommunityStats {
    pub fn new(g: &Graph, p: &Partition) -> Result<CommunityStats> {
        if p.len() != g.vertex_count() {
            return Err(Error::PartitionSizeMismatch {
                expected: g.vertex_count(),
                got: p.len(),
            });
        }
        let k = p.community_count();
        let mut sigma_in = vec![0.0f64; k];
        let mut sigma_tot = vec![0.0f64; k];
        for v in 0..g.vertex_count() as u32 {
            let c = p.community_of(v) as usize;
            sigma_tot[c] += g.degree(v);
            sigma_in[c] += 2.0 * g.self_loop(v);
            for (u, w) in g.neighbors(v) {
                if p.community_of(u) as usize == c {
                    sigma_in[c] += w;
                }
            }
        }
        Ok(CommunityStats {
            sigma_in,
            sigma_tot,
        })
    }

    pub fn community_count(&self) -> usize {
        self.sigma_tot.len()
    }

    pub fn sigma_in(&self, c: u32) -> f64 {
        self.sigma_in[c as usize]
    }

    pub fn sigma_tot(&self, c: u32) -> f64 {
        self.sigma_tot[c as usize]
    }

    /// Removes vertex `i` (currently counted in `c`) given `k_i_in`, the
    /// weight from `i` to other members of `c`.
    pub fn remove(&mut self, g: &Graph, i: u32, c: u32, k_i_in: f64) {
        self.sigma_in[c as usize] -= 2.0 * k_i_in + 2.0 * g.self_loop(i);
        self.sigma_tot[c as usize] -= g.degree(i);
    }

    /// Inserts vertex `i` (currently not counted anywhere) into `c`.
    pub fn insert(&mut self, g: &Graph, i: u32, c: u32, k_i_in: f64) {
        self.sigma_in[c as usize] += 2.0 * k_i_in + 2.0 * g.self_loop(i);
        self.sigma_tot[c as usize] += g.degree(i);
    }
}

/// Raw modularity gain of placing a vertex of degree `k_i` into a community
/// with sums `(sigma_in, sigma_tot)`, where `k_i_in` is the weight from the
/// vertex into that community:
///
/// `[(Σ_in + 2k_in)/2m − ((Σ_tot + k_i)/2m)²] − [Σ_in/2m − (Σ_tot/2m)² − (k_i/2m)²]`
pub fn modularity_gain(two_m: f64, sigma_in: f64, sigma_tot: f64, k_i: f64, k_i_in: f64) -> f64 {
    let after = (sigma_in + 2.0 * k_i_in) / two_m - ((sigma_tot + k_i) / two_m).powi(2);
    let before = sigma_in / two_m - (sigma_tot / two_m).powi(2) - (k_i / two_m).powi(2);
    after - before
}

/// Modularity gain of inserting vertex `i` into community `c`. The vertex
/// must not currently be counted in `c`'s stats.
pub fn delta_q_insert(
    g: &Graph,
    stats: &CommunityStats,
    i: u32,
    c: u32,
    k_i_in: f64,
) -> Result<f64> {
    if c as usize >= stats.community_count() {
        return Err(Error::CommunityOutOfRange {
            id: c,
            count: stats.community_count(),
        });
    }
    Ok(modularity_gain(
        g.total_weight_2m(),
        stats.sigma_in(c),
        stats.sigma_tot(c),
        g.degree(i),
        k_i_in,
    ))
}

/// Modularity of a partition: `Q = Σ_C (e_C − a_C²)` with
/// `e_C = Σ_in/2m`, `a_C = Σ_tot/2m`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.total_weight_2m() <= 0.0 {
        return Err(Error::EdgelessGraph);
    }
    let stats = CommunityStats::new(g, p)?;
    let two_m = g.total_weight_2m();
    let mut q = 0.0;
    for c in 0..stats.community_count() {
        let e = stats.sigma_in[c] / two_m;
        let a = stats.sigma_tot[c] / two_m;
        q += e - a * a;
    }
    Ok(q)
}

/// Single-community modularity term `Q(C, G) = e_C − a_C²`, always
/// normalized by the full graph's `2m` so terms stay additive across any
/// partition of `V`.
pub fn community_modularity(g: &Graph, c: &VertexSet) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    if g.total_weight_2m() <= 0.0 {
        return Err(Error::EdgelessGraph);
    }
    let mut member = vec![false; g.vertex_count()];
    for v in c.iter() {
        if v as usize >= g.vertex_count() {
            return Err(Error::VertexOutOfRange {
                id: v,
                n: g.vertex_count(),
            });
        }
        member[v as usize] = true;
    }
    let mut sigma_in = 0.0;
    let mut sigma_tot = 0.0;
    for v in c.iter() {
        sigma_tot += g.degree(v);
        sigma_in += 2.0 * g.self_loop(v);
        for (u, w) in g.neighbors(v) {
            if member[u as usize] {
                sigma_in += w;
            }
        }
    }
    let two_m = g.total_weight_2m();
    Ok(sigma_in / two_m - (sigma_tot / two_m).powi(2))
}

/// Normalized mutual information `2·MI / (H(a) + H(b))` between two
/// labelings, natural log, `0·log 0 := 0`. If both labelings are
/// single-class the result is 1; if exactly one is, 0.
pub fn nmi(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pa = Partition::from_labels(a);
    let pb = Partition::from_labels(b);
    let (ka, kb) = (pa.community_count(), pb.community_count());
    let n = a.len() as f64;

    let mut table = vec![0usize; ka * kb];
    let mut row = vec![0usize; ka];
    let mut col = vec![0usize; kb];
    for (&x, &y) in pa.assign().iter().zip(pb.assign().iter()) {
        table[x as usize * kb + y as usize] += 1;
        row[x as usize] += 1;
        col[y as usize] += 1;
    }

    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&row);
    let h_b = entropy(&col);
    if h_a == 0.0 && h_b == 0.0 {
        return Ok(1.0);
    }
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(0.0);
    }

    let mut mi = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let nxy = table[x * kb + y];
            if nxy == 0 {
                continue;
            }
            let pxy = nxy as f64 / n;
            mi += pxy * (pxy / (row[x] as f64 / n * (col[y] as f64 / n))).ln();
        }
    }
    Ok((2.0 * mi / (h_a + h_b)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn barbell() -> Graph {
        Graph::from_edges(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn whole_graph_community_is_zero() {
        let g = barbell();
        let p = Partition::from_assign(vec![0; 6]).unwrap();
        assert_abs_diff_eq!(modularity(&g, &p).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn triangle_singletons() {
        let g = triangle();
        let p = Partition::singletons(3);
        // 0 − 3·(2/6)²
        assert_abs_diff_eq!(
            modularity(&g, &p).unwrap(),
            -1.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn barbell_two_triangles() {
        let g = barbell();
        let p = Partition::from_assign(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert_abs_diff_eq!(
            modularity(&g, &p).unwrap(),
            5.0 / 14.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn community_term_full_graph() {
        let g = barbell();
        let c = VertexSet::full(&g);
        assert_abs_diff_eq!(community_modularity(&g, &c).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn community_term_one_triangle() {
        let g = barbell();
        let c = VertexSet::new(vec![0, 1, 2], 6).unwrap();
        assert_abs_diff_eq!(
            community_modularity(&g, &c).unwrap(),
            5.0 / 28.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn community_term_bridge_pair() {
        let g = barbell();
        let c = VertexSet::new(vec![2, 3], 6).unwrap();
        // 2/14 − (6/14)²
        assert_abs_diff_eq!(
            community_modularity(&g, &c).unwrap(),
            2.0 / 14.0 - (6.0f64 / 14.0).powi(2),
            epsilon = 1e-15
        );
    }

    #[test]
    fn additivity_matches_global() {
        let g = barbell();
        let p = Partition::from_assign(vec![0, 0, 1, 1, 2, 2]).unwrap();
        let total: f64 = p
            .communities()
            .iter()
            .map(|c| community_modularity(&g, c).unwrap())
            .sum();
        assert_abs_diff_eq!(total, modularity(&g, &p).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn delta_q_triangle_singleton_join() {
        let g = triangle();
        let p = Partition::singletons(3);
        let mut stats = CommunityStats::new(&g, &p).unwrap();
        // Move vertex 0 into community {1}: remove it from its own singleton
        // first, then evaluate the insertion gain.
        stats.remove(&g, 0, 0, 0.0);
        let dq = delta_q_insert(&g, &stats, 0, 1, 1.0).unwrap();
        assert_abs_diff_eq!(dq, 1.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn delta_q_empty_target_is_neutral() {
        // Joining a community with no edges to i and zero sums is neutral.
        let g = Graph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let stats = CommunityStats {
            sigma_in: vec![0.0, 0.0],
            sigma_tot: vec![0.0, 2.0],
        };
        let dq = delta_q_insert(&g, &stats, 0, 0, 0.0).unwrap();
        assert_abs_diff_eq!(dq, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn delta_q_rejects_bad_community() {
        let g = triangle();
        let p = Partition::singletons(3);
        let stats = CommunityStats::new(&g, &p).unwrap();
        assert!(matches!(
            delta_q_insert(&g, &stats, 0, 7, 0.0),
            Err(Error::CommunityOutOfRange { .. })
        ));
    }

    #[test]
    fn stats_invariants() {
        let g = barbell();
        let p = Partition::from_assign(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let stats = CommunityStats::new(&g, &p).unwrap();
        assert_eq!(stats.sigma_in(0), 6.0);
        assert_eq!(stats.sigma_tot(0), 7.0);
        let total: f64 = (0..2).map(|c| stats.sigma_tot(c)).sum();
        assert_eq!(total, g.total_weight_2m());
    }

    #[test]
    fn nmi_identity() {
        let a = vec![0, 0, 1, 1, 2];
        assert_abs_diff_eq!(nmi(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nmi_relabeling_invariance() {
        let a = vec![0, 0, 1, 1];
        let b = vec![1, 1, 0, 0];
        assert_abs_diff_eq!(nmi(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nmi_independent_labelings() {
        let a = vec![0, 0, 1, 1];
        let b = vec![0, 1, 0, 1];
        assert_abs_diff_eq!(nmi(&a, &b).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nmi_single_class_conventions() {
        assert_eq!(nmi(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn nmi_errors() {
        assert!(matches!(
            nmi(&[0, 1], &[0]),
            Err(Error::LengthMismatch(2, 1))
        ));
        assert!(matches!(nmi(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn partition_from_labels_renumbers() {
        let p = Partition::from_labels(&[7, 7, 3, 9, 3]);
        assert_eq!(p.assign(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.community_count(), 3);
    }

    #[test]
    fn partition_rejects_sparse_ids() {
        assert!(matches!(
            Partition::from_assign(vec![0, 2]),
            Err(Error::SparseCommunityIds(1))
        ));
    }
}
