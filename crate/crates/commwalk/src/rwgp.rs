//! Random-walk graph partitioning: recursive two-way splitting of a cluster
//! by walk-signature sign, with an optional modularity-gain refinement sweep
//! between the split and the acceptance test.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{GAIN_SLACK, REFINE_SWEEP_CAP, SIGN_EPS};
use crate::error::{Error, Result};
use crate::graph::{connected_components, induced_subgraph, Graph, SubgraphMap, VertexSet};
use crate::quality::{community_modularity, modularity_gain};
use crate::walk::walk_signature_lazy;

/// Which splitting algorithm to run: `Plain` accepts the signature split as
/// is, `Refined` adds modularity-gain sweeps over the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwgpVariant {
    Plain,
    Refined,
}

/// How the walk source vertex is chosen inside each cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartVertex {
    /// Maximum-degree vertex of the induced subgraph, ties by smallest id.
    MaxDegree,
    /// Uniform choice from a stream seeded by the config seed and the
    /// cluster contents, so concurrent recursion stays reproducible.
    SeededRandom,
}

#[derive(Debug, Clone)]
pub struct RwgpConfig {
    /// Walk length per split.
    pub t: usize,
    pub variant: RwgpVariant,
    /// Laziness of the walk; 0 is the plain walk.
    pub alpha: f64,
    pub seed: u64,
    pub start: StartVertex,
}

impl Default for RwgpConfig {
    fn default() -> Self {
        RwgpConfig {
            t: crate::constants::DEFAULT_WALK_STEPS,
            variant: RwgpVariant::Refined,
            alpha: 0.0,
            seed: 0,
            start: StartVertex::MaxDegree,
        }
    }
}

impl RwgpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidConfig("rwgp requires t >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "laziness alpha must be in [0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Splits sub-local signature values into the nonnegative side and the
/// negative side, mapped back to parent ids. Entries within `SIGN_EPS` of
/// zero count as nonnegative.
pub(crate) fn split_by_sign(sub: &SubgraphMap, values: &[f64]) -> (VertexSet, VertexSet) {
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (j, &x) in values.iter().enumerate() {
        if x >= -SIGN_EPS {
            c1.push(sub.to_parent(j as u32));
        } else {
            c2.push(sub.to_parent(j as u32));
        }
    }
    (VertexSet::from_sorted(c1), VertexSet::from_sorted(c2))
}

/// Bisects the cluster underlying `sub` by the signs of
/// `P^t_{i0·} − φ` computed on the induced subgraph. `i0` is a sub-local
/// vertex id; the returned sets hold parent ids.
pub fn bisect_by_walk(sub: &SubgraphMap, i0: u32, t: usize) -> Result<(VertexSet, VertexSet)> {
    bisect_by_walk_lazy(sub, i0, t, 0.0)
}

pub fn bisect_by_walk_lazy(
    sub: &SubgraphMap,
    i0: u32,
    t: usize,
    alpha: f64,
) -> Result<(VertexSet, VertexSet)> {
    let sig = walk_signature_lazy(&sub.sub, i0, t, alpha)?;
    Ok(split_by_sign(sub, &sig.values))
}

/// Repeated full sweeps over `c1 ∪ c2` in ascending vertex id order, moving
/// a vertex to the other side whenever the move gain strictly exceeds the
/// stay gain (both per the incremental modularity formula, normalized by the
/// full graph). Stops when a sweep moves nothing or the sweep cap is hit.
/// One side may end up empty.
pub fn refine_two_way(
    g: &Graph,
    c1: &VertexSet,
    c2: &VertexSet,
) -> Result<(VertexSet, VertexSet)> {
    let n = g.vertex_count();
    let mut side: std::collections::HashMap<u32, usize> =
        std::collections::HashMap::with_capacity(c1.len() + c2.len());
    for v in c1.iter() {
        if v as usize >= n {
            return Err(Error::VertexOutOfRange { id: v, n });
        }
        side.insert(v, 0);
    }
    for v in c2.iter() {
        if v as usize >= n {
            return Err(Error::VertexOutOfRange { id: v, n });
        }
        if side.insert(v, 1).is_some() {
            return Err(Error::DuplicateVertex(v));
        }
    }
    let mut vertices: Vec<u32> = side.keys().copied().collect();
    vertices.sort_unstable();

    let two_m = g.total_weight_2m();
    let mut sigma_in = [0.0f64; 2];
    let mut sigma_tot = [0.0f64; 2];
    for &v in &vertices {
        let s = side[&v];
        sigma_tot[s] += g.degree(v);
        sigma_in[s] += 2.0 * g.self_loop(v);
        for (u, w) in g.neighbors(v) {
            if side.get(&u) == Some(&s) {
                sigma_in[s] += w;
            }
        }
    }

    for _ in 0..REFINE_SWEEP_CAP {
        let mut moved = 0usize;
        for &v in &vertices {
            let own = side[&v];
            let other = 1 - own;
            let mut k = [0.0f64; 2];
            for (u, w) in g.neighbors(v) {
                if let Some(&s) = side.get(&u) {
                    k[s] += w;
                }
            }
            let d = g.degree(v);
            let loop_w = g.self_loop(v);
            sigma_in[own] -= 2.0 * k[own] + 2.0 * loop_w;
            sigma_tot[own] -= d;
            let gain_stay = modularity_gain(two_m, sigma_in[own], sigma_tot[own], d, k[own]);
            let gain_move = modularity_gain(two_m, sigma_in[other], sigma_tot[other], d, k[other]);
            let dest = if gain_stay < gain_move { other } else { own };
            sigma_in[dest] += 2.0 * k[dest] + 2.0 * loop_w;
            sigma_tot[dest] += d;
            if dest != own {
                side.insert(v, dest);
                moved += 1;
            }
        }
        if moved == 0 {
            break;
        }
    }

    let mut out = [Vec::new(), Vec::new()];
    for &v in &vertices {
        out[side[&v]].push(v);
    }
    let [a, b] = out;
    Ok((VertexSet::from_sorted(a), VertexSet::from_sorted(b)))
}

fn choose_start(sub: &SubgraphMap, cfg: &RwgpConfig) -> u32 {
    let n = sub.sub.vertex_count() as u32;
    match cfg.start {
        StartVertex::MaxDegree => {
            let mut best = 0u32;
            for j in 1..n {
                if sub.sub.degree(j) > sub.sub.degree(best) {
                    best = j;
                }
            }
            best
        }
        StartVertex::SeededRandom => {
            let mut h = 0xcbf29ce484222325u64;
            for &v in sub.parent_ids() {
                h ^= v as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ h);
            rng.gen_range(0..n)
        }
    }
}

/// Shared recursion for the sign-based partitioners: disconnected clusters
/// are always split into their components first; a candidate bisection is
/// accepted only when both halves are nonempty and
/// `Q(C1,G) + Q(C2,G) > Q(C,G)` with slack.
pub(crate) fn recursive_bisection<F>(g: &Graph, c: &VertexSet, bisect: &F) -> Result<Vec<VertexSet>>
where
    F: Fn(&Graph, &SubgraphMap) -> Result<(VertexSet, VertexSet)> + Sync,
{
    if c.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    if c.len() == 1 {
        return Ok(vec![c.clone()]);
    }
    let sub = induced_subgraph(g, c)?;
    let comps = connected_components(&sub.sub);
    if comps.len() > 1 {
        let mut out = Vec::new();
        for comp in comps {
            let mut parents: Vec<u32> = comp.iter().map(|j| sub.to_parent(j)).collect();
            parents.sort_unstable();
            out.extend(recursive_bisection(g, &VertexSet::from_sorted(parents), bisect)?);
        }
        return Ok(out);
    }

    let (c1, c2) = bisect(g, &sub)?;
    if !c1.is_empty() && !c2.is_empty() {
        let q_split = community_modularity(g, &c1)? + community_modularity(g, &c2)?;
        let q_whole = community_modularity(g, c)?;
        if q_split > q_whole + GAIN_SLACK {
            let (left, right) = if c.len() >= 256 {
                rayon::join(
                    || recursive_bisection(g, &c1, bisect),
                    || recursive_bisection(g, &c2, bisect),
                )
            } else {
                (
                    recursive_bisection(g, &c1, bisect),
                    recursive_bisection(g, &c2, bisect),
                )
            };
            let mut out = left?;
            out.extend(right?);
            return Ok(out);
        }
    }
    Ok(vec![c.clone()])
}

/// Recursively partitions the cluster `c` of `g` by walk-signature sign
/// bisection. Each accepted split strictly increases the summed
/// per-community modularity, so the result never scores below `Q(c, G)`.
pub fn rwgp_partition(g: &Graph, c: &VertexSet, cfg: &RwgpConfig) -> Result<Vec<VertexSet>> {
    cfg.validate()?;
    if g.has_self_loops() {
        return Err(Error::SelfLoopsPresent);
    }
    recursive_bisection(g, c, &|g: &Graph, sub: &SubgraphMap| {
        let i0 = choose_start(sub, cfg);
        let (c1, c2) = bisect_by_walk_lazy(sub, i0, cfg.t, cfg.alpha)?;
        match cfg.variant {
            RwgpVariant::Plain => Ok((c1, c2)),
            RwgpVariant::Refined => refine_two_way(g, &c1, &c2),
        }
    })
}
