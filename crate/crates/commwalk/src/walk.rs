//! t-step random-walk row distributions, the stationary distribution, and
//! the signature vector `P^t_{i0·} − φ` whose signs drive bisection.
//!
//! Rows of `P^t` are computed by `t` successive sparse vector-matrix
//! products, never materializing `P^t`, so one row costs `O(t·m)`.

use crate::constants::{ROW_SUM_TOL, SIGNATURE_SUM_TOL};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// The vector `P^t_{i0·} − φ` on some connected loop-free graph. Entries
/// sum to zero (within tolerance) and their signs split the vertex set.
#[derive(Debug, Clone)]
pub struct WalkSignature {
    pub source: u32,
    pub t: usize,
    pub values: Vec<f64>,
}

fn check_walk_graph(g: &Graph) -> Result<()> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.has_self_loops() {
        return Err(Error::SelfLoopsPresent);
    }
    for v in 0..g.vertex_count() as u32 {
        if g.degree(v) <= 0.0 {
            return Err(Error::IsolatedVertex(v));
        }
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn check_source(g: &Graph, i0: u32) -> Result<()> {
    if i0 as usize >= g.vertex_count() {
        return Err(Error::VertexOutOfRange {
            id: i0,
            n: g.vertex_count(),
        });
    }
    Ok(())
}

/// Row `i0` of `P^t` where `P_ij = w(i,j)/d(i)`.
pub fn transition_row_power(g: &Graph, i0: u32, t: usize) -> Result<Vec<f64>> {
    transition_row_power_lazy(g, i0, t, 0.0)
}

/// Row `i0` of the lazy walk `(αI + (1−α)P)^t`. The laziness `α ∈ [0, 1)`
/// guarantees convergence on bipartite graphs; `α = 0` is the plain walk.
pub fn transition_row_power_lazy(g: &Graph, i0: u32, t: usize, alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "laziness alpha must be in [0, 1), got {alpha}"
        )));
    }
    check_walk_graph(g)?;
    check_source(g, i0)?;

    let n = g.vertex_count();
    let mut row = vec![0.0f64; n];
    row[i0 as usize] = 1.0;
    let mut next = vec![0.0f64; n];
    for _ in 0..t {
        if alpha > 0.0 {
            for j in 0..n {
                next[j] = alpha * row[j];
            }
        } else {
            next.iter_mut().for_each(|x| *x = 0.0);
        }
        let spread = 1.0 - alpha;
        for (i, &mass) in row.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let scale = spread * mass / g.degree(i as u32);
            for (j, w) in g.neighbors(i as u32) {
                next[j as usize] += scale * w;
            }
        }
        std::mem::swap(&mut row, &mut next);
    }
    debug_assert!((row.iter().sum::<f64>() - 1.0).abs() <= ROW_SUM_TOL);
    Ok(row)
}

/// Stationary distribution `φ_i = d(i)/Σ_k d(k)` of the walk on a connected
/// loop-free graph. Unchanged by laziness.
pub fn stationary_distribution(g: &Graph) -> Result<Vec<f64>> {
    check_walk_graph(g)?;
    let total = g.total_weight_2m();
    Ok((0..g.vertex_count() as u32)
        .map(|v| g.degree(v) / total)
        .collect())
}

/// `P^t_{i0·} − φ`, the signature used to split a cluster by sign.
pub fn walk_signature(g: &Graph, i0: u32, t: usize) -> Result<WalkSignature> {
    walk_signature_lazy(g, i0, t, 0.0)
}

pub fn walk_signature_lazy(g: &Graph, i0: u32, t: usize, alpha: f64) -> Result<WalkSignature> {
    if t == 0 {
        return Err(Error::InvalidConfig(
            "walk signature requires t >= 1".into(),
        ));
    }
    let row = transition_row_power_lazy(g, i0, t, alpha)?;
    let phi = stationary_distribution(g)?;
    let values: Vec<f64> = row.iter().zip(phi.iter()).map(|(r, p)| r - p).collect();
    debug_assert!(values.iter().sum::<f64>().abs() <= SIGNATURE_SUM_TOL);
    Ok(WalkSignature {
        source: i0,
        t,
        values,
    })
}
