//! Spectral bisection baseline: the second eigenpair of the normalized
//! adjacency `L = D^{-1/2} A D^{-1/2}` via deflated power iteration, the
//! recursive sign partitioner built on it, and a dense Jacobi
//! eigendecomposition used as the exact oracle on small graphs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{
    DEGENERATE_GAP, EIGEN_CONVERGENCE_TOL, EIGEN_MAX_ITERS, EIGEN_RESIDUAL_TOL,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, SubgraphMap, VertexSet};
use crate::rwgp::{recursive_bisection, split_by_sign};

/// An eigenpair of `L`, with the eigenvector at unit norm and the first
/// nonzero component positive. `gap` is the estimated distance to the next
/// eigenvalue below.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub gap: f64,
}

impl EigenPair {
    /// True when the eigenvalue is (numerically) not separated from the one
    /// below it, in which case the eigenvector is an arbitrary member of the
    /// shared eigenspace.
    pub fn is_degenerate(&self) -> bool {
        self.gap < DEGENERATE_GAP
    }
}

fn check_spectral_input(g: &Graph) -> Result<()> {
    if g.vertex_count() < 2 {
        return Err(Error::InvalidConfig(
            "second eigenpair requires at least 2 vertices".into(),
        ));
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

/// `y = L x` without materializing `L`.
fn apply_l(g: &Graph, inv_sqrt_d: &[f64], x: &[f64], y: &mut [f64]) {
    for v in 0..g.vertex_count() {
        let mut acc = 0.0;
        for (u, w) in g.neighbors(v as u32) {
            acc += w * inv_sqrt_d[u as usize] * x[u as usize];
        }
        y[v] = acc * inv_sqrt_d[v];
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
}

/// Removes the projections onto `vs` from `x`.
fn deflate(x: &mut [f64], vs: &[&[f64]]) {
    for v in vs {
        let c = dot(x, v);
        for (xi, vi) in x.iter_mut().zip(v.iter()) {
            *xi -= c * vi;
        }
    }
}

fn canonical_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Power iteration for the dominant eigenpair of `(L + I)/2` restricted to
/// the complement of the deflated eigenvectors. The shift keeps the
/// eigenvalue ordering of `L` while making every eigenvalue nonnegative, so
/// the dominant pair after deflation is the next pair in `L`-order.
/// Projecting out the deflated vectors after each application equals the
/// usual rank-one subtraction on exact eigenvectors and also kills rounding
/// drift. Returns `(mu, vector, converged)` with `mu` an eigenvalue of `M`.
fn deflated_power(
    g: &Graph,
    inv_sqrt_d: &[f64],
    deflated: &[&[f64]],
    value_only_tol: Option<f64>,
    max_iters: usize,
) -> (f64, Vec<f64>, bool) {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    deflate(&mut x, deflated);
    normalize(&mut x);

    let mut y = vec![0.0f64; n];
    let mut mu = 0.0;
    let mut mu_prev = f64::INFINITY;
    for iter in 0..max_iters {
        apply_l(g, inv_sqrt_d, &x, &mut y);
        for j in 0..n {
            y[j] = 0.5 * (y[j] + x[j]);
        }
        deflate(&mut y, deflated);
        let ny = norm(&y);
        if ny < 1e-250 {
            // The operator annihilates the complement: eigenvalue 0.
            return (0.0, x, true);
        }
        mu = dot(&x, &y);
        let mut diff = 0.0f64;
        for j in 0..n {
            let xn = y[j] / ny;
            diff = diff.max((xn - x[j]).abs());
            x[j] = xn;
        }
        if iter % 64 == 63 {
            deflate(&mut x, deflated);
            normalize(&mut x);
        }
        match value_only_tol {
            Some(tol) => {
                if (mu - mu_prev).abs() < tol {
                    return (mu, x, true);
                }
                mu_prev = mu;
            }
            None => {
                if diff < EIGEN_CONVERGENCE_TOL {
                    return (mu, x, true);
                }
            }
        }
    }
    (mu, x, false)
}

/// The second eigenpair `(λ₂, s₂)` of `L`, found by power iteration after
/// deflating the known leading pair `λ₁ = 1`, `s₁ ∝ D^{1/2}·1`. The returned
/// `gap` estimates `λ₂ − λ₃`; callers should treat a degenerate gap as "the
/// split direction is arbitrary" rather than an error.
pub fn second_eigenpair(g: &Graph) -> Result<EigenPair> {
    check_spectral_input(g)?;
    let n = g.vertex_count();
    let inv_sqrt_d: Vec<f64> = (0..n as u32).map(|v| 1.0 / g.degree(v).sqrt()).collect();
    let total = g.total_weight_2m();
    let s1: Vec<f64> = (0..n as u32).map(|v| (g.degree(v) / total).sqrt()).collect();

    let (mu2, mut s2, converged) = deflated_power(g, &inv_sqrt_d, &[&s1], None, EIGEN_MAX_ITERS);
    let lambda2 = 2.0 * mu2 - 1.0;

    // Estimate λ₃ with a value-tolerance iteration; exact convergence of the
    // third eigenvector is not needed for a gap report.
    let gap = if n == 2 {
        f64::INFINITY
    } else {
        let (mu3, _, _) = deflated_power(
            g,
            &inv_sqrt_d,
            &[&s1, &s2],
            Some(1e-9),
            EIGEN_MAX_ITERS.min(20_000),
        );
        lambda2 - (2.0 * mu3 - 1.0)
    };

    let mut residual_vec = vec![0.0f64; n];
    apply_l(g, &inv_sqrt_d, &s2, &mut residual_vec);
    let residual = residual_vec
        .iter()
        .zip(s2.iter())
        .map(|(lv, v)| (lv - lambda2 * v).abs())
        .fold(0.0f64, f64::max);
    if !converged && residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::NoConvergence { gap });
    }
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::NoConvergence { gap });
    }

    canonical_sign(&mut s2);
    Ok(EigenPair {
        eigenvalue: lambda2,
        eigenvector: s2,
        gap,
    })
}

/// Newman-style recursive bisection: split each cluster by the signs of
/// `D^{-1/2} s₂` on its induced subgraph, accepting a split only when it
/// increases modularity, with the same connectivity pre-split as the
/// walk-based partitioner.
pub fn newman_spectral_partition(g: &Graph, c: &VertexSet) -> Result<Vec<VertexSet>> {
    if g.has_self_loops() {
        return Err(Error::SelfLoopsPresent);
    }
    recursive_bisection(g, c, &|_g: &Graph, sub: &SubgraphMap| {
        let pair = second_eigenpair(&sub.sub)?;
        let values: Vec<f64> = pair
            .eigenvector
            .iter()
            .enumerate()
            .map(|(j, s)| s / sub.sub.degree(j as u32).sqrt())
            .collect();
        Ok(split_by_sign(sub, &values))
    })
}

/// Dense normalized adjacency `L` of `g` (row-major, symmetric).
pub fn normalized_adjacency_dense(g: &Graph) -> Result<Vec<Vec<f64>>> {
    let n = g.vertex_count();
    for v in 0..n as u32 {
        if g.degree(v) <= 0.0 {
            return Err(Error::IsolatedVertex(v));
        }
    }
    let mut l = vec![vec![0.0f64; n]; n];
    for v in 0..n as u32 {
        let dv = g.degree(v).sqrt();
        if g.self_loop(v) > 0.0 {
            l[v as usize][v as usize] = 2.0 * g.self_loop(v) / (dv * dv);
        }
        for (u, w) in g.neighbors(v) {
            l[v as usize][u as usize] = w / (dv * g.degree(u).sqrt());
        }
    }
    Ok(l)
}

/// Full eigendecomposition of a small dense symmetric matrix via cyclic
/// Jacobi rotations. Returns `(eigenvalues, eigenvectors)` sorted by
/// descending eigenvalue; `eigenvectors[k]` is the unit eigenvector for
/// `eigenvalues[k]`, sign-canonicalized.
pub fn jacobi_eigh(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0f64; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r][p];
                        let arq = a[r][q];
                        a[r][p] = c * arp - s * arq;
                        a[p][r] = a[r][p];
                        a[r][q] = s * arp + c * arq;
                        a[q][r] = a[r][q];
                    }
                }
                for r in 0..n {
                    let vrp = v[r][p];
                    let vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|r| v[r][k]).collect();
            canonical_sign(&mut col);
            col
        })
        .collect();
    (eigenvalues, eigenvectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
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
    fn path_second_pair() {
        // L of the path has spectrum {1, 0, −1}; s₂ ∝ (1/√2, 0, −1/√2).
        let pair = second_eigenpair(&path3()).unwrap();
        assert_abs_diff_eq!(pair.eigenvalue, 0.0, epsilon = 1e-9);
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(pair.eigenvector[0], r, epsilon = 1e-8);
        assert_abs_diff_eq!(pair.eigenvector[1], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(pair.eigenvector[2], -r, epsilon = 1e-8);
        assert!(!pair.is_degenerate());
    }

    #[test]
    fn barbell_sign_pattern_separates_triangles() {
        let g = barbell();
        let pair = second_eigenpair(&g).unwrap();
        let v2: Vec<f64> = pair
            .eigenvector
            .iter()
            .enumerate()
            .map(|(j, s)| s / g.degree(j as u32).sqrt())
            .collect();
        let side_a = v2[0] >= 0.0;
        for j in 1..3 {
            assert_eq!(v2[j] >= 0.0, side_a);
        }
        for j in 3..6 {
            assert_eq!(v2[j] >= 0.0, !side_a);
        }
    }

    #[test]
    fn complete_graph_degenerate() {
        let mut edges = Vec::new();
        for a in 0..4u32 {
            for b in (a + 1)..4 {
                edges.push((a, b, 1.0));
            }
        }
        let g = Graph::from_edges(4, &edges).unwrap();
        let pair = second_eigenpair(&g).unwrap();
        assert_abs_diff_eq!(pair.eigenvalue, -1.0 / 3.0, epsilon = 1e-8);
        assert!(pair.is_degenerate());
    }

    #[test]
    fn eigenvector_orthogonal_to_leading() {
        let g = barbell();
        let pair = second_eigenpair(&g).unwrap();
        let total = g.total_weight_2m();
        let s1: Vec<f64> = (0..6u32).map(|v| (g.degree(v) / total).sqrt()).collect();
        assert!(dot(&pair.eigenvector, &s1).abs() <= 1e-8);
        assert_abs_diff_eq!(norm(&pair.eigenvector), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn newman_partition_barbell() {
        let g = barbell();
        let parts = newman_spectral_partition(&g, &VertexSet::full(&g)).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].ids(), &[0, 1, 2]);
        assert_eq!(parts[1].ids(), &[3, 4, 5]);
    }

    #[test]
    fn newman_partition_triangle_whole() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let parts = newman_spectral_partition(&g, &VertexSet::full(&g)).unwrap();
        assert_eq!(parts.len(), 1);
    }

    #[test]
    fn jacobi_small_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (vals, vecs) = jacobi_eigh(&m);
        assert_abs_diff_eq!(vals[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(vecs[0][0], r, epsilon = 1e-10);
        assert_abs_diff_eq!(vecs[0][1], r, epsilon = 1e-10);
    }

    #[test]
    fn jacobi_matches_path_spectrum() {
        let l = normalized_adjacency_dense(&path3()).unwrap();
        let (vals, vecs) = jacobi_eigh(&l);
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], -1.0, epsilon = 1e-12);
        // Residual check for every pair.
        for (lam, vec) in vals.iter().zip(vecs.iter()) {
            for r in 0..3 {
                let lv: f64 = (0..3).map(|c| l[r][c] * vec[c]).sum();
                assert_abs_diff_eq!(lv, lam * vec[r], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn power_iteration_matches_jacobi_on_barbell() {
        let g = barbell();
        let pair = second_eigenpair(&g).unwrap();
        let l = normalized_adjacency_dense(&g).unwrap();
        let (vals, vecs) = jacobi_eigh(&l);
        assert_abs_diff_eq!(pair.eigenvalue, vals[1], epsilon = 1e-8);
        for j in 0..6 {
            assert_abs_diff_eq!(pair.eigenvector[j], vecs[1][j], epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_disconnected_and_tiny() {
        let g = Graph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(second_eigenpair(&g), Err(Error::Disconnected)));
        let g1 = Graph::from_edges(1, &[]).unwrap();
        assert!(second_eigenpair(&g1).is_err());
    }
}
