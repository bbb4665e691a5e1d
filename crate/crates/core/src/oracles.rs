//! Independent reference computations: a linear solver for `p = 2`, a brute
//! force convex minimizer for tiny condensers and a Monte Carlo estimate of
//! escape probabilities of the random walk.
//!
//! None of this shares code with the main solver.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::Condenser;
use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::lattice::GraphWindow;

/// Systems up to this size are solved by dense LU.
pub const DENSE_ORACLE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Serialize)]
pub struct LinearOracle {
    /// Solution on the whole graph, boundary data on the vertex boundary,
    /// `NaN` elsewhere.
    pub values: Vec<f64>,
    pub method: &'static str,
    /// `max |sum_y mu_xy (u(y) - u(x))| / mu(x)` over the domain.
    pub residual: f64,
}

/// Harmonic extension of `boundary` into `omega` (`p = 2`).
pub fn linear_dirichlet_p2(
    g: &WeightedGraph,
    omega: &VertexSet,
    boundary: impl Fn(VertexId) -> f64,
) -> Result<LinearOracle> {
    omega.check_graph(g)?;
    let n = g.vertex_count();
    let m = omega.len();
    let mut index = vec![usize::MAX; n];
    for (i, x) in omega.iter().enumerate() {
        index[x] = i;
    }
    // every component needs an exit
    let mut seen = vec![false; m];
    for start in 0..m {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut exits = false;
        while let Some(i) = stack.pop() {
            for (y, _) in g.neighbors(omega.ids()[i]) {
                match index[y] {
                    usize::MAX => exits = true,
                    j if !seen[j] => {
                        seen[j] = true;
                        stack.push(j);
                    }
                    _ => {}
                }
            }
        }
        if !exits {
            return Err(Error::EmptyBoundary(omega.ids()[start]));
        }
    }
    let mut values = vec![f64::NAN; n];
    let mut rhs = vec![0.0; m];
    for (i, x) in omega.iter().enumerate() {
        for (y, w) in g.neighbors(x) {
            if index[y] == usize::MAX {
                let v = boundary(y);
                if !v.is_finite() {
                    return Err(Error::NonFinite { vertex: y, value: v });
                }
                values[y] = v;
                rhs[i] += w * v;
            }
        }
    }
    let (solution, method) = if m <= DENSE_ORACLE_LIMIT {
        let mut a = DMatrix::<f64>::zeros(m, m);
        for (i, x) in omega.iter().enumerate() {
            a[(i, i)] = g.measure(x);
            for (y, w) in g.neighbors(x) {
                if index[y] != usize::MAX {
                    a[(i, index[y])] -= w;
                }
            }
        }
        let sol = a
            .lu()
            .solve(&DVector::from_vec(rhs.clone()))
            .ok_or_else(|| Error::Config("singular linear oracle system".into()))?;
        (sol.as_slice().to_vec(), "dense_lu")
    } else {
        (jacobi_cg(g, omega, &index, &rhs), "jacobi_cg")
    };
    for (i, x) in omega.iter().enumerate() {
        values[x] = solution[i];
    }
    let residual = omega
        .iter()
        .map(|x| {
            let s: f64 = g.neighbors(x).map(|(y, w)| w * (values[y] - values[x])).sum();
            (s / g.measure(x)).abs()
        })
        .fold(0.0, f64::max);
    Ok(LinearOracle {
        values,
        method,
        residual,
    })
}

fn jacobi_cg(g: &WeightedGraph, omega: &VertexSet, index: &[usize], b: &[f64]) -> Vec<f64> {
    let m = b.len();
    let ids = omega.ids();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            let v = ids[i];
            let mut s = g.measure(v) * x[i];
            for (y, w) in g.neighbors(v) {
                if index[y] != usize::MAX {
                    s -= w * x[index[y]];
                }
            }
            out[i] = s;
        }
    };
    let inv_diag: Vec<f64> = ids.iter().map(|&v| 1.0 / g.measure(v)).collect();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; m];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut d = z.clone();
    let mut q = vec![0.0; m];
    let mut rz = dot(&r, &z);
    let target = 1e-15 * dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..100 * m.max(100) {
        apply(&d, &mut q);
        let alpha = rz / dot(&d, &q);
        for i in 0..m {
            x[i] += alpha * d[i];
            r[i] -= alpha * q[i];
        }
        if dot(&r, &r).sqrt() <= target {
            break;
        }
        for i in 0..m {
            z[i] = r[i] * inv_diag[i];
        }
        let next = dot(&r, &z);
        let beta = next / rz;
        rz = next;
        for i in 0..m {
            d[i] = z[i] + beta * d[i];
        }
    }
    x
}

/// Largest free set the brute force oracle accepts.
pub const BRUTEFORCE_MAX_FREE: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct BruteForceResult {
    /// Smallest energy found over all starts.
    pub value: f64,
    /// Largest minus smallest final energy over the starts.
    pub spread: f64,
    pub starts: usize,
    pub seed: u64,
}

/// Minimizes the condenser energy by coordinate descent with golden-section
/// line searches, from the mean start and five random starts.
pub fn bruteforce_condenser(g: &WeightedGraph, c: &Condenser, seed: u64) -> Result<BruteForceResult> {
    c.source.check_graph(g)?;
    c.sink.check_graph(g)?;
    if c.source.is_empty() || c.sink.is_empty() || !c.source.is_disjoint(&c.sink) {
        return Err(Error::InvalidCondenser("plates must be nonempty and disjoint".into()));
    }
    let n = g.vertex_count();
    let in_domain = c.domain.as_ref().map(|d| d.mask(n)).unwrap_or_else(|| vec![true; n]);
    let mut value = vec![f64::NAN; n];
    for x in c.source.iter() {
        value[x] = 1.0;
    }
    for x in c.sink.iter() {
        value[x] = 0.0;
    }
    let free: Vec<VertexId> = (0..n)
        .filter(|&x| in_domain[x] && value[x].is_nan())
        .collect();
    if free.len() > BRUTEFORCE_MAX_FREE {
        return Err(Error::TooManyFreeVertices {
            max: BRUTEFORCE_MAX_FREE,
            got: free.len(),
        });
    }
    let p = c.p.value();
    let edges: Vec<(VertexId, VertexId, f64)> = g
        .edges()
        .filter(|&(x, y, _)| in_domain[x] && in_domain[y])
        .collect();
    let energy = |u: &[f64]| -> f64 {
        edges
            .iter()
            .map(|&(x, y, w)| w * (u[x] - u[y]).abs().powf(p))
            .sum()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut finals = Vec::new();
    for start in 0..6 {
        let mut u = value.clone();
        for &x in &free {
            u[x] = if start == 0 { 0.5 } else { rng.gen::<f64>() };
        }
        let mut current = energy(&u);
        for _ in 0..200_000 {
            for &x in &free {
                let local = |t: f64, u: &[f64]| -> f64 {
                    g.neighbors(x)
                        .filter(|&(y, _)| in_domain[y])
                        .map(|(y, w)| w * (t - u[y]).abs().powf(p))
                        .sum()
                };
                u[x] = golden_section(|t| local(t, &u), 0.0, 1.0, 1e-12);
            }
            for group in flat_groups(&edges, &free, &u) {
                let lo = group.iter().map(|&x| u[x]).fold(f64::INFINITY, f64::min);
                let hi = group.iter().map(|&x| u[x]).fold(f64::NEG_INFINITY, f64::max);
                let mut trial = u.clone();
                let shift = golden_section(
                    |s| {
                        for &x in &group {
                            trial[x] = u[x] + s;
                        }
                        energy(&trial)
                    },
                    -lo,
                    1.0 - hi,
                    1e-13,
                );
                for &x in &group {
                    trial[x] = u[x] + shift;
                }
                if energy(&trial) < energy(&u) {
                    u = trial;
                }
            }
            let next = energy(&u);
            let done = current - next <= 1e-16 * current.max(1e-300);
            current = next;
            if done {
                break;
            }
        }
        finals.push(current);
    }
    let best = finals.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = finals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BruteForceResult {
        value: best,
        spread: worst - best,
        starts: finals.len(),
        seed,
    })
}

/// Free vertices linked by edges whose values agree to `1e-7`, grouped into
/// classes of two or more.
fn flat_groups(edges: &[(VertexId, VertexId, f64)], free: &[VertexId], u: &[f64]) -> Vec<Vec<VertexId>> {
    let slot = |x: VertexId| free.iter().position(|&f| f == x);
    let mut parent: Vec<usize> = (0..free.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for &(x, y, _) in edges {
        if let (Some(a), Some(b)) = (slot(x), slot(y)) {
            if (u[x] - u[y]).abs() < 1e-7 {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: Vec<Vec<VertexId>> = vec![Vec::new(); free.len()];
    for i in 0..free.len() {
        let r = root(&mut parent, i);
        groups[r].push(free[i]);
    }
    groups.into_iter().filter(|g| g.len() > 1).collect()
}

fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeEstimate {
    #[serde(rename = "R")]
    pub radius: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

const CHUNK: usize = 1024;

/// Fraction of random walks from `x0` (steps chosen with probability
/// `mu_xy / mu(x)`) that reach distance `R` from `center` before leaving
/// `omega`, for each `R` in `radii`.
pub fn mc_escape_probability<W: GraphWindow + ?Sized>(
    window: &W,
    omega: &VertexSet,
    center: VertexId,
    x0: VertexId,
    samples: usize,
    radii: &[usize],
    seed: u64,
) -> Result<Vec<EscapeEstimate>> {
    let g = window.graph();
    omega.check_graph(g)?;
    g.check_vertex(center)?;
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("radii must be strictly increasing".into()));
    }
    let r_max = *radii.last().unwrap();
    if !window.ball_is_interior(center, r_max - 1) {
        return Err(Error::WindowTooSmall {
            center,
            radius: r_max,
        });
    }
    let dist = g.distances_from(center, Some(r_max));
    let inside = omega.mask(g.vertex_count());
    let chunks = samples.div_ceil(CHUNK);
    let counts: Vec<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let walks = CHUNK.min(samples - chunk * CHUNK);
            let mut hits = vec![0usize; radii.len()];
            for _ in 0..walks {
                let reached = walk(g, &dist, &inside, x0, r_max, &mut rng);
                for (slot, &r) in hits.iter_mut().zip(radii) {
                    if reached >= r {
                        *slot += 1;
                    }
                }
            }
            hits
        })
        .collect();
    Ok(radii
        .iter()
        .enumerate()
        .map(|(k, &radius)| {
            let hits: usize = counts.iter().map(|c| c[k]).sum();
            let est = hits as f64 / samples as f64;
            EscapeEstimate {
                radius,
                estimate: est,
                stderr: (est * (1.0 - est) / samples as f64).sqrt(),
                samples,
                seed,
            }
        })
        .collect())
}

/// Random-walk estimate of the linear capacity `C_2({x}, {d(x, .) >= R})`:
/// `mu(x)` times the probability that a walk started at `x` reaches distance
/// `R` before returning to `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointCapacityEstimate {
    #[serde(rename = "R")]
    pub radius: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub samples_per_neighbor: usize,
    pub seed: u64,
}

pub fn mc_point_capacity<W: GraphWindow + ?Sized>(
    window: &W,
    x: VertexId,
    samples_per_neighbor: usize,
    radii: &[usize],
    seed: u64,
) -> Result<Vec<PointCapacityEstimate>> {
    let g = window.graph();
    g.check_vertex(x)?;
    let omega = VertexSet::from_predicate(g, |y| y != x);
    let mut estimate = vec![0.0; radii.len()];
    let mut variance = vec![0.0; radii.len()];
    for (k, (y, w)) in g.neighbors(x).enumerate() {
        let sub_seed = seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let walks = mc_escape_probability(window, &omega, x, y, samples_per_neighbor, radii, sub_seed)?;
        for (i, e) in walks.iter().enumerate() {
            estimate[i] += w * e.estimate;
            variance[i] += (w * e.stderr).powi(2);
        }
    }
    Ok(radii
        .iter()
        .enumerate()
        .map(|(i, &radius)| PointCapacityEstimate {
            radius,
            estimate: estimate[i],
            stderr: variance[i].sqrt(),
            samples_per_neighbor,
            seed,
        })
        .collect())
}

/// Largest distance from the center reached before leaving the domain, capped
/// at `r_max`.
fn walk(
    g: &WeightedGraph,
    dist: &[u32],
    inside: &[bool],
    x0: VertexId,
    r_max: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    if !inside[x0] {
        return 0;
    }
    let mut x = x0;
    let mut best = dist[x] as usize;
    while best < r_max {
        let mut pick = rng.gen::<f64>() * g.measure(x);
        let mut next = x;
        for (y, w) in g.neighbors(x) {
            next = y;
            if pick < w {
                break;
            }
            pick -= w;
        }
        x = next;
        if !inside[x] {
            return best;
        }
        best = best.max(dist[x] as usize);
    }
    best
}
