use crate::graph::{VertexId, WeightedGraph};

use super::PExponent;

/// The unknowns of a Dirichlet problem and their couplings.
///
/// Slots `0..m` are the free vertices; slots `m..` hold fixed neighbor values.
/// Edges from a free vertex to vertices that carry no value are dropped, which
/// is how subdomain (Neumann) truncations are expressed.
#[derive(Debug, Clone)]
pub(crate) struct FreeSystem {
    pub free: Vec<VertexId>,
    pub fixed_ids: Vec<VertexId>,
    pub offsets: Vec<usize>,
    pub cols: Vec<u32>,
    pub w: Vec<f64>,
    pub mu: Vec<f64>,
}

const DROPPED: u32 = u32::MAX - 1;

pub(crate) enum BuildError {
    /// A free component with no valued neighbor; carries one of its vertices.
    Isolated(VertexId),
    NonFinite(VertexId, f64),
}

impl FreeSystem {
    /// `free` must be sorted. `value` is queried for every non-free neighbor
    /// of a free vertex and returns `None` for vertices outside the domain.
    pub fn build(
        g: &WeightedGraph,
        free: Vec<VertexId>,
        is_free: &[bool],
        mut value: impl FnMut(VertexId) -> Option<f64>,
    ) -> Result<(Self, Vec<f64>), BuildError> {
        let m = free.len();
        let mut slot = vec![u32::MAX; g.vertex_count()];
        for (i, &x) in free.iter().enumerate() {
            slot[x] = i as u32;
        }
        let mut offsets = Vec::with_capacity(m + 1);
        let mut cols = Vec::with_capacity(m * 6);
        let mut w = Vec::with_capacity(m * 6);
        let mut fixed_ids = Vec::new();
        let mut fixed_vals = Vec::new();
        offsets.push(0);
        for &x in &free {
            let (targets, weights) = g.raw_neighbors(x);
            for (&y, &wy) in targets.iter().zip(weights) {
                let y = y as usize;
                if slot[y] == u32::MAX {
                    if is_free[y] {
                        unreachable!("free mask and free list disagree");
                    }
                    match value(y) {
                        Some(v) => {
                            if !v.is_finite() {
                                return Err(BuildError::NonFinite(y, v));
                            }
                            slot[y] = (m + fixed_ids.len()) as u32;
                            fixed_ids.push(y);
                            fixed_vals.push(v);
                        }
                        None => {
                            // outside the domain: the edge does not count
                            slot[y] = DROPPED;
                            continue;
                        }
                    }
                } else if slot[y] == DROPPED {
                    continue;
                }
                cols.push(slot[y]);
                w.push(wy);
            }
            offsets.push(cols.len());
        }
        let mu = free.iter().map(|&x| g.measure(x)).collect();
        let sys = FreeSystem {
            free,
            fixed_ids,
            offsets,
            cols,
            w,
            mu,
        };
        sys.check_components()?;
        let mut vals = vec![0.0; m];
        vals.extend(fixed_vals);
        Ok((sys, vals))
    }

    pub fn m(&self) -> usize {
        self.free.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.w[r])
    }

    fn check_components(&self) -> Result<(), BuildError> {
        let m = self.m();
        let mut seen = vec![false; m];
        let mut stack = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut anchored = false;
            while let Some(i) = stack.pop() {
                for &c in self.row(i).0 {
                    let c = c as usize;
                    if c >= m {
                        anchored = true;
                    } else if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
            if !anchored {
                return Err(BuildError::Isolated(self.free[start]));
            }
        }
        Ok(())
    }

    /// Energy `sum_e w_e |grad|^p` over edges with at least one free endpoint.
    pub fn energy(&self, vals: &[f64], p: &PExponent) -> f64 {
        let m = self.m();
        let mut total = 0.0;
        for i in 0..m {
            let (cols, w) = self.row(i);
            let vi = vals[i];
            for (&c, &wc) in cols.iter().zip(w) {
                let c = c as usize;
                if c < m {
                    if c > i {
                        total += wc * p.abs_pow(vals[c] - vi);
                    }
                } else {
                    total += wc * p.abs_pow(vals[c] - vi);
                }
            }
        }
        total
    }

    /// `sum_y w phi(u_y - u_x)` at free slot `i`, i.e. `mu(x) * Delta_p u(x)`.
    #[inline]
    pub fn flux(&self, vals: &[f64], i: usize, p: &PExponent) -> f64 {
        let (cols, w) = self.row(i);
        let vi = vals[i];
        cols.iter()
            .zip(w)
            .map(|(&c, &wc)| wc * p.phi(vals[c as usize] - vi))
            .sum()
    }

    /// `max_x |Delta_p u(x)|` over the free vertices.
    pub fn max_residual(&self, vals: &[f64], p: &PExponent) -> f64 {
        (0..self.m())
            .map(|i| (self.flux(vals, i, p) / self.mu[i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn fixed_range(&self, vals: &[f64]) -> (f64, f64) {
        vals[self.m()..]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Greedy coloring of the free-free coupling graph in id order.
    pub fn coloring(&self) -> Vec<Vec<usize>> {
        let m = self.m();
        let mut color = vec![usize::MAX; m];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut used = Vec::new();
        for i in 0..m {
            used.clear();
            for &c in self.row(i).0 {
                let c = c as usize;
                if c < m && color[c] != usize::MAX {
                    used.push(color[c]);
                }
            }
            let k = (0..).find(|k| !used.contains(k)).unwrap();
            color[i] = k;
            if k == classes.len() {
                classes.push(Vec::new());
            }
            classes[k].push(i);
        }
        classes
    }
}
