//! Aggregation multigrid for the symmetric M-matrices produced by Newton
//! linearizations, used as a preconditioner for conjugate gradients.

use nalgebra::{DMatrix, DVector};

/// Symmetric sparse matrix: diagonal plus off-diagonal rows.
#[derive(Debug, Clone, Default)]
pub(crate) struct SparseSym {
    pub diag: Vec<f64>,
    pub offsets: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl SparseSym {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n() {
            let (cols, vals) = self.row(i);
            let mut s = self.diag[i] * x[i];
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c as usize];
            }
            y[i] = s;
        }
    }

    fn residual(&self, b: &[f64], x: &[f64], r: &mut [f64]) {
        for i in 0..self.n() {
            let (cols, vals) = self.row(i);
            let mut s = b[i] - self.diag[i] * x[i];
            for (&c, &v) in cols.iter().zip(vals) {
                s -= v * x[c as usize];
            }
            r[i] = s;
        }
    }

    #[inline]
    fn relax(&self, b: &[f64], x: &mut [f64], i: usize) {
        let (cols, vals) = self.row(i);
        let mut s = b[i];
        for (&c, &v) in cols.iter().zip(vals) {
            s -= v * x[c as usize];
        }
        x[i] = s / self.diag[i];
    }

    fn forward_sweep(&self, b: &[f64], x: &mut [f64]) {
        for i in 0..self.n() {
            self.relax(b, x, i);
        }
    }

    fn backward_sweep(&self, b: &[f64], x: &mut [f64]) {
        for i in (0..self.n()).rev() {
            self.relax(b, x, i);
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                a[(i, c as usize)] += v;
            }
        }
        a
    }
}

const STRENGTH: f64 = 0.08;
const COARSEST: usize = 300;
const DENSE_LIMIT: usize = 3000;

/// Greedy aggregation over strong couplings. Returns the aggregate of every
/// row and the number of aggregates.
fn aggregate(a: &SparseSym) -> (Vec<u32>, usize) {
    let n = a.n();
    const NONE: u32 = u32::MAX;
    let mut agg = vec![NONE; n];
    let strong = |i: usize, c: usize, v: f64| -> bool {
        -v >= STRENGTH * (a.diag[i] * a.diag[c]).sqrt()
    };
    let mut count = 0u32;
    for i in 0..n {
        if agg[i] != NONE {
            continue;
        }
        let (cols, vals) = a.row(i);
        let mut has_strong = false;
        let mut free = true;
        for (&c, &v) in cols.iter().zip(vals) {
            if strong(i, c as usize, v) {
                has_strong = true;
                if agg[c as usize] != NONE {
                    free = false;
                    break;
                }
            }
        }
        if has_strong && free {
            agg[i] = count;
            for (&c, &v) in cols.iter().zip(vals) {
                if strong(i, c as usize, v) {
                    agg[c as usize] = count;
                }
            }
            count += 1;
        }
    }
    let first_pass = agg.clone();
    for i in 0..n {
        if agg[i] != NONE {
            continue;
        }
        let (cols, vals) = a.row(i);
        let mut best = (0.0, NONE);
        for (&c, &v) in cols.iter().zip(vals) {
            let target = first_pass[c as usize];
            if target != NONE && strong(i, c as usize, v) && -v > best.0 {
                best = (-v, target);
            }
        }
        agg[i] = best.1;
    }
    for i in 0..n {
        if agg[i] != NONE {
            continue;
        }
        agg[i] = count;
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            if agg[c as usize] == NONE && strong(i, c as usize, v) {
                agg[c as usize] = count;
            }
        }
        count += 1;
    }
    (agg, count as usize)
}

/// Galerkin product `P^T A P` for the piecewise-constant prolongator of `agg`.
fn galerkin(a: &SparseSym, agg: &[u32], nc: usize) -> SparseSym {
    let mut members_start = vec![0usize; nc + 1];
    for &g in agg {
        members_start[g as usize + 1] += 1;
    }
    for k in 0..nc {
        members_start[k + 1] += members_start[k];
    }
    let mut fill = members_start.clone();
    let mut members = vec![0usize; agg.len()];
    for (i, &g) in agg.iter().enumerate() {
        members[fill[g as usize]] = i;
        fill[g as usize] += 1;
    }
    let mut diag = vec![0.0; nc];
    let mut offsets = Vec::with_capacity(nc + 1);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    let mut marker = vec![usize::MAX; nc];
    offsets.push(0);
    for k in 0..nc {
        let row_start = cols.len();
        for &i in &members[members_start[k]..members_start[k + 1]] {
            diag[k] += a.diag[i];
            let (rc, rv) = a.row(i);
            for (&c, &v) in rc.iter().zip(rv) {
                let kc = agg[c as usize] as usize;
                if kc == k {
                    diag[k] += v;
                } else if marker[kc] == usize::MAX || marker[kc] < row_start {
                    marker[kc] = cols.len();
                    cols.push(kc as u32);
                    vals.push(v);
                } else {
                    vals[marker[kc]] += v;
                }
            }
        }
        // deterministic column order
        let mut entries: Vec<(u32, f64)> = cols[row_start..]
            .iter()
            .copied()
            .zip(vals[row_start..].iter().copied())
            .collect();
        entries.sort_unstable_by_key(|e| e.0);
        for (slot, (c, v)) in entries.into_iter().enumerate() {
            cols[row_start + slot] = c;
            vals[row_start + slot] = v;
        }
        offsets.push(cols.len());
    }
    SparseSym {
        diag,
        offsets,
        cols,
        vals,
    }
}

enum CoarseSolver {
    Dense(nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>),
    DenseLu(nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
    Sweeps(usize),
}

struct Level {
    a: SparseSym,
    agg: Vec<u32>,
    r: Vec<f64>,
    x: Vec<f64>,
    b: Vec<f64>,
}

pub(crate) struct Hierarchy {
    levels: Vec<Level>,
    coarsest: SparseSym,
    solver: CoarseSolver,
    cx: Vec<f64>,
    cb: Vec<f64>,
}

/// Scale applied to coarse-grid corrections; plain aggregation underestimates
/// smooth error components.
const OVERCORRECT: f64 = 1.0;

impl Hierarchy {
    pub fn build(a: SparseSym) -> Hierarchy {
        let mut levels = Vec::new();
        let mut current = a;
        while current.n() > COARSEST {
            let (agg, nc) = aggregate(&current);
            if nc as f64 > 0.85 * current.n() as f64 {
                break;
            }
            let coarse = galerkin(&current, &agg, nc);
            let n = current.n();
            levels.push(Level {
                a: current,
                agg,
                r: vec![0.0; n],
                x: vec![0.0; n],
                b: vec![0.0; n],
            });
            current = coarse;
        }
        let n = current.n();
        let solver = if n <= DENSE_LIMIT {
            let dense = current.to_dense();
            match dense.clone().cholesky() {
                Some(c) => CoarseSolver::Dense(c),
                None => CoarseSolver::DenseLu(dense.lu()),
            }
        } else {
            CoarseSolver::Sweeps(20)
        };
        Hierarchy {
            levels,
            coarsest: current,
            solver,
            cx: vec![0.0; n],
            cb: vec![0.0; n],
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() + 1
    }

    fn coarse_solve(&mut self) {
        match &self.solver {
            CoarseSolver::Dense(c) => {
                let x = c.solve(&DVector::from_column_slice(&self.cb));
                self.cx.copy_from_slice(x.as_slice());
            }
            CoarseSolver::DenseLu(lu) => {
                let x = lu
                    .solve(&DVector::from_column_slice(&self.cb))
                    .unwrap_or_else(|| DVector::zeros(self.cb.len()));
                self.cx.copy_from_slice(x.as_slice());
            }
            CoarseSolver::Sweeps(k) => {
                self.cx.iter_mut().for_each(|v| *v = 0.0);
                for _ in 0..*k {
                    self.coarsest.forward_sweep(&self.cb, &mut self.cx);
                    self.coarsest.backward_sweep(&self.cb, &mut self.cx);
                }
            }
        }
    }

    /// One symmetric V-cycle for `A z = r` from a zero start.
    pub fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        if self.levels.is_empty() {
            self.cb.copy_from_slice(r);
            self.coarse_solve();
            z.copy_from_slice(&self.cx);
            return;
        }
        self.levels[0].b.copy_from_slice(r);
        let depth = self.levels.len();
        // descend
        for l in 0..depth {
            let (head, tail) = self.levels.split_at_mut(l + 1);
            let lev = &mut head[l];
            lev.x.iter_mut().for_each(|v| *v = 0.0);
            lev.a.forward_sweep(&lev.b, &mut lev.x);
            lev.a.residual(&lev.b, &lev.x, &mut lev.r);
            let target = match tail.first_mut() {
                Some(next) => &mut next.b,
                None => &mut self.cb,
            };
            target.iter_mut().for_each(|v| *v = 0.0);
            for (i, &g) in lev.agg.iter().enumerate() {
                target[g as usize] += lev.r[i];
            }
        }
        self.coarse_solve();
        // ascend
        for l in (0..depth).rev() {
            let (head, tail) = self.levels.split_at_mut(l + 1);
            let lev = &mut head[l];
            let correction = match tail.first() {
                Some(next) => &next.x,
                None => &self.cx,
            };
            for (i, &g) in lev.agg.iter().enumerate() {
                lev.x[i] += OVERCORRECT * correction[g as usize];
            }
            lev.a.backward_sweep(&lev.b, &mut lev.x);
        }
        z.copy_from_slice(&self.levels[0].x);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) struct PcgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Preconditioned CG for `A x = b` from `x = 0`, stopping at
/// `|r| <= rtol |b|`.
pub(crate) fn pcg(
    a: &SparseSym,
    m: &mut Hierarchy,
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
) -> PcgReport {
    let n = a.n();
    x.iter_mut().for_each(|v| *v = 0.0);
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return PcgReport {
            iterations: 0,
            relative_residual: 0.0,
        };
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    let mut rel = 1.0;
    for it in 1..=max_iter {
        a.apply(&d, &mut q);
        let dq = dot(&d, &q);
        if !(dq > 0.0) {
            return PcgReport {
                iterations: it,
                relative_residual: rel,
            };
        }
        let alpha = rz / dq;
        for i in 0..n {
            x[i] += alpha * d[i];
            r[i] -= alpha * q[i];
        }
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= rtol {
            return PcgReport {
                iterations: it,
                relative_residual: rel,
            };
        }
        m.apply(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            d[i] = z[i] + beta * d[i];
        }
    }
    PcgReport {
        iterations: max_iter,
        relative_residual: rel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2D five-point Laplacian with Dirichlet rows on a k x k grid.
    fn laplacian(k: usize) -> SparseSym {
        let n = k * k;
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            let (r, c) = (i / k, i % k);
            let mut push = |j: usize| {
                cols.push(j as u32);
                vals.push(-1.0);
            };
            if r > 0 {
                push(i - k);
            }
            if c > 0 {
                push(i - 1);
            }
            if c + 1 < k {
                push(i + 1);
            }
            if r + 1 < k {
                push(i + k);
            }
            offsets.push(cols.len());
        }
        SparseSym {
            diag: vec![4.0; n],
            offsets,
            cols,
            vals,
        }
    }

    #[test]
    fn galerkin_preserves_row_sums() {
        let a = laplacian(20);
        let (agg, nc) = aggregate(&a);
        assert!(nc < a.n() / 3);
        let c = galerkin(&a, &agg, nc);
        let fine_total: f64 = (0..a.n())
            .map(|i| a.diag[i] + a.row(i).1.iter().sum::<f64>())
            .sum();
        let coarse_total: f64 = (0..nc)
            .map(|i| c.diag[i] + c.row(i).1.iter().sum::<f64>())
            .sum();
        assert!((fine_total - coarse_total).abs() < 1e-9);
    }

    #[test]
    fn pcg_solves_poisson() {
        let a = laplacian(120);
        let n = a.n();
        let b: Vec<f64> = (0..n).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let mut h = Hierarchy::build(a.clone());
        assert!(h.depth() >= 3);
        let mut x = vec![0.0; n];
        let report = pcg(&a, &mut h, &b, &mut x, 1e-10, 200);
        assert!(report.relative_residual <= 1e-10);
        assert!(report.iterations < 60, "{} iterations", report.iterations);
        let mut ax = vec![0.0; n];
        a.apply(&x, &mut ax);
        let err: f64 = ax.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7);
    }
}
