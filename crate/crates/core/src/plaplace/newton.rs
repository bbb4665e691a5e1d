use std::collections::VecDeque;

use super::amg::{pcg, Hierarchy, SparseSym};
use super::gauss_seidel::local_solve;
use super::{EngineOutcome, FreeSystem, PExponent, SolverOptions};

const DEFAULT_MAX_ITER: usize = 100;
const PCG_MAX_ITER: usize = 400;
/// Accepted steps in a row that fail to halve the residual before the
/// iteration is treated as stalled.
const SLOW_RUN: usize = 5;
const MAX_POLISHES: usize = 4;
const POLISH_BUDGET: usize = 20;

fn trace_enabled() -> bool {
    std::env::var_os("PHARMONIC_TRACE").is_some()
}

/// Hessian of `E/p` at `vals` restricted to the free slots, with the
/// curvature floored at `floor`.
fn hessian(sys: &FreeSystem, vals: &[f64], p: &PExponent, floor: f64) -> SparseSym {
    let m = sys.m();
    let scale = p.value() - 1.0;
    let mut diag = vec![0.0; m];
    let mut offsets = Vec::with_capacity(m + 1);
    let mut cols = Vec::with_capacity(sys.cols.len());
    let mut out = Vec::with_capacity(sys.cols.len());
    offsets.push(0);
    for i in 0..m {
        let (row_cols, w) = sys.row(i);
        let vi = vals[i];
        let mut d = 0.0;
        for (&c, &wc) in row_cols.iter().zip(w) {
            let k = scale * wc * p.curvature(vals[c as usize] - vi, floor);
            d += k;
            if (c as usize) < m {
                cols.push(c);
                out.push(-k);
            }
        }
        diag[i] = d;
        offsets.push(cols.len());
    }
    SparseSym {
        diag,
        offsets,
        cols,
        vals: out,
    }
}

/// Fluxes `sum_c w phi(v_c - v_i)`, i.e. minus the gradient of `E/p`, and the
/// scaled residual `max |flux_i| / mu_i`.
fn fluxes(sys: &FreeSystem, vals: &[f64], p: &PExponent, out: &mut [f64]) -> f64 {
    let mut res: f64 = 0.0;
    for (i, slot) in out.iter_mut().enumerate() {
        let f = sys.flux(vals, i, p);
        *slot = f;
        res = res.max((f / sys.mu[i]).abs());
    }
    res
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Derivative of `alpha -> E(vals + alpha step)/p`; leaves the trial point in
/// `trial`.
fn directional(
    sys: &FreeSystem,
    vals: &[f64],
    step: &[f64],
    alpha: f64,
    p: &PExponent,
    trial: &mut [f64],
    flux: &mut [f64],
) -> f64 {
    let m = sys.m();
    for i in 0..m {
        trial[i] = vals[i] + alpha * step[i];
    }
    fluxes(sys, trial, p, flux);
    -dot(flux, step)
}

/// Approximate minimizer of the convex function `alpha -> E(vals + alpha step)`
/// on `(0, 1]`, found by a safeguarded secant search on its derivative.
/// Returns with the chosen point in `trial`.
fn line_search(
    sys: &FreeSystem,
    vals: &[f64],
    step: &[f64],
    slope: f64,
    p: &PExponent,
    trial: &mut [f64],
    flux: &mut [f64],
) -> f64 {
    let d1 = directional(sys, vals, step, 1.0, p, trial, flux);
    if d1 <= 0.25 * slope.abs() || p.is_linear() {
        return 1.0;
    }
    let (mut a, mut da) = (0.0, slope);
    let (mut b, mut db) = (1.0, d1);
    let mut best = 1.0;
    for _ in 0..12 {
        let secant = a - da * (b - a) / (db - da);
        let x = secant.clamp(a + 0.05 * (b - a), b - 0.05 * (b - a));
        let dx = directional(sys, vals, step, x, p, trial, flux);
        best = x;
        if dx.abs() <= 0.1 * slope.abs() {
            return x;
        }
        if dx < 0.0 {
            a = x;
            da = dx;
        } else {
            b = x;
            db = dx;
        }
    }
    directional(sys, vals, step, best, p, trial, flux);
    best
}

/// Exact scalar relaxation of the vertices whose residual exceeds `tol`,
/// spreading to neighbors as they are disturbed, within `budget` local
/// solves. Fixes the handful of vertices where tiny gradients make the flux
/// too steep for the global step.
fn polish(sys: &FreeSystem, vals: &mut [f64], p: &PExponent, tol: f64, budget: usize) {
    let m = sys.m();
    let mut queued = vec![false; m];
    let mut queue = VecDeque::new();
    for i in 0..m {
        if (sys.flux(vals, i, p) / sys.mu[i]).abs() > tol {
            queued[i] = true;
            queue.push_back(i);
        }
    }
    let mut spent = 0;
    while let Some(i) = queue.pop_front() {
        queued[i] = false;
        if spent == budget {
            break;
        }
        spent += 1;
        vals[i] = local_solve(sys, vals, i, p);
        let (cols, _) = sys.row(i);
        for &c in cols {
            let c = c as usize;
            if c < m && !queued[c] && (sys.flux(vals, c, p) / sys.mu[c]).abs() > tol {
                queued[c] = true;
                queue.push_back(c);
            }
        }
    }
}

/// Linear (`p = 2`) solve from the current values, used as a starting point.
fn linear_start(sys: &FreeSystem, vals: &mut [f64]) {
    let p2 = PExponent::new(2.0).expect("2 is a valid exponent");
    let m = sys.m();
    let mut rhs = vec![0.0; m];
    fluxes(sys, vals, &p2, &mut rhs);
    let h = hessian(sys, vals, &p2, 0.0);
    let mut amg = Hierarchy::build(h.clone());
    let mut step = vec![0.0; m];
    pcg(&h, &mut amg, &rhs, &mut step, 1e-10, PCG_MAX_ITER);
    for i in 0..m {
        vals[i] += step[i];
    }
}

/// Newton matrix and right-hand side for the flux-augmented system used when
/// `p < 2`: per edge slot the unknown flux `q` with `phi_inv(q) = grad u`,
/// eliminated through the conductance `c = 1 / phi_inv'(q)`. Fills `cond`
/// and `mismatch` (`phi_inv(q) - grad u`) per slot.
fn dual_system(
    sys: &FreeSystem,
    vals: &[f64],
    q: &[f64],
    p: &PExponent,
    floor: f64,
    cond: &mut [f64],
    mismatch: &mut [f64],
    rhs: &mut [f64],
) -> SparseSym {
    let m = sys.m();
    let scale = p.value() - 1.0;
    let mut diag = vec![0.0; m];
    let mut offsets = Vec::with_capacity(m + 1);
    let mut cols = Vec::with_capacity(sys.cols.len());
    let mut out = Vec::with_capacity(sys.cols.len());
    offsets.push(0);
    for i in 0..m {
        let range = sys.offsets[i]..sys.offsets[i + 1];
        let vi = vals[i];
        let (mut d, mut b) = (0.0, 0.0);
        for k in range {
            let c = sys.cols[k] as usize;
            let w = sys.w[k];
            let grad_q = p.phi_inv(q[k]);
            let ck = scale * p.curvature(grad_q, floor);
            let r1 = grad_q - (vals[c] - vi);
            cond[k] = ck;
            mismatch[k] = r1;
            d += w * ck;
            b += w * (q[k] - ck * r1);
            if c < m {
                cols.push(c as u32);
                out.push(-w * ck);
            }
        }
        diag[i] = d;
        rhs[i] = b;
        offsets.push(cols.len());
    }
    SparseSym {
        diag,
        offsets,
        cols,
        vals: out,
    }
}

fn consistent_fluxes(sys: &FreeSystem, vals: &[f64], p: &PExponent, q: &mut [f64]) {
    for i in 0..sys.m() {
        let vi = vals[i];
        for k in sys.offsets[i]..sys.offsets[i + 1] {
            q[k] = p.phi(vals[sys.cols[k] as usize] - vi);
        }
    }
}

pub(crate) fn solve(
    sys: &FreeSystem,
    vals: &mut [f64],
    p: &PExponent,
    opts: &SolverOptions,
) -> EngineOutcome {
    let m = sys.m();
    let max_iter = opts.max_sweeps.unwrap_or(DEFAULT_MAX_ITER);
    let trace = trace_enabled();
    let mut history = Vec::new();
    let (lo, hi) = sys.fixed_range(vals);
    let range = if lo <= hi { hi - lo } else { 0.0 };
    let floor = 1e-14 * range.max(f64::MIN_POSITIVE);
    let resolution = p.resolution_floor(lo.abs().max(hi.abs()));
    if m > 0 && opts.initial_guess.is_none() && !p.is_linear() && range > 0.0 {
        linear_start(sys, vals);
    }
    let dual = p.value() < 2.0;
    let slots = if dual { sys.cols.len() } else { 0 };
    let mut q = vec![0.0; slots];
    let mut cond = vec![0.0; slots];
    let mut mismatch = vec![0.0; slots];
    if dual {
        consistent_fluxes(sys, vals, p, &mut q);
    }
    let inv_p = 1.0 / p.value();
    let mut flux = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut step = vec![0.0; m];
    let mut trial = vals.to_vec();
    let mut trial_flux = vec![0.0; m];
    let mut residual = fluxes(sys, vals, p, &mut flux);
    let mut energy = inv_p * sys.energy(vals, p);
    let g0 = norm(&flux).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    let mut fresh_fluxes = true;
    let mut polishes = 0;
    let mut slow = 0;
    let mut reset_since_polish = false;
    while residual > opts.tol {
        if iterations == max_iter {
            return EngineOutcome {
                sweeps: iterations,
                residual,
                converged: residual <= resolution,
                history,
            };
        }
        iterations += 1;
        let h = if dual {
            dual_system(sys, vals, &q, p, floor, &mut cond, &mut mismatch, &mut rhs)
        } else {
            rhs.copy_from_slice(&flux);
            hessian(sys, vals, p, floor)
        };
        let mut amg = Hierarchy::build(h.clone());
        let eta = if p.is_linear() {
            1e-13
        } else {
            (norm(&flux) / g0).min(0.1).max(1e-13)
        };
        let report = pcg(&h, &mut amg, &rhs, &mut step, eta, PCG_MAX_ITER);
        let slope: f64 = -dot(&flux, &step);
        let mut alpha = 0.0;
        let mut progress = false;
        if slope < 0.0 {
            alpha = line_search(sys, vals, &step, slope, p, &mut trial, &mut trial_flux);
            let r = fluxes(sys, &trial, p, &mut trial_flux);
            let e = inv_p * sys.energy(&trial, p);
            progress = r < residual || e < energy - 64.0 * f64::EPSILON * energy.abs();
            if progress {
                if dual {
                    for i in 0..m {
                        let si = step[i];
                        for k in sys.offsets[i]..sys.offsets[i + 1] {
                            let c = sys.cols[k] as usize;
                            let sc = if c < m { step[c] } else { 0.0 };
                            q[k] += alpha * cond[k] * ((sc - si) - mismatch[k]);
                        }
                    }
                }
                vals[..m].copy_from_slice(&trial[..m]);
                std::mem::swap(&mut flux, &mut trial_flux);
                slow = if r > 0.5 * residual { slow + 1 } else { 0 };
                residual = r;
                energy = e;
            }
        }
        if trace {
            eprintln!(
                "newton it={iterations} m={m} levels={} pcg={} rel={:.1e} alpha={alpha:.3} res={residual:.3e} E={energy:.12e}{}",
                amg.depth(),
                report.iterations,
                report.relative_residual,
                if dual && !progress { " (flux reset)" } else { "" }
            );
        }
        if opts.record_energy {
            history.push(p.value() * energy);
        }
        if progress && slow < SLOW_RUN {
            fresh_fluxes = false;
            continue;
        }
        slow = 0;
        if progress {
            fresh_fluxes = false;
        }
        if dual && !fresh_fluxes && (!reset_since_polish || polishes == MAX_POLISHES) {
            consistent_fluxes(sys, vals, p, &mut q);
            fresh_fluxes = true;
            reset_since_polish = true;
        } else if polishes < MAX_POLISHES {
            polishes += 1;
            reset_since_polish = false;
            polish(sys, vals, p, opts.tol, POLISH_BUDGET * m.max(1));
            residual = fluxes(sys, vals, p, &mut flux);
            energy = inv_p * sys.energy(vals, p);
            if dual {
                consistent_fluxes(sys, vals, p, &mut q);
                fresh_fluxes = true;
            }
            if trace {
                eprintln!("newton polish res={residual:.3e} E={energy:.12e}");
            }
        } else if !progress {
            return EngineOutcome {
                sweeps: iterations,
                residual,
                converged: residual <= resolution,
                history,
            };
        }
    }
    EngineOutcome {
        sweeps: iterations,
        residual,
        converged: true,
        history,
    }
}
