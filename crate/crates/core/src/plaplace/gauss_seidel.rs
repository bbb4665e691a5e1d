use rayon::prelude::*;

use super::{EngineOutcome, FreeSystem, PExponent, SolverOptions};

/// Root of the decreasing function `t -> sum_c w_c phi(v_c - t)`.
pub(super) fn local_solve(sys: &FreeSystem, vals: &[f64], i: usize, p: &PExponent) -> f64 {
    let (cols, w) = sys.row(i);
    if p.is_linear() {
        let (num, den) = cols
            .iter()
            .zip(w)
            .fold((0.0, 0.0), |(n, d), (&c, &wc)| (n + wc * vals[c as usize], d + wc));
        return num / den;
    }
    let (mut lo, mut hi) = cols.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
        let v = vals[c as usize];
        (lo.min(v), hi.max(v))
    });
    if lo == hi {
        return lo;
    }
    let f = |t: f64| -> f64 {
        cols.iter()
            .zip(w)
            .map(|(&c, &wc)| wc * p.phi(vals[c as usize] - t))
            .sum()
    };
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm > 0.0 {
            lo = mid;
            f_lo = fm;
        } else if fm < 0.0 {
            hi = mid;
            f_hi = fm;
        } else {
            return mid;
        }
    }
    if f_lo.abs() <= f_hi.abs() {
        lo
    } else {
        hi
    }
}

pub(crate) fn solve(
    sys: &FreeSystem,
    vals: &mut [f64],
    p: &PExponent,
    opts: &SolverOptions,
) -> EngineOutcome {
    let m = sys.m();
    let max_sweeps = opts.max_sweeps.unwrap_or(200 * m.max(1));
    let colors = if opts.parallel { Some(sys.coloring()) } else { None };
    let mut history = Vec::new();
    let mut energy = sys.energy(vals, p);
    let mut residual = sys.max_residual(vals, p);
    if residual <= opts.tol {
        return EngineOutcome {
            sweeps: 0,
            residual,
            converged: true,
            history,
        };
    }
    let (lo, hi) = sys.fixed_range(vals);
    let resolution = p.resolution_floor(lo.abs().max(hi.abs()));
    let mut buffer = Vec::new();
    for sweep in 1..=max_sweeps {
        let mut moved = false;
        match &colors {
            None => {
                for i in 0..m {
                    let v = local_solve(sys, vals, i, p);
                    moved |= v != vals[i];
                    vals[i] = v;
                }
            }
            Some(classes) => {
                for class in classes {
                    let snapshot: &[f64] = vals;
                    class
                        .par_iter()
                        .map(|&i| local_solve(sys, snapshot, i, p))
                        .collect_into_vec(&mut buffer);
                    for (&i, &v) in class.iter().zip(&buffer) {
                        moved |= v != vals[i];
                        vals[i] = v;
                    }
                }
            }
        }
        let next = sys.energy(vals, p);
        if opts.record_energy {
            history.push(next);
        }
        let change = (energy - next).abs() / next.abs().max(f64::MIN_POSITIVE);
        energy = next;
        residual = sys.max_residual(vals, p);
        if residual <= opts.tol && change <= opts.energy_rtol.max(0.0) + f64::EPSILON * 8.0 {
            return EngineOutcome {
                sweeps: sweep,
                residual,
                converged: true,
                history,
            };
        }
        if !moved {
            return EngineOutcome {
                sweeps: sweep,
                residual,
                converged: residual <= opts.tol.max(resolution),
                history,
            };
        }
    }
    EngineOutcome {
        sweeps: max_sweeps,
        residual,
        converged: false,
        history,
    }
}
