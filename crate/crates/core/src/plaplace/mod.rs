//! p-Dirichlet energy, the graph p-Laplacian and the finite Dirichlet solver.
//!
//! Everywhere below `phi(t) = sign(t) |t|^(p-1)`, which is continuous at 0 for
//! every `p > 1`; the coefficient form `|t|^(p-2) t` is never evaluated.

mod amg;
mod gauss_seidel;
mod newton;
pub(crate) mod system;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{vertex_boundary, VertexId, VertexSet, WeightedGraph};

pub(crate) use system::{BuildError, FreeSystem};

/// Exponent `p > 1` with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
    inv_pm1: f64,
    kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Two,
    ThreeHalves,
    Three,
    General,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        let kind = if p == 2.0 {
            Kind::Two
        } else if p == 1.5 {
            Kind::ThreeHalves
        } else if p == 3.0 {
            Kind::Three
        } else {
            Kind::General
        };
        Ok(PExponent {
            p,
            inv_pm1: 1.0 / (p - 1.0),
            kind,
        })
    }

    pub fn value(&self) -> f64 {
        self.p
    }

    /// `1 / (p - 1)`.
    pub fn inv_pm1(&self) -> f64 {
        self.inv_pm1
    }

    pub fn is_linear(&self) -> bool {
        self.kind == Kind::Two
    }

    /// Outside `[1.05, 12]` the scalar problems are badly conditioned.
    pub fn is_ill_conditioned(&self) -> bool {
        self.p < 1.05 || self.p > 12.0
    }

    /// `sign(t) |t|^(p-1)`
    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        match self.kind {
            Kind::Two => t,
            Kind::ThreeHalves => t.signum() * t.abs().sqrt(),
            Kind::Three => t * t.abs(),
            Kind::General => {
                if t == 0.0 {
                    0.0
                } else {
                    t.signum() * t.abs().powf(self.p - 1.0)
                }
            }
        }
    }

    /// `|t|^p`
    #[inline]
    pub fn abs_pow(&self, t: f64) -> f64 {
        let a = t.abs();
        match self.kind {
            Kind::Two => a * a,
            Kind::ThreeHalves => a * a.sqrt(),
            Kind::Three => a * a * a,
            Kind::General => a.powf(self.p),
        }
    }

    /// Inverse of [`PExponent::phi`]: `sign(q) |q|^(1/(p-1))`.
    #[inline]
    pub fn phi_inv(&self, q: f64) -> f64 {
        match self.kind {
            Kind::Two => q,
            Kind::ThreeHalves => q * q.abs(),
            Kind::Three => q.signum() * q.abs().sqrt(),
            Kind::General => {
                if q == 0.0 {
                    0.0
                } else {
                    q.signum() * q.abs().powf(self.inv_pm1)
                }
            }
        }
    }

    /// Smallest residual that can be resolved for values of magnitude up to
    /// `scale`: for `p < 2` one ulp of difference already carries the flux
    /// `ulp^(p-1)`.
    pub(crate) fn resolution_floor(&self, scale: f64) -> f64 {
        if self.p >= 2.0 {
            0.0
        } else {
            (8.0 * f64::EPSILON * scale.abs().max(f64::MIN_POSITIVE)).powf(self.p - 1.0)
        }
    }

    /// `max(|t|, floor)^(p-2)`, the second-derivative coefficient with the
    /// singular (p < 2) or degenerate (p > 2) point at zero cut off.
    #[inline]
    pub(crate) fn curvature(&self, t: f64, floor: f64) -> f64 {
        let a = t.abs().max(floor);
        match self.kind {
            Kind::Two => 1.0,
            Kind::ThreeHalves => 1.0 / a.sqrt(),
            Kind::Three => a,
            Kind::General => a.powf(self.p - 2.0),
        }
    }
}

/// `D_p(u; Omega)`: sum over unordered edges with both endpoints in `omega`.
pub fn p_energy(g: &WeightedGraph, u: &[f64], omega: &VertexSet, p: &PExponent) -> f64 {
    let inside = omega.mask(g.vertex_count());
    omega
        .iter()
        .map(|x| {
            g.neighbors(x)
                .filter(|&(y, _)| y > x && inside[y])
                .map(|(y, w)| w * p.abs_pow(u[y] - u[x]))
                .sum::<f64>()
        })
        .sum()
}

/// Full energy `D_p(u)` over every edge of the graph.
pub fn p_energy_full(g: &WeightedGraph, u: &[f64], p: &PExponent) -> f64 {
    g.edges().map(|(x, y, w)| w * p.abs_pow(u[y] - u[x])).sum()
}

/// `Delta_p u(x) = (1/m(x)) sum_y mu_xy phi(u(y) - u(x))`.
pub fn p_laplacian_at(g: &WeightedGraph, u: &[f64], x: VertexId, p: &PExponent) -> f64 {
    let s: f64 = g.neighbors(x).map(|(y, w)| w * p.phi(u[y] - u[x])).sum();
    s / g.vertex_weight(x)
}

/// Both sides of the discrete Green formula on a finite set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_gap: f64,
}

/// Evaluates
/// `sum_{x in Omega} Delta_p f(x) g(x) m(x)` against
/// `-1/2 sum_{x,y in Omega} mu_xy phi(grad f) grad g + sum_{x in Omega, y in dOmega} mu_xy phi(grad f) g(x)`.
pub fn greens_identity_check(
    g: &WeightedGraph,
    omega: &VertexSet,
    f: &[f64],
    h: &[f64],
    p: &PExponent,
) -> GreenCheck {
    let inside = omega.mask(g.vertex_count());
    let lhs: f64 = omega
        .iter()
        .map(|x| p_laplacian_at(g, f, x, p) * h[x] * g.vertex_weight(x))
        .sum();
    let mut interior = 0.0;
    let mut boundary = 0.0;
    for x in omega.iter() {
        for (y, w) in g.neighbors(x) {
            let flux = w * p.phi(f[y] - f[x]);
            if inside[y] {
                interior += flux * (h[y] - h[x]);
            } else {
                boundary += flux * h[x];
            }
        }
    }
    let rhs = -0.5 * interior + boundary;
    GreenCheck {
        lhs,
        rhs,
        abs_gap: (lhs - rhs).abs(),
    }
}

/// Which engine drives a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Gauss-Seidel for small free sets with `p >= 2`, Newton otherwise. A Gauss-Seidel run
    /// that exhausts its sweeps continues with Newton from where it stopped.
    Auto,
    /// Nonlinear Gauss-Seidel with exact scalar solves by bisection.
    GaussSeidel,
    /// Damped Newton on the energy with multigrid-preconditioned CG.
    Newton,
}

/// Free sets at most this large use Gauss-Seidel under [`Method::Auto`] when `p >= 2`.
pub const AUTO_GS_LIMIT: usize = 200;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop once `max |Delta_p u| <= tol` on the free set.
    pub tol: f64,
    /// Gauss-Seidel also requires the relative energy change per sweep to drop below this.
    pub energy_rtol: f64,
    /// Sweep (or Newton iteration) cap; `None` means `200 * |Omega|` sweeps.
    pub max_sweeps: Option<usize>,
    pub method: Method,
    /// Multicolor parallel sweeps for Gauss-Seidel.
    pub parallel: bool,
    /// Starting values, full graph length; `NaN` entries fall back to the default start.
    pub initial_guess: Option<Vec<f64>>,
    /// Keep the energy after every sweep.
    pub record_energy: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            energy_rtol: 1e-12,
            max_sweeps: None,
            method: Method::Auto,
            parallel: false,
            initial_guess: None,
            record_energy: false,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialSolution {
    /// Values on the whole graph; `NaN` where the problem assigns none.
    pub u: Vec<f64>,
    pub free_set: VertexSet,
    /// `max |Delta_p u|` over the free set.
    pub max_residual: f64,
    /// Energy over edges with at least one endpoint in the free set.
    pub energy_closure: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub method: Method,
    pub tol: f64,
    pub ill_conditioned_p: bool,
    pub energy_history: Vec<f64>,
}

impl PotentialSolution {
    /// Turns a non-converged solve into an error.
    pub fn ensure_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::MaxSweepsExceeded {
                sweeps: self.sweeps,
                residual: self.max_residual,
            })
        }
    }
}

pub(crate) struct EngineOutcome {
    pub sweeps: usize,
    pub residual: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Runs the selected engine on an assembled system. `vals[..m]` holds the start.
pub(crate) fn run_engine(
    sys: &FreeSystem,
    vals: &mut [f64],
    p: &PExponent,
    opts: &SolverOptions,
) -> (EngineOutcome, Method) {
    let method = match opts.method {
        Method::Auto if sys.m() <= AUTO_GS_LIMIT && p.value() >= 2.0 => Method::GaussSeidel,
        Method::Auto => Method::Newton,
        m => m,
    };
    let outcome = match method {
        Method::GaussSeidel => gauss_seidel::solve(sys, vals, p, opts),
        _ => newton::solve(sys, vals, p, opts),
    };
    if outcome.converged || opts.method != Method::Auto || method == Method::Newton {
        return (outcome, method);
    }
    let mut rescue = newton::solve(sys, vals, p, opts);
    rescue.sweeps += outcome.sweeps;
    let mut history = outcome.history;
    history.append(&mut rescue.history);
    rescue.history = history;
    (rescue, Method::Newton)
}

/// Fills `vals[..m]` from the caller's guess, defaulting to the mean of the
/// fixed values.
pub(crate) fn initialize(sys: &FreeSystem, vals: &mut [f64], guess: Option<&[f64]>) {
    let m = sys.m();
    let fixed = &vals[m..];
    let mean = if fixed.is_empty() {
        0.0
    } else {
        fixed.iter().sum::<f64>() / fixed.len() as f64
    };
    let (lo, hi) = sys.fixed_range(vals);
    for (i, &x) in sys.free.iter().enumerate() {
        let start = guess.map(|g| g[x]).filter(|v| v.is_finite());
        vals[i] = match start {
            Some(v) if lo <= hi => v.clamp(lo, hi),
            Some(v) => v,
            None => mean,
        };
    }
}

pub(crate) fn assemble_solution(
    g: &WeightedGraph,
    sys: &FreeSystem,
    vals: &[f64],
    p: &PExponent,
    outcome: EngineOutcome,
    method: Method,
    tol: f64,
) -> PotentialSolution {
    let mut u = vec![f64::NAN; g.vertex_count()];
    let m = sys.m();
    for (i, &x) in sys.free.iter().enumerate() {
        u[x] = vals[i];
    }
    for (k, &x) in sys.fixed_ids.iter().enumerate() {
        u[x] = vals[m + k];
    }
    PotentialSolution {
        free_set: VertexSet::new(g, sys.free.iter().copied()).expect("free ids are valid"),
        energy_closure: sys.energy(vals, p),
        max_residual: outcome.residual,
        sweeps: outcome.sweeps,
        converged: outcome.converged,
        method,
        tol,
        ill_conditioned_p: p.is_ill_conditioned(),
        energy_history: outcome.history,
        u,
    }
}

/// Solves `Delta_p u = 0` on the finite set `omega` with `u = boundary` on its
/// vertex boundary.
pub fn solve_dirichlet(
    g: &WeightedGraph,
    omega: &VertexSet,
    boundary: impl Fn(VertexId) -> f64,
    p: &PExponent,
    opts: &SolverOptions,
) -> Result<PotentialSolution> {
    omega.check_graph(g)?;
    if omega.len() == g.vertex_count() {
        return Err(Error::EmptyBoundary(omega.ids().first().copied().unwrap_or(0)));
    }
    let is_free = omega.mask(g.vertex_count());
    let (sys, mut vals) = FreeSystem::build(g, omega.ids().to_vec(), &is_free, |y| {
        Some(boundary(y))
    })
    .map_err(|e| match e {
        BuildError::Isolated(x) => Error::EmptyBoundary(x),
        BuildError::NonFinite(vertex, value) => Error::NonFinite { vertex, value },
    })?;
    initialize(&sys, &mut vals, opts.initial_guess.as_deref());
    let (outcome, method) = run_engine(&sys, &mut vals, p, opts);
    Ok(assemble_solution(g, &sys, &vals, p, outcome, method, opts.tol))
}

/// Boundary of `omega` paired with values of `f`, handy for building data.
pub fn boundary_values(
    g: &WeightedGraph,
    omega: &VertexSet,
    f: impl Fn(VertexId) -> f64,
) -> Vec<(VertexId, f64)> {
    vertex_boundary(g, omega).iter().map(|y| (y, f(y))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lattice_box;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        WeightedGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn exponent_validation() {
        assert!(PExponent::new(1.0).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        let p = PExponent::new(3.0).unwrap();
        assert_eq!(p.inv_pm1(), 0.5);
        assert!(PExponent::new(1.01).unwrap().is_ill_conditioned());
        assert!(PExponent::new(13.0).unwrap().is_ill_conditioned());
    }

    #[test]
    fn phi_fast_paths_match_powf() {
        for p in [1.5, 2.0, 3.0] {
            let fast = PExponent::new(p).unwrap();
            for t in [-2.3f64, -0.1, 0.0, 0.7, 4.0] {
                let slow = if t == 0.0 {
                    0.0
                } else {
                    t.signum() * t.abs().powf(p - 1.0)
                };
                assert!((fast.phi(t) - slow).abs() < 1e-14);
                assert!((fast.abs_pow(t) - t.abs().powf(p)).abs() < 1e-13);
                assert!((fast.phi_inv(fast.phi(t)) - t).abs() < 1e-13);
            }
        }
        let p = PExponent::new(1.3).unwrap();
        assert_eq!(p.phi(0.0), 0.0);
    }

    #[test]
    fn energy_examples() {
        let p3 = PExponent::new(3.0).unwrap();
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(p_energy(&g, &[0.0, 1.0], &VertexSet::all(&g), &p3), 1.0);
        let g = path(3);
        let p2 = PExponent::new(2.0).unwrap();
        let all = VertexSet::all(&g);
        assert_eq!(p_energy(&g, &[0.0, 0.5, 1.0], &all, &p2), 0.5);
        assert_eq!(p_energy(&g, &[4.0; 3], &all, &p2), 0.0);
    }

    #[test]
    fn laplacian_examples() {
        let g = path(3);
        for p in [1.3, 2.0, 3.5] {
            let p = PExponent::new(p).unwrap();
            assert!(p_laplacian_at(&g, &[0.0, 0.5, 1.0], 1, &p).abs() < 1e-15);
            assert_eq!(p_laplacian_at(&g, &[2.0; 3], 0, &p), 0.0);
        }
        let star = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let p3 = PExponent::new(3.0).unwrap();
        let v = p_laplacian_at(&star, &[0.0, 1.0, 1.0, -2.0], 0, &p3);
        assert!((v + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        let l = lattice_box(2, 3, None).unwrap();
        let omega = crate::graph::ball(&l.graph, l.window.origin(), 2);
        let p = PExponent::new(2.5).unwrap();
        let sol = solve_dirichlet(&l.graph, &omega, |_| 0.3, &p, &Default::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.max_residual < 1e-12);
        assert!(omega.iter().all(|x| (sol.u[x] - 0.3).abs() < 1e-12));
    }

    #[test]
    fn path_solution_is_linear() {
        let g = path(4);
        let omega = VertexSet::new(&g, [1, 2]).unwrap();
        for p in [1.3, 2.0, 4.0] {
            let p = PExponent::new(p).unwrap();
            for method in [Method::GaussSeidel, Method::Newton] {
                let opts = SolverOptions {
                    method,
                    ..Default::default()
                };
                let sol =
                    solve_dirichlet(&g, &omega, |x| if x == 0 { 0.0 } else { 1.0 }, &p, &opts)
                        .unwrap();
                assert!(sol.converged, "{method:?} p={}", p.value());
                assert!((sol.u[1] - 1.0 / 3.0).abs() < 1e-9);
                assert!((sol.u[2] - 2.0 / 3.0).abs() < 1e-9);
                assert!(sol.max_residual <= 1e-10);
            }
        }
    }

    #[test]
    fn affine_functions_are_harmonic_on_grid() {
        let l = lattice_box(2, 2, None).unwrap();
        let omega = crate::graph::ball(&l.graph, l.window.origin(), 1)
            .union(&VertexSet::from_predicate(&l.graph, |x| !l.window.is_frontier(x)));
        let f = |x: usize| {
            let c = l.window.coords(x);
            0.3 * c[0] as f64 - 1.7 * c[1] as f64
        };
        let p = PExponent::new(2.0).unwrap();
        let sol = solve_dirichlet(&l.graph, &omega, f, &p, &Default::default()).unwrap();
        for x in omega.iter() {
            assert!((sol.u[x] - f(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn dirichlet_errors() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let p = PExponent::new(2.0).unwrap();
        let all = VertexSet::all(&g);
        assert!(matches!(
            solve_dirichlet(&g, &all, |_| 0.0, &p, &Default::default()),
            Err(Error::EmptyBoundary(_))
        ));
        let omega = VertexSet::new(&g, [2, 3]).unwrap();
        assert!(matches!(
            solve_dirichlet(&g, &omega, |_| 0.0, &p, &Default::default()),
            Err(Error::EmptyBoundary(2))
        ));
        let omega = VertexSet::new(&g, [1]).unwrap();
        assert!(matches!(
            solve_dirichlet(&g, &omega, |_| f64::INFINITY, &p, &Default::default()),
            Err(Error::NonFinite { vertex: 0, .. })
        ));
    }

    #[test]
    fn sweep_cap_reports_non_convergence() {
        let l = lattice_box(2, 6, None).unwrap();
        let omega = VertexSet::from_predicate(&l.graph, |x| !l.window.is_frontier(x));
        let p = PExponent::new(1.5).unwrap();
        let opts = SolverOptions {
            method: Method::GaussSeidel,
            max_sweeps: Some(3),
            ..Default::default()
        };
        let sol = solve_dirichlet(
            &l.graph,
            &omega,
            |x| l.window.coords(x)[0] as f64,
            &p,
            &opts,
        )
        .unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.sweeps, 3);
        assert!(matches!(
            sol.ensure_converged(),
            Err(Error::MaxSweepsExceeded { sweeps: 3, .. })
        ));
    }

    #[test]
    fn green_identity_on_path_with_unit_test_function() {
        let g = path(5);
        let omega = VertexSet::new(&g, [1, 2, 3]).unwrap();
        let f = [0.0, 0.3, -1.0, 2.0, 0.5];
        let p = PExponent::new(2.5).unwrap();
        let check = greens_identity_check(&g, &omega, &f, &[1.0; 5], &p);
        let flux: f64 = [(1, 0), (3, 4)]
            .iter()
            .map(|&(x, y)| p.phi(f[y] - f[x]))
            .sum();
        assert!((check.rhs - flux).abs() < 1e-14);
        assert!(check.abs_gap < 1e-14);
        let check = greens_identity_check(&g, &omega, &[0.7; 5], &f, &p);
        assert_eq!((check.lhs, check.rhs), (0.0, 0.0));
    }
}
