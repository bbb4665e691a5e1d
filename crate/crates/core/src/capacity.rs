//! Condenser potentials and p-capacities, level-set fluxes, the measure
//! `sigma = -Delta_p u`, exhaustion sequences and the ball and level-set
//! capacity inequalities as executable checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{closure, VertexId, VertexSet, WeightedGraph};
use crate::lattice::GraphWindow;
use crate::plaplace::{
    assemble_solution, initialize, run_engine, BuildError, FreeSystem, PExponent,
    PotentialSolution, SolverOptions,
};

/// Source plate at potential 1, sink plate at potential 0, inside `domain`
/// (the whole graph when `None`).
#[derive(Debug, Clone)]
pub struct Condenser {
    pub source: VertexSet,
    pub sink: VertexSet,
    pub domain: Option<VertexSet>,
    pub p: PExponent,
}

/// Which edges a capacity value sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Every edge of the graph.
    FullGraph,
    /// Edges with both endpoints in the domain.
    Subdomain,
}

impl Condenser {
    pub fn new(source: VertexSet, sink: VertexSet, p: PExponent) -> Self {
        Condenser {
            source,
            sink,
            domain: None,
            p,
        }
    }

    pub fn within(mut self, domain: VertexSet) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn convention(&self) -> Convention {
        match self.domain {
            None => Convention::FullGraph,
            Some(_) => Convention::Subdomain,
        }
    }

    fn validate(&self, g: &WeightedGraph) -> Result<()> {
        self.source.check_graph(g)?;
        self.sink.check_graph(g)?;
        if self.source.is_empty() || self.sink.is_empty() {
            return Err(Error::InvalidCondenser("both plates must be nonempty".into()));
        }
        if !self.source.is_disjoint(&self.sink) {
            return Err(Error::InvalidCondenser("plates intersect".into()));
        }
        if let Some(d) = &self.domain {
            d.check_graph(g)?;
            if !self.source.is_subset(d) || !self.sink.is_subset(d) {
                return Err(Error::InvalidCondenser("plates must lie in the domain".into()));
            }
        }
        Ok(())
    }
}

/// Output of one plate problem: the potential plus the full-domain energy.
pub(crate) struct PlateSolve {
    pub solution: PotentialSolution,
    pub value: f64,
    pub uncertainty: f64,
}

/// Solves a condenser given as a free set plus a value oracle: `plate(y)` is
/// `Some(1.0)` on the source, `Some(0.0)` on the sink and `None` outside the
/// domain. `source` lists the source vertices.
pub(crate) fn solve_plates(
    g: &WeightedGraph,
    free: Vec<VertexId>,
    is_free: &[bool],
    plate: impl Fn(VertexId) -> Option<f64>,
    source: &[VertexId],
    p: &PExponent,
    opts: &SolverOptions,
) -> Result<PlateSolve> {
    let (sys, mut vals) = FreeSystem::build(g, free, is_free, &plate).map_err(|e| match e {
        BuildError::Isolated(x) => Error::DisconnectedFreeComponent(x),
        BuildError::NonFinite(vertex, value) => Error::NonFinite { vertex, value },
    })?;
    initialize(&sys, &mut vals, opts.initial_guess.as_deref());
    let (outcome, method) = run_engine(&sys, &mut vals, p, opts);
    let mut solution = assemble_solution(g, &sys, &vals, p, outcome, method, opts.tol);
    let mut direct = 0.0;
    let mut plate_weight = 0.0;
    for &x in source {
        solution.u[x] = 1.0;
    }
    for &x in source {
        for (y, w) in g.neighbors(x) {
            if is_free[y] {
                plate_weight += w;
                continue;
            }
            if let Some(v) = plate(y) {
                solution.u[y] = v;
                if v != 1.0 {
                    direct += w * p.abs_pow(1.0 - v);
                    plate_weight += w;
                }
            }
        }
    }
    Ok(PlateSolve {
        value: solution.energy_closure + direct,
        uncertainty: p.value() * solution.max_residual * plate_weight,
        solution,
    })
}

/// The p-potential of a condenser. Non-convergence is reported through
/// `converged = false`.
pub fn condenser_potential(
    g: &WeightedGraph,
    c: &Condenser,
    opts: &SolverOptions,
) -> Result<PotentialSolution> {
    Ok(solve_condenser(g, c, opts)?.solution)
}

fn solve_condenser(g: &WeightedGraph, c: &Condenser, opts: &SolverOptions) -> Result<PlateSolve> {
    c.validate(g)?;
    let n = g.vertex_count();
    let in_domain = c.domain.as_ref().map(|d| d.mask(n));
    let is_source = c.source.mask(n);
    let is_sink = c.sink.mask(n);
    let is_free: Vec<bool> = (0..n)
        .map(|x| {
            !is_source[x] && !is_sink[x] && in_domain.as_ref().map_or(true, |d| d[x])
        })
        .collect();
    let free: Vec<VertexId> = (0..n).filter(|&x| is_free[x]).collect();
    let plate = |y: VertexId| {
        if is_source[y] {
            Some(1.0)
        } else if is_sink[y] {
            Some(0.0)
        } else {
            None
        }
    };
    let mut solved = solve_plates(g, free, &is_free, plate, c.source.ids(), &c.p, opts)?;
    for x in c.sink.iter() {
        solved.solution.u[x] = 0.0;
    }
    Ok(solved)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CondenserSizes {
    pub source: usize,
    pub sink: usize,
    pub free: usize,
}

#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub value: f64,
    /// `p * max_residual * (weight of edges leaving the source)`.
    pub uncertainty: f64,
    pub convention: Convention,
    pub p: f64,
    pub potential: PotentialSolution,
    pub flux_at_source: f64,
    pub flux_at_sink: f64,
    pub sigma_mass_on_source: f64,
    pub sizes: CondenserSizes,
}

/// Serializable digest of a [`CapacityResult`].
#[derive(Debug, Clone, Serialize)]
pub struct CapacitySummary {
    pub value: f64,
    pub uncertainty: f64,
    pub convention: Convention,
    pub p: f64,
    pub sizes: CondenserSizes,
    pub sweeps: usize,
}

impl CapacityResult {
    pub fn summary(&self) -> CapacitySummary {
        CapacitySummary {
            value: self.value,
            uncertainty: self.uncertainty,
            convention: self.convention,
            p: self.p,
            sizes: self.sizes,
            sweeps: self.potential.sweeps,
        }
    }
}

/// `cap_p` of a condenser: the energy of its potential over every edge of the
/// domain. Fails with `MaxSweepsExceeded` when the potential did not converge.
pub fn capacity(g: &WeightedGraph, c: &Condenser, opts: &SolverOptions) -> Result<CapacityResult> {
    let solved = solve_condenser(g, c, opts)?;
    solved.solution.ensure_converged()?;
    let u = &solved.solution.u;
    let sigma = sigma_measure(g, u, &c.p);
    Ok(CapacityResult {
        value: solved.value,
        uncertainty: solved.uncertainty,
        convention: c.convention(),
        p: c.p.value(),
        flux_at_source: level_set_flux(g, u, 1.0, &c.p),
        flux_at_sink: level_set_flux(g, u, 0.0, &c.p),
        sigma_mass_on_source: c.source.iter().map(|x| sigma[x]).sum(),
        sizes: CondenserSizes {
            source: c.source.len(),
            sink: c.sink.len(),
            free: solved.solution.free_set.len(),
        },
        potential: solved.solution,
    })
}

/// Flux `sum |u(x) - u(y)|^(p-1) mu_xy` through the edge boundary of
/// `Gamma_t = {u > t}`; at `t >= 1` the level set is `{u >= 1}`. Vertices where
/// `u` is `NaN` are outside the problem and carry no edges.
pub fn level_set_flux(g: &WeightedGraph, u: &[f64], t: f64, p: &PExponent) -> f64 {
    let inside = |v: f64| if t >= 1.0 { v >= 1.0 } else { v > t };
    let mut total = 0.0;
    for x in 0..g.vertex_count() {
        if !inside(u[x]) {
            continue;
        }
        for (y, w) in g.neighbors(x) {
            let uy = u[y];
            if uy.is_nan() || inside(uy) {
                continue;
            }
            total += w * p.phi(u[x] - uy).abs();
        }
    }
    total
}

/// `sigma(x) = -Delta_p u(x) * mu(x)` with the canonical measure; `NaN` where
/// `u` is undefined.
pub fn sigma_measure(g: &WeightedGraph, u: &[f64], p: &PExponent) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|x| {
            if u[x].is_nan() {
                return f64::NAN;
            }
            g.neighbors(x)
                .filter(|&(y, _)| !u[y].is_nan())
                .map(|(y, w)| w * p.phi(u[x] - u[y]))
                .sum()
        })
        .collect()
}

/// One point of a capacity sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequencePoint {
    #[serde(rename = "R")]
    pub radius: usize,
    pub value: f64,
    /// `value - previous value`; `NaN` for the first point.
    pub increment: f64,
}

/// Options shared by the sequence drivers.
#[derive(Debug, Clone)]
pub struct SequenceOptions {
    pub solver: SolverOptions,
    /// Start each radius from the previous potential.
    pub warm_start: bool,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions {
            solver: SolverOptions::default(),
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacitySequence {
    pub points: Vec<SequencePoint>,
    /// Last value.
    pub estimate: f64,
    /// Absolute value of the last increment.
    pub error_proxy: f64,
    pub window_radius: Option<i64>,
    /// Largest solver uncertainty over the sequence.
    pub uncertainty: f64,
}

pub(crate) fn sequence_from(
    values: &[(usize, f64)],
    window_radius: Option<i64>,
    uncertainty: f64,
) -> CapacitySequence {
    let points: Vec<SequencePoint> = values
        .iter()
        .enumerate()
        .map(|(i, &(radius, value))| SequencePoint {
            radius,
            value,
            increment: if i == 0 { f64::NAN } else { value - values[i - 1].1 },
        })
        .collect();
    let last = points.last().copied();
    CapacitySequence {
        estimate: last.map_or(f64::NAN, |p| p.value),
        error_proxy: last.map_or(f64::NAN, |p| p.increment.abs()),
        points,
        window_radius,
        uncertainty,
    }
}

fn check_radii(radii: &[usize]) -> Result<()> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] == 0 {
        return Err(Error::Config("radii must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// `C_p(K, (B_R ∩ U)^c)` for each radius, with `B_R = {d(center, x) < R}`;
/// the limit is `cap_p(K, U)`. With `U` the whole graph this is the capacity
/// of `K` to infinity.
pub fn capacity_exhaustion<W: GraphWindow + ?Sized>(
    window: &W,
    center: VertexId,
    k: &VertexSet,
    u_set: Option<&VertexSet>,
    p: &PExponent,
    radii: &[usize],
    opts: &SequenceOptions,
) -> Result<CapacitySequence> {
    let g = window.graph();
    g.check_vertex(center)?;
    k.check_graph(g)?;
    if k.is_empty() {
        return Err(Error::InvalidCondenser("source plate is empty".into()));
    }
    check_radii(radii)?;
    let n = g.vertex_count();
    let r_max = *radii.last().unwrap();
    let dist = g.distances_from(center, Some(r_max));
    let in_u = u_set.map(|s| s.mask(n));
    let is_source = k.mask(n);
    let mut values = Vec::with_capacity(radii.len());
    let mut solver = opts.solver.clone();
    let mut uncertainty: f64 = 0.0;
    for &r in radii {
        if !window.ball_is_interior(center, r - 1) {
            return Err(Error::WindowTooSmall { center, radius: r });
        }
        if k.iter().any(|x| dist[x] as usize >= r) {
            return Err(Error::InvalidCondenser(format!(
                "source plate is not inside the ball of radius {r}"
            )));
        }
        let is_free: Vec<bool> = (0..n)
            .map(|x| {
                (dist[x] as usize) < r
                    && !is_source[x]
                    && in_u.as_ref().map_or(true, |m| m[x])
            })
            .collect();
        let free: Vec<VertexId> = (0..n).filter(|&x| is_free[x]).collect();
        let plate = |y: VertexId| Some(if is_source[y] { 1.0 } else { 0.0 });
        let solved = solve_plates(g, free, &is_free, plate, k.ids(), p, &solver)?;
        solved.solution.ensure_converged()?;
        uncertainty = uncertainty.max(solved.uncertainty);
        values.push((r, solved.value));
        if opts.warm_start {
            solver.initial_guess = Some(solved.solution.u);
        }
    }
    Ok(sequence_from(&values, window.window_radius(), uncertainty))
}

/// Evaluation of the two-sided ball capacity estimate for concentric balls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallBoundCheck {
    pub x0: VertexId,
    pub r: usize,
    #[serde(rename = "R")]
    pub big_r: usize,
    pub p: f64,
    /// `cap_p(B(x0, r), B(x0, R))`.
    pub cap: f64,
    pub uncertainty: f64,
    /// `mu(B(x0, R))`.
    pub ball_measure: f64,
    /// `mu(B(x0, R)) / (R - r)^p`.
    pub upper_bound: f64,
    pub upper_holds: bool,
    /// `cap * R^p / mu(B(x0, R))`, the empirical lower constant.
    pub ratio: f64,
    /// Whether `R < 2r`, the regime of the lower estimate.
    pub lower_regime: bool,
}

/// Computes `cap_p(B_r, B_R)` for the closed balls around `x0` (the sink is
/// everything outside `B_R`) and compares it with `mu(B_R)/(R - r)^p`.
pub fn ball_capacity_bounds_check<W: GraphWindow + ?Sized>(
    window: &W,
    x0: VertexId,
    r: usize,
    big_r: usize,
    p: &PExponent,
    opts: &SolverOptions,
) -> Result<BallBoundCheck> {
    let g = window.graph();
    g.check_vertex(x0)?;
    if r == 0 || r >= big_r {
        return Err(Error::InvalidCondenser(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    if !window.ball_is_interior(x0, big_r) {
        return Err(Error::WindowTooSmall { center: x0, radius: big_r });
    }
    let n = g.vertex_count();
    let dist = g.distances_from(x0, Some(big_r + 1));
    let is_free: Vec<bool> = dist
        .iter()
        .map(|&d| (d as usize) > r && (d as usize) <= big_r)
        .collect();
    let free: Vec<VertexId> = (0..n).filter(|&x| is_free[x]).collect();
    let source: Vec<VertexId> = (0..n).filter(|&x| (dist[x] as usize) <= r).collect();
    let plate = |y: VertexId| Some(if (dist[y] as usize) <= r { 1.0 } else { 0.0 });
    let solved = solve_plates(g, free, &is_free, plate, &source, p, opts)?;
    solved.solution.ensure_converged()?;
    let ball_measure: f64 = (0..n)
        .filter(|&x| (dist[x] as usize) <= big_r)
        .map(|x| g.measure(x))
        .sum();
    let upper_bound = ball_measure / ((big_r - r) as f64).powf(p.value());
    Ok(BallBoundCheck {
        x0,
        r,
        big_r,
        p: p.value(),
        cap: solved.value,
        uncertainty: solved.uncertainty,
        ball_measure,
        upper_bound,
        upper_holds: solved.value <= upper_bound + solved.uncertainty,
        ratio: solved.value * (big_r as f64).powf(p.value()) / ball_measure,
        lower_regime: big_r < 2 * r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichCheck {
    /// `lambda^(p-1) cap_p(Gamma_lambda, U)`.
    pub lhs: f64,
    /// `cap_p(K, U)`.
    pub mid: f64,
    /// `lambda^(p-1) cap_p(closure(Gamma_lambda), U)`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks `lambda^(p-1) cap(Gamma_l, U) <= cap(K, U) <= lambda^(p-1) cap(cl Gamma_l, U)`
/// where `U` is the domain minus the sink of `c`.
pub fn level_set_sandwich_check(
    g: &WeightedGraph,
    c: &Condenser,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<SandwichCheck> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidCondenser(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let base = capacity(g, c, opts)?;
    let u = &base.potential.u;
    let gamma = VertexSet::from_predicate(g, |x| u[x] > lambda);
    let gamma_closure = closure(g, &gamma);
    let escapes = !gamma_closure.is_disjoint(&c.sink)
        || c.domain.as_ref().map_or(false, |d| !gamma_closure.is_subset(d));
    if escapes {
        return Err(Error::ClosureEscapesU);
    }
    let scale = lambda.powf(c.p.value() - 1.0);
    let with_source = |source: VertexSet| Condenser {
        source,
        ..c.clone()
    };
    let inner = capacity(g, &with_source(gamma), opts)?;
    let outer = capacity(g, &with_source(gamma_closure), opts)?;
    let slack = scale * (inner.uncertainty + outer.uncertainty) + base.uncertainty + 1e-12;
    let lhs = scale * inner.value;
    let rhs = scale * outer.value;
    Ok(SandwichCheck {
        lhs,
        mid: base.value,
        rhs,
        slack,
        holds: lhs <= base.value + slack && base.value <= rhs + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ball;
    use crate::lattice::{lattice_box, WholeGraph};

    fn path(n_edges: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n_edges).map(|i| (i, i + 1, 1.0)).collect();
        WeightedGraph::from_edges(n_edges + 1, &edges).unwrap()
    }

    fn ends(g: &WeightedGraph, p: f64) -> Condenser {
        let n = g.vertex_count();
        Condenser::new(
            VertexSet::new(g, [0]).unwrap(),
            VertexSet::new(g, [n - 1]).unwrap(),
            PExponent::new(p).unwrap(),
        )
    }

    #[test]
    fn two_vertex_condenser() {
        let g = path(1);
        for p in [1.5, 2.0, 3.0] {
            let res = capacity(&g, &ends(&g, p), &Default::default()).unwrap();
            assert_eq!(res.value, 1.0);
            assert_eq!(res.potential.u, vec![1.0, 0.0]);
            assert_eq!(res.sigma_mass_on_source, 1.0);
            assert_eq!(res.flux_at_source, 1.0);
        }
    }

    #[test]
    fn path_potential_is_linear() {
        let g = path(4);
        let res = capacity(&g, &ends(&g, 2.5), &Default::default()).unwrap();
        for (i, want) in [1.0, 0.75, 0.5, 0.25, 0.0].iter().enumerate() {
            assert!((res.potential.u[i] - want).abs() < 1e-9);
        }
        assert!((res.value - 4f64.powf(-1.5)).abs() < 1e-9);
    }

    #[test]
    fn series_law_on_ten_edges() {
        let g = path(10);
        for p in [1.5, 2.0, 3.0] {
            let res = capacity(&g, &ends(&g, p), &Default::default()).unwrap();
            let exact = 10f64.powf(1.0 - p);
            assert!((res.value - exact).abs() < 1e-6, "p={p}: {}", res.value);
            assert!((res.sigma_mass_on_source - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn parallel_law() {
        let g = WeightedGraph::from_edges(3, &[(0, 2, 0.7), (1, 2, 1.9)]).unwrap();
        let c = Condenser::new(
            VertexSet::new(&g, [0, 1]).unwrap(),
            VertexSet::new(&g, [2]).unwrap(),
            PExponent::new(2.2).unwrap(),
        );
        let res = capacity(&g, &c, &Default::default()).unwrap();
        assert!((res.value - 2.6).abs() < 1e-12);
        assert_eq!(res.sizes.free, 0);
    }

    #[test]
    fn flux_is_constant_across_levels() {
        let g = path(6);
        let p = PExponent::new(1.7).unwrap();
        let res = capacity(&g, &ends(&g, 1.7), &Default::default()).unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            let h = level_set_flux(&g, &res.potential.u, t, &p);
            assert!((h - res.value).abs() < 1e-9, "t={t}: {h}");
        }
        assert_eq!(level_set_flux(&g, &[0.4; 7], 0.3, &p), 0.0);
    }

    #[test]
    fn annulus_potential_is_rotation_symmetric() {
        let l = lattice_box(2, 8, None).unwrap();
        let o = l.window.origin();
        let source = ball(&l.graph, o, 1);
        let sink = ball(&l.graph, o, 6).complement(&l.graph);
        let c = Condenser::new(source, sink, PExponent::new(2.0).unwrap());
        let u = condenser_potential(&l.graph, &c, &Default::default()).unwrap().u;
        for x in 0..l.graph.vertex_count() {
            let xy = l.window.coords(x);
            let rotated = l.window.id(&[-xy[1], xy[0]]).unwrap();
            assert!((u[x] - u[rotated]).abs() < 1e-8);
        }
    }

    #[test]
    fn condenser_errors() {
        let g = WeightedGraph::from_edges(5, &[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]).unwrap();
        let p = PExponent::new(2.0).unwrap();
        let c = Condenser::new(
            VertexSet::new(&g, [0]).unwrap(),
            VertexSet::new(&g, [2]).unwrap(),
            p,
        );
        assert!(matches!(
            capacity(&g, &c, &Default::default()),
            Err(Error::DisconnectedFreeComponent(3))
        ));
        let c = Condenser::new(VertexSet::new(&g, [0]).unwrap(), VertexSet::empty(&g), p);
        assert!(matches!(capacity(&g, &c, &Default::default()), Err(Error::InvalidCondenser(_))));
    }

    #[test]
    fn subdomain_convention_drops_outside_edges() {
        // square 0-1-2-3-0 with the domain excluding 3
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])
            .unwrap();
        let p = PExponent::new(2.0).unwrap();
        let c = Condenser::new(
            VertexSet::new(&g, [0]).unwrap(),
            VertexSet::new(&g, [2]).unwrap(),
            p,
        );
        let full = capacity(&g, &c, &Default::default()).unwrap();
        assert!((full.value - 1.0).abs() < 1e-12);
        let sub = capacity(
            &g,
            &c.clone().within(VertexSet::new(&g, [0, 1, 2]).unwrap()),
            &Default::default(),
        )
        .unwrap();
        assert!((sub.value - 0.5).abs() < 1e-12);
        assert_eq!(sub.convention, Convention::Subdomain);
        assert!(sub.potential.u[3].is_nan());
    }

    #[test]
    fn z1_exhaustion_is_one_over_r() {
        let l = lattice_box(1, 40, None).unwrap();
        let o = l.window.origin();
        let k = VertexSet::new(&l.graph, [o]).unwrap();
        let p = PExponent::new(2.0).unwrap();
        let seq =
            capacity_exhaustion(&l, o, &k, None, &p, &[1, 2, 5, 10, 40], &Default::default())
                .unwrap();
        for pt in &seq.points {
            assert!((pt.value - 1.0 / pt.radius as f64).abs() < 1e-10);
        }
        assert!(matches!(
            capacity_exhaustion(&l, o, &k, None, &p, &[41, 42], &Default::default()),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn ball_bound_on_small_grid() {
        let l = lattice_box(2, 12, None).unwrap();
        let p = PExponent::new(2.0).unwrap();
        let check =
            ball_capacity_bounds_check(&l, l.window.origin(), 4, 8, &p, &Default::default())
                .unwrap();
        assert!(check.upper_holds);
        assert!(check.cap > 0.0 && check.ratio > 0.0);
        let tight =
            ball_capacity_bounds_check(&l, l.window.origin(), 7, 8, &p, &Default::default())
                .unwrap();
        assert!((tight.upper_bound - tight.ball_measure).abs() < 1e-12);
        assert!(tight.upper_holds);
    }

    #[test]
    fn sandwich_is_tight_on_path() {
        let g = path(4);
        let c = ends(&g, 2.0);
        // u(2) = 1/2 up to rounding, so sit just above the tie
        let s = level_set_sandwich_check(&g, &c, 0.5 + 1e-9, &Default::default()).unwrap();
        assert!(s.holds);
        assert!((s.mid - 0.25).abs() < 1e-10);
        assert!((s.rhs - 0.25).abs() < 1e-8);
        assert!((s.lhs - 1.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn whole_graph_window_accepts_any_radius() {
        let g = path(8);
        let k = VertexSet::new(&g, [4]).unwrap();
        let p = PExponent::new(2.0).unwrap();
        let seq = capacity_exhaustion(&WholeGraph(&g), 4, &k, None, &p, &[2, 4], &Default::default())
            .unwrap();
        assert!((seq.points[0].value - 1.0).abs() < 1e-10);
        assert!((seq.estimate - 0.5).abs() < 1e-10);
        assert!((seq.points[1].increment + 0.5).abs() < 1e-10);
    }
}
