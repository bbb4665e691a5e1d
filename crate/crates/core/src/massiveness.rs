//! Finite-window testers for p-parabolicity, p-massiveness and
//! D_p-massiveness, plus the two constructions built from massive sets.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::capacity::{capacity_exhaustion, sequence_from, solve_plates, CapacitySequence, SequenceOptions};
use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::lattice::GraphWindow;
use crate::plaplace::{solve_dirichlet, PExponent, PotentialSolution, SolverOptions};

/// Thresholds behind every verdict of this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Massive-like needs the extrapolated limit at most `1 - massive_margin`.
    pub massive_margin: f64,
    /// ... and either a last increment at most this,
    pub massive_last_increment: f64,
    /// ... or the last `decay_run - 1` ratios of consecutive increments at most
    /// this, in which case the limit adds the geometric tail.
    pub geometric_ratio: f64,
    /// Ratios of consecutive values (or deficits) at most this count as decay.
    pub decay_ratio: f64,
    /// Number of consecutive decaying ratios required.
    pub decay_run: usize,
    /// Flattening: last increment at most this fraction of the value.
    pub flatten_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            massive_margin: 0.02,
            massive_last_increment: 0.005,
            geometric_ratio: 0.6,
            decay_ratio: 0.9,
            decay_run: 3,
            flatten_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MassivenessOptions {
    pub sequence: SequenceOptions,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParabolicVerdict {
    ParabolicLike,
    NonParabolicLike,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassiveVerdict {
    MassiveLike,
    NonMassiveLike,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpVerdict {
    DpMassiveLike,
    NotDpMassiveLike,
    Inconclusive,
}

fn ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

fn sustained_decay(r: &[f64], t: &Thresholds) -> bool {
    r.len() >= t.decay_run && r[r.len() - t.decay_run..].iter().all(|&q| q <= t.decay_ratio)
}

fn flattens(seq: &CapacitySequence, t: &Thresholds) -> bool {
    seq.points.len() >= 2 && seq.error_proxy <= t.flatten_fraction * seq.estimate.abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct ParabolicityEvidence {
    pub sequence: CapacitySequence,
    /// `value_{i+1} / value_i`.
    pub ratios: Vec<f64>,
    pub verdict: ParabolicVerdict,
    pub thresholds: Thresholds,
}

/// `cap_p(K, B_R)` over the radii (`B_R = {d(center, .) < R}`) with a verdict:
/// parabolic-like when the last `decay_run` ratios are all at most
/// `decay_ratio`, non-parabolic-like when the sequence flattens.
pub fn parabolicity_sequence<W: GraphWindow + ?Sized>(
    window: &W,
    center: VertexId,
    k: &VertexSet,
    p: &PExponent,
    radii: &[usize],
    opts: &MassivenessOptions,
) -> Result<ParabolicityEvidence> {
    let sequence = capacity_exhaustion(window, center, k, None, p, radii, &opts.sequence)?;
    let values: Vec<f64> = sequence.points.iter().map(|pt| pt.value).collect();
    let ratios = ratios(&values);
    let t = &opts.thresholds;
    let verdict = if sustained_decay(&ratios, t) {
        ParabolicVerdict::ParabolicLike
    } else if flattens(&sequence, t) {
        ParabolicVerdict::NonParabolicLike
    } else {
        ParabolicVerdict::Inconclusive
    };
    Ok(ParabolicityEvidence {
        sequence,
        ratios,
        verdict,
        thresholds: opts.thresholds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MassivenessEvidence {
    pub x0: VertexId,
    pub center: VertexId,
    pub omega_size: usize,
    pub p: f64,
    /// `v_R(x0)` per radius.
    pub sequence: CapacitySequence,
    /// `(1 - v_{i+1}) / (1 - v_i)`.
    pub deficit_ratios: Vec<f64>,
    /// Last value plus the tail: the last increment, or its geometric sum when
    /// the increments shrink fast enough. Capped at 1.
    pub limit: f64,
    pub error_proxy: f64,
    /// `1 - limit`.
    pub margin: f64,
    /// Whether `v_R(x0)` is nondecreasing in `R` up to twice the tolerance.
    pub monotone: bool,
    pub verdict: MassiveVerdict,
    pub thresholds: Thresholds,
}

fn geometric_tail_ratio(seq: &CapacitySequence, t: &Thresholds) -> Option<f64> {
    let run = t.decay_run.saturating_sub(1).max(1);
    let inc: Vec<f64> = seq.points.iter().skip(1).map(|pt| pt.increment).collect();
    if inc.len() < run + 1 || inc.iter().any(|&d| !(d > 0.0)) {
        return None;
    }
    let q = ratios(&inc[inc.len() - run - 1..]).into_iter().fold(0.0, f64::max);
    (q <= t.geometric_ratio).then_some(q)
}

fn radii_ok(radii: &[usize]) -> Result<()> {
    if radii.is_empty() || radii[0] == 0 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("radii must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Solves `Delta_p v = 0` on `Omega ∩ B_R` with `v = 1` on the complement of
/// `Omega` and `v = 0` on `Omega` beyond the ball, and records `v_R(x0)`.
pub fn massiveness_sequence<W: GraphWindow + ?Sized>(
    window: &W,
    omega: &VertexSet,
    center: VertexId,
    x0: VertexId,
    p: &PExponent,
    radii: &[usize],
    opts: &MassivenessOptions,
) -> Result<MassivenessEvidence> {
    let g = window.graph();
    omega.check_graph(g)?;
    g.check_vertex(center)?;
    g.check_vertex(x0)?;
    if !omega.contains(x0) {
        return Err(Error::X0OutsideOmega(x0));
    }
    radii_ok(radii)?;
    let n = g.vertex_count();
    let r_max = *radii.last().unwrap();
    let dist = g.distances_from(center, Some(r_max));
    if dist[x0] as usize >= radii[0] {
        return Err(Error::Config(format!(
            "x0 must lie in the smallest ball (distance {} >= {})",
            dist[x0], radii[0]
        )));
    }
    let in_omega = omega.mask(n);
    let mut solver = opts.sequence.solver.clone();
    let mut values = Vec::with_capacity(radii.len());
    let mut uncertainty: f64 = 0.0;
    for &r in radii {
        if !window.ball_is_interior(center, r - 1) {
            return Err(Error::WindowTooSmall { center, radius: r });
        }
        let omega_k = VertexSet::from_predicate(g, |x| in_omega[x] && (dist[x] as usize) < r);
        let sol = solve_dirichlet(g, &omega_k, |y| if in_omega[y] { 0.0 } else { 1.0 }, p, &solver)?;
        sol.ensure_converged()?;
        uncertainty = uncertainty.max(sol.max_residual);
        values.push((r, sol.u[x0]));
        if opts.sequence.warm_start {
            solver.initial_guess = Some(sol.u);
        }
    }
    let sequence = sequence_from(&values, window.window_radius(), uncertainty);
    let tol = opts.sequence.solver.tol.max(uncertainty);
    let monotone = sequence
        .points
        .windows(2)
        .all(|w| w[1].value >= w[0].value - 2.0 * tol);
    let deficits: Vec<f64> = values.iter().map(|&(_, v)| 1.0 - v).collect();
    let deficit_ratios = ratios(&deficits);
    let last_increment = if values.len() >= 2 { sequence.error_proxy } else { f64::INFINITY };
    let t = &opts.thresholds;
    let settled = last_increment <= t.massive_last_increment;
    let tail_ratio = geometric_tail_ratio(&sequence, t);
    let tail = match tail_ratio {
        Some(q) if !settled => last_increment * q / (1.0 - q),
        _ => last_increment,
    };
    let limit = (sequence.estimate + tail.min(1.0)).min(1.0);
    let verdict = if limit <= 1.0 - t.massive_margin && (settled || tail_ratio.is_some()) {
        MassiveVerdict::MassiveLike
    } else if sustained_decay(&deficit_ratios, t) {
        MassiveVerdict::NonMassiveLike
    } else {
        MassiveVerdict::Inconclusive
    };
    Ok(MassivenessEvidence {
        x0,
        center,
        omega_size: omega.len(),
        p: p.value(),
        error_proxy: sequence.error_proxy,
        sequence,
        deficit_ratios,
        limit,
        margin: 1.0 - limit,
        monotone,
        verdict,
        thresholds: opts.thresholds,
    })
}

/// An induced subgraph seen through the window of its parent: subgraph balls
/// are contained in parent balls around the same vertex.
pub struct InducedWindow<'a, W: GraphWindow + ?Sized> {
    pub graph: WeightedGraph,
    /// New id to parent id.
    pub to_parent: Vec<VertexId>,
    pub parent: &'a W,
}

impl<'a, W: GraphWindow + ?Sized> InducedWindow<'a, W> {
    pub fn new(parent: &'a W, set: &VertexSet) -> Result<Self> {
        let (graph, to_parent) = parent.graph().induced_subgraph(set)?;
        Ok(InducedWindow {
            graph,
            to_parent,
            parent,
        })
    }

    pub fn local(&self, parent_id: VertexId) -> Option<VertexId> {
        self.to_parent.binary_search(&parent_id).ok()
    }
}

impl<W: GraphWindow + ?Sized> GraphWindow for InducedWindow<'_, W> {
    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn ball_is_interior(&self, center: VertexId, r: usize) -> bool {
        self.parent.ball_is_interior(self.to_parent[center], r)
    }

    fn window_radius(&self) -> Option<i64> {
        self.parent.window_radius()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DpEvidence {
    /// Vertex of `Omega_1` closest to the center, the compact set of the
    /// parabolicity test.
    pub anchor: VertexId,
    pub parabolicity: ParabolicityEvidence,
    /// Conductance between `Omega_1 ∩ B_R` and `B_R \ Omega` inside `B_R`
    /// (Neumann on the sphere); nondecreasing with limit `cap_p(Omega_1, Omega)`.
    pub capacity: CapacitySequence,
    /// Relative increments of the capacity sequence.
    pub relative_increments: Vec<f64>,
    pub capacity_grows: bool,
    pub capacity_flattens: bool,
    pub verdict: DpVerdict,
}

/// D_p-massiveness evidence for `Omega` through the candidate `Omega_1`:
/// `Omega_1` must look non-parabolic and `cap_p(Omega_1 ∩ B_R, Omega)` must
/// stay bounded.
pub fn dp_massiveness_probe<W: GraphWindow + ?Sized>(
    window: &W,
    omega: &VertexSet,
    omega1: &VertexSet,
    center: VertexId,
    p: &PExponent,
    radii: &[usize],
    opts: &MassivenessOptions,
) -> Result<DpEvidence> {
    let g = window.graph();
    omega.check_graph(g)?;
    omega1.check_graph(g)?;
    g.check_vertex(center)?;
    if !omega1.is_subset(omega) {
        return Err(Error::Omega1NotSubset);
    }
    if omega1.is_empty() {
        return Err(Error::SetSpec("the subset is empty".into()));
    }
    radii_ok(radii)?;
    let n = g.vertex_count();
    let r_max = *radii.last().unwrap();
    if !window.ball_is_interior(center, r_max - 1) {
        return Err(Error::WindowTooSmall { center, radius: r_max });
    }
    let dist = g.distances_from(center, Some(r_max));
    let anchor = omega1
        .iter()
        .min_by_key(|&x| (dist[x], x))
        .expect("nonempty");
    let parabolicity = {
        let sub = InducedWindow::new(window, omega1)?;
        let local = sub.local(anchor).expect("anchor lies in the subset");
        let k = VertexSet::new(&sub.graph, [local])?;
        let shift = dist[anchor] as usize;
        let sub_radii: Vec<usize> = radii.iter().map(|&r| r.saturating_sub(shift).max(1)).collect();
        let mut sub_radii_dedup = sub_radii.clone();
        sub_radii_dedup.dedup();
        parabolicity_sequence(&sub, local, &k, p, &sub_radii_dedup, opts)?
    };
    let in_omega = omega.mask(n);
    let in_omega1 = omega1.mask(n);
    if !(0..n).any(|x| (dist[x] as usize) < r_max && !in_omega[x]) {
        return Err(Error::InvalidCondenser(
            "the complement of the domain misses the largest ball".into(),
        ));
    }
    let mut values = Vec::with_capacity(radii.len());
    let mut uncertainty: f64 = 0.0;
    let mut solver = opts.sequence.solver.clone();
    for &r in radii {
        let inside = |x: VertexId| (dist[x] as usize) < r;
        let is_source: Vec<bool> = (0..n).map(|x| in_omega1[x] && inside(x)).collect();
        let source: Vec<VertexId> = (0..n).filter(|&x| is_source[x]).collect();
        let touches_sink = (0..n).any(|x| inside(x) && !in_omega[x]);
        if source.is_empty() || !touches_sink {
            values.push((r, 0.0));
            continue;
        }
        let is_free: Vec<bool> = (0..n)
            .map(|x| inside(x) && in_omega[x] && !is_source[x])
            .collect();
        let free: Vec<VertexId> = (0..n).filter(|&x| is_free[x]).collect();
        let plate = |y: VertexId| {
            if !inside(y) {
                None
            } else if is_source[y] {
                Some(1.0)
            } else {
                Some(0.0)
            }
        };
        let solved = solve_plates(g, free, &is_free, plate, &source, p, &solver)?;
        solved.solution.ensure_converged()?;
        uncertainty = uncertainty.max(solved.uncertainty);
        values.push((r, solved.value));
        if opts.sequence.warm_start {
            solver.initial_guess = Some(solved.solution.u);
        }
    }
    let capacity = sequence_from(&values, window.window_radius(), uncertainty);
    let relative_increments: Vec<f64> = capacity
        .points
        .iter()
        .skip(1)
        .map(|pt| pt.increment / pt.value.abs().max(f64::MIN_POSITIVE))
        .collect();
    let t = &opts.thresholds;
    let capacity_flattens = flattens(&capacity, t);
    let incs: Vec<f64> = capacity.points.iter().skip(1).map(|pt| pt.increment).collect();
    let capacity_grows = !capacity_flattens
        && incs.len() >= 2
        && incs[incs.len() - 1] >= 0.5 * incs[incs.len() - 2]
        && relative_increments[relative_increments.len() - 1] > t.flatten_fraction;
    let verdict = if capacity_grows {
        DpVerdict::NotDpMassiveLike
    } else if capacity_flattens && parabolicity.verdict == ParabolicVerdict::NonParabolicLike {
        DpVerdict::DpMassiveLike
    } else {
        DpVerdict::Inconclusive
    };
    Ok(DpEvidence {
        anchor,
        parabolicity,
        capacity,
        relative_increments,
        capacity_grows,
        capacity_flattens,
        verdict,
    })
}

/// Multi-source distance from `sources` inside the vertices allowed by
/// `inside`.
fn distance_to(g: &WeightedGraph, sources: impl Iterator<Item = VertexId>, inside: &[bool]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    for s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        for (y, _) in g.neighbors(x) {
            if inside[y] && dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetRange {
    pub sup: f64,
    pub inf: f64,
    pub count: usize,
}

fn range_over(u: &[f64], mut members: impl Iterator<Item = VertexId>) -> SetRange {
    let mut r = SetRange {
        sup: f64::NEG_INFINITY,
        inf: f64::INFINITY,
        count: 0,
    };
    for x in members.by_ref() {
        r.sup = r.sup.max(u[x]);
        r.inf = r.inf.min(u[x]);
        r.count += 1;
    }
    if r.count == 0 {
        r.sup = f64::NAN;
        r.inf = f64::NAN;
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleReport {
    pub radius: usize,
    /// Depth of the cores: distance to the complement of the own set.
    pub core_depth: usize,
    pub omega1: SetRange,
    pub omega2: SetRange,
    pub core1: SetRange,
    pub core2: SetRange,
    /// `min over core1 - max over core2`.
    pub margin: f64,
    #[serde(skip)]
    pub solution: PotentialSolution,
}

/// On the ball `{d(center, .) <= R}` (as an induced subgraph, so the rest of
/// the sphere is a Neumann boundary), solves with `v = 1` on `Omega_1` and
/// `v = 0` on `Omega_2` along the sphere. Cores are the points of each set in
/// the half ball at distance at least `R/4` from the complement of that set.
pub fn liouville_construct<W: GraphWindow + ?Sized>(
    window: &W,
    omega1: &VertexSet,
    omega2: &VertexSet,
    center: VertexId,
    p: &PExponent,
    radius: usize,
    opts: &SolverOptions,
) -> Result<LiouvilleReport> {
    let g = window.graph();
    omega1.check_graph(g)?;
    omega2.check_graph(g)?;
    g.check_vertex(center)?;
    if !omega1.is_disjoint(omega2) {
        return Err(Error::SetsIntersect);
    }
    if radius < 2 {
        return Err(Error::Config("radius must be at least 2".into()));
    }
    if !window.ball_is_interior(center, radius - 1) {
        return Err(Error::WindowTooSmall { center, radius });
    }
    let n = g.vertex_count();
    let dist = g.distances_from(center, Some(radius));
    let in1 = omega1.mask(n);
    let in2 = omega2.mask(n);
    let sphere = |x: VertexId| dist[x] as usize == radius;
    if !(0..n).any(|x| sphere(x) && in1[x]) || !(0..n).any(|x| sphere(x) && in2[x]) {
        return Err(Error::InvalidCondenser("both sets must meet the sphere".into()));
    }
    let ball = VertexSet::from_predicate(g, |x| (dist[x] as usize) <= radius);
    let (sub, to_parent) = g.induced_subgraph(&ball)?;
    let free = VertexSet::from_predicate(&sub, |i| {
        let x = to_parent[i];
        !(sphere(x) && (in1[x] || in2[x]))
    });
    let local = solve_dirichlet(&sub, &free, |i| if in1[to_parent[i]] { 1.0 } else { 0.0 }, p, opts)?;
    local.ensure_converged()?;
    let mut u = vec![f64::NAN; n];
    for (i, &x) in to_parent.iter().enumerate() {
        u[x] = local.u[i];
    }
    let solution = PotentialSolution {
        free_set: VertexSet::new(g, local.free_set.iter().map(|i| to_parent[i]))?,
        u,
        ..local
    };
    let in_ball: Vec<bool> = (0..n).map(|x| (dist[x] as usize) <= radius).collect();
    let core_depth = (radius / 4).max(1);
    let core = |mask: &[bool]| -> Vec<VertexId> {
        let depth = distance_to(
            g,
            (0..n).filter(|&x| in_ball[x] && !mask[x]),
            &in_ball,
        );
        (0..n)
            .filter(|&x| mask[x] && 2 * (dist[x] as usize) <= radius && depth[x] as usize >= core_depth)
            .collect()
    };
    let u = &solution.u;
    let members = |mask: &[bool]| -> Vec<VertexId> { (0..n).filter(|&x| mask[x] && in_ball[x]).collect() };
    let c1 = core(&in1);
    let c2 = core(&in2);
    let core1 = range_over(u, c1.into_iter());
    let core2 = range_over(u, c2.into_iter());
    Ok(LiouvilleReport {
        radius,
        core_depth,
        omega1: range_over(u, members(&in1).into_iter()),
        omega2: range_over(u, members(&in2).into_iter()),
        margin: core1.inf - core2.sup,
        core1,
        core2,
        solution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPoint {
    #[serde(rename = "R")]
    pub radius: usize,
    pub minimal_at_x0: f64,
    pub inflated_at_x0: f64,
    /// Suprema over the probe region `Omega ∩ B(center, first radius)`.
    pub minimal_sup: f64,
    pub inflated_sup: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessGap {
    pub x0: VertexId,
    pub level: f64,
    pub points: Vec<GapPoint>,
}

/// Two solutions on `Omega ∩ B_R` with data `f` on the complement of `Omega`:
/// the minimal one (outer data `0`) and the inflated one (outer data
/// `level`).
pub fn uniqueness_gap_probe<W: GraphWindow + ?Sized>(
    window: &W,
    omega: &VertexSet,
    center: VertexId,
    x0: VertexId,
    f: impl Fn(VertexId) -> f64,
    level: f64,
    p: &PExponent,
    radii: &[usize],
    opts: &SequenceOptions,
) -> Result<UniquenessGap> {
    let g = window.graph();
    omega.check_graph(g)?;
    g.check_vertex(center)?;
    g.check_vertex(x0)?;
    if !omega.contains(x0) {
        return Err(Error::X0OutsideOmega(x0));
    }
    radii_ok(radii)?;
    let n = g.vertex_count();
    let dist = g.distances_from(center, Some(*radii.last().unwrap()));
    if dist[x0] as usize >= radii[0] {
        return Err(Error::Config("x0 must lie in the smallest ball".into()));
    }
    let in_omega = omega.mask(n);
    let probe: Vec<VertexId> = (0..n)
        .filter(|&x| in_omega[x] && (dist[x] as usize) < radii[0])
        .collect();
    let mut solvers = [opts.solver.clone(), opts.solver.clone()];
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        if !window.ball_is_interior(center, r - 1) {
            return Err(Error::WindowTooSmall { center, radius: r });
        }
        let omega_k = VertexSet::from_predicate(g, |x| in_omega[x] && (dist[x] as usize) < r);
        let mut out = [0.0; 4];
        for (k, outer) in [0.0, level].into_iter().enumerate() {
            let sol = solve_dirichlet(
                g,
                &omega_k,
                |y| if in_omega[y] { outer } else { f(y) },
                p,
                &solvers[k],
            )?;
            sol.ensure_converged()?;
            out[2 * k] = sol.u[x0];
            out[2 * k + 1] = probe.iter().map(|&x| sol.u[x]).fold(f64::NEG_INFINITY, f64::max);
            if opts.warm_start {
                solvers[k].initial_guess = Some(sol.u);
            }
        }
        points.push(GapPoint {
            radius: r,
            minimal_at_x0: out[0],
            minimal_sup: out[1],
            inflated_at_x0: out[2],
            inflated_sup: out[3],
            gap: out[3] - out[1],
        });
    }
    Ok(UniquenessGap { x0, level, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{halfspace_set, lattice_box, WholeGraph};

    fn p2() -> PExponent {
        PExponent::new(2.0).unwrap()
    }

    #[test]
    fn z1_is_parabolic() {
        let l = lattice_box(1, 70, None).unwrap();
        let o = l.window.origin();
        let k = VertexSet::new(&l.graph, [o]).unwrap();
        let ev = parabolicity_sequence(&l, o, &k, &p2(), &[4, 8, 16, 32, 64], &Default::default()).unwrap();
        for pt in &ev.sequence.points {
            assert!((pt.value - 1.0 / pt.radius as f64).abs() < 1e-10);
        }
        assert_eq!(ev.verdict, ParabolicVerdict::ParabolicLike);
    }

    #[test]
    fn finite_hole_in_z3_is_massive_and_in_z2_is_not() {
        let l = lattice_box(3, 17, None).unwrap();
        let o = l.window.origin();
        let omega = VertexSet::new(&l.graph, [o]).unwrap().complement(&l.graph);
        let x0 = l.window.id(&[1, 0, 0]).unwrap();
        let ev = massiveness_sequence(&l, &omega, o, x0, &p2(), &[4, 8, 16], &Default::default()).unwrap();
        assert!(ev.monotone);
        assert!(ev.limit < 0.8, "{ev:?}");
        for w in ev.sequence.points.windows(2) {
            assert!(w[1].value >= w[0].value - 1e-9);
        }
        let l2 = lattice_box(2, 65, None).unwrap();
        let o2 = l2.window.origin();
        let omega2 = VertexSet::new(&l2.graph, [o2]).unwrap().complement(&l2.graph);
        let x1 = l2.window.id(&[1, 0]).unwrap();
        let ev2 = massiveness_sequence(&l2, &omega2, o2, x1, &p2(), &[4, 8, 16, 32, 64], &Default::default())
            .unwrap();
        assert!(ev2.monotone);
        assert_eq!(ev2.verdict, MassiveVerdict::NonMassiveLike, "{ev2:?}");
        assert!(matches!(
            massiveness_sequence(&l2, &omega2, o2, o2, &p2(), &[4], &Default::default()),
            Err(Error::X0OutsideOmega(_))
        ));
    }

    #[test]
    fn finite_hole_is_dp_massive_like() {
        let l = lattice_box(3, 17, None).unwrap();
        let o = l.window.origin();
        let omega = VertexSet::new(&l.graph, [o]).unwrap().complement(&l.graph);
        let ev = dp_massiveness_probe(&l, &omega, &omega, o, &p2(), &[4, 8, 16], &Default::default()).unwrap();
        assert!(ev.capacity_flattens);
        assert_eq!(ev.verdict, DpVerdict::DpMassiveLike, "{ev:?}");
        let bigger = halfspace_set(&l, 0, Some(-3), None);
        assert_eq!(
            dp_massiveness_probe(&l, &omega, &bigger.union(&omega.complement(&l.graph)), o, &p2(), &[4], &Default::default())
                .unwrap_err(),
            Error::Omega1NotSubset
        );
    }

    #[test]
    fn opposite_halfspaces_separate() {
        let l = lattice_box(3, 17, None).unwrap();
        let o = l.window.origin();
        let up = halfspace_set(&l, 0, Some(2), None);
        let down = halfspace_set(&l, 0, None, Some(-2));
        let rep = liouville_construct(&l, &up, &down, o, &p2(), 16, &Default::default()).unwrap();
        assert!(rep.margin > 0.2, "{rep:?}");
        assert!(rep.omega1.sup <= 1.0 && rep.omega2.inf >= 0.0);
        assert_eq!(
            liouville_construct(&l, &up, &up, o, &p2(), 16, &Default::default()).unwrap_err(),
            Error::SetsIntersect
        );
        let empty = VertexSet::empty(&l.graph);
        assert!(liouville_construct(&l, &up, &empty, o, &p2(), 16, &Default::default()).is_err());
    }

    #[test]
    fn uniqueness_gap_tracks_massiveness() {
        let l = lattice_box(3, 17, None).unwrap();
        let o = l.window.origin();
        let omega = VertexSet::new(&l.graph, [o]).unwrap().complement(&l.graph);
        let x0 = l.window.id(&[1, 0, 0]).unwrap();
        let gap = uniqueness_gap_probe(&l, &omega, o, x0, |_| 0.0, 1.0, &p2(), &[4, 8, 16], &Default::default())
            .unwrap();
        for pt in &gap.points {
            assert!(pt.minimal_sup.abs() < 1e-12);
            assert!(pt.inflated_at_x0 > 0.2);
        }
        let g = lattice_box(1, 5, None).unwrap().graph;
        let all_but = VertexSet::new(&g, [0]).unwrap().complement(&g);
        assert!(uniqueness_gap_probe(&WholeGraph(&g), &all_but, 5, 5, |_| 0.0, 1.0, &p2(), &[3], &Default::default()).is_ok());
    }
}
