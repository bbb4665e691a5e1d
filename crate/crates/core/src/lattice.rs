//! Truncations of the integer lattice `Z^d` and the example sets living on
//! them: thorns, cylinders, coordinate axes, balls and half-spaces.
//!
//! A window is the L-infinity box `{-R..R}^d`. Vertex ids enumerate the box
//! lexicographically with the last coordinate varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball, VertexId, VertexSet, WeightedGraph};

/// Default cap on the number of lattice vertices a window may have.
pub const DEFAULT_VERTEX_BUDGET: usize = 8_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWindow {
    dim: usize,
    radius: i64,
    weight: f64,
    side: i64,
}

impl LatticeWindow {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn vertex_count(&self) -> usize {
        (self.side as usize).pow(self.dim as u32)
    }

    pub fn id(&self, coords: &[i64]) -> Option<VertexId> {
        if coords.len() != self.dim {
            return None;
        }
        let mut id = 0i64;
        for &c in coords {
            if c.abs() > self.radius {
                return None;
            }
            id = id * self.side + (c + self.radius);
        }
        Some(id as VertexId)
    }

    pub fn coords(&self, id: VertexId) -> Vec<i64> {
        let mut out = vec![0; self.dim];
        self.coords_into(id, &mut out);
        out
    }

    pub fn coords_into(&self, id: VertexId, out: &mut [i64]) {
        let mut rest = id as i64;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.side - self.radius;
            rest /= self.side;
        }
    }

    pub fn origin(&self) -> VertexId {
        self.id(&vec![0; self.dim]).expect("origin lies in every window")
    }

    /// True when `id` sits on the faces of the box, where the truncated
    /// adjacency differs from the one of `Z^d`.
    pub fn is_frontier(&self, id: VertexId) -> bool {
        let mut c = vec![0; self.dim];
        self.coords_into(id, &mut c);
        c.iter().any(|x| x.abs() == self.radius)
    }

    /// Whether the hop ball `B(center, r)` avoids the frontier, so that every
    /// vertex in it has its full set of `2d` lattice neighbors.
    pub fn ball_is_interior(&self, center: VertexId, r: usize) -> bool {
        let c = self.coords(center);
        let reach = c.iter().map(|x| x.abs()).max().unwrap_or(0) + r as i64;
        reach < self.radius
    }
}

/// A lattice window together with its graph.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub graph: WeightedGraph,
    pub window: LatticeWindow,
}

/// Something that can answer "does this ball lie inside the computational
/// window". Finite graphs that are not truncations of anything always can.
pub trait GraphWindow {
    fn graph(&self) -> &WeightedGraph;
    fn ball_is_interior(&self, center: VertexId, r: usize) -> bool;
    /// Window radius reported in outputs; `None` for untruncated graphs.
    fn window_radius(&self) -> Option<i64> {
        None
    }
}

impl GraphWindow for Lattice {
    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn ball_is_interior(&self, center: VertexId, r: usize) -> bool {
        self.window.ball_is_interior(center, r)
    }

    fn window_radius(&self) -> Option<i64> {
        Some(self.window.radius)
    }
}

/// A finite graph used as-is: it is the whole space.
pub struct WholeGraph<'a>(pub &'a WeightedGraph);

impl GraphWindow for WholeGraph<'_> {
    fn graph(&self) -> &WeightedGraph {
        self.0
    }

    fn ball_is_interior(&self, _center: VertexId, _r: usize) -> bool {
        true
    }
}

/// `Z^d` truncated to `{-R..R}^d` with nearest-neighbor edges of weight `w`
/// (`1/(2d)` when `None`).
pub fn lattice_box(dim: usize, radius: usize, weight: Option<f64>) -> Result<Lattice> {
    lattice_box_with_budget(dim, radius, weight, DEFAULT_VERTEX_BUDGET)
}

pub fn lattice_box_with_budget(
    dim: usize,
    radius: usize,
    weight: Option<f64>,
    budget: usize,
) -> Result<Lattice> {
    if dim == 0 || radius == 0 {
        return Err(Error::InvalidLattice(format!(
            "need d >= 1 and R >= 1, got d = {dim}, R = {radius}"
        )));
    }
    let weight = weight.unwrap_or(1.0 / (2 * dim) as f64);
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(Error::InvalidLattice(format!("weight must be positive, got {weight}")));
    }
    let side = 2 * radius as u128 + 1;
    let requested = side.checked_pow(dim as u32).unwrap_or(u128::MAX);
    if requested > budget as u128 {
        return Err(Error::SizeOverflow { requested, budget });
    }
    let window = LatticeWindow {
        dim,
        radius: radius as i64,
        weight,
        side: side as i64,
    };
    let n = window.vertex_count();
    // stride of coordinate k in the id
    let strides: Vec<usize> = (0..dim)
        .map(|k| (side as usize).pow((dim - 1 - k) as u32))
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::with_capacity(2 * dim * n);
    let mut coords = vec![0i64; dim];
    offsets.push(0);
    for id in 0..n {
        window.coords_into(id, &mut coords);
        // ascending id order: -stride for the slowest coordinate first
        for k in 0..dim {
            if coords[k] > -window.radius {
                targets.push((id - strides[k]) as u32);
            }
        }
        for k in (0..dim).rev() {
            if coords[k] < window.radius {
                targets.push((id + strides[k]) as u32);
            }
        }
        offsets.push(targets.len());
    }
    let weights = vec![weight; targets.len()];
    let graph = WeightedGraph::from_csr(offsets, targets, weights);
    Ok(Lattice { graph, window })
}

/// Radius profile `f` of a thorn `{x_1 >= 0, |x'| <= f(x_1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    /// `f(n) = scale * n^alpha`
    Power {
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Constant { value: f64 },
}

fn one() -> f64 {
    1.0
}

impl Profile {
    pub fn eval(&self, n: i64) -> f64 {
        match *self {
            Profile::Power { alpha, scale } => scale * (n as f64).powf(alpha),
            Profile::Constant { value } => value,
        }
    }

    /// Exact integer form of `f(n)^2` when `f` is an integer multiple of a
    /// half-integer power.
    fn square_exact(&self, n: i64) -> Option<u128> {
        let (scale, twice_alpha) = match *self {
            Profile::Power { alpha, scale } => (scale, 2.0 * alpha),
            Profile::Constant { value } => (value, 0.0),
        };
        let integral = |v: f64| v >= 0.0 && v.fract() == 0.0 && v < 1e9;
        if !integral(scale) || !integral(twice_alpha) {
            return None;
        }
        let base = (n as u128).checked_pow(twice_alpha as u32)?;
        base.checked_mul((scale as u128).pow(2))
    }

    /// `|x'|^2 <= f(n)^2`, exact when the profile allows it.
    pub fn admits(&self, n: i64, norm_sq: u128) -> bool {
        match self.square_exact(n) {
            Some(bound) => norm_sq <= bound,
            None => (norm_sq as f64).sqrt() <= self.eval(n),
        }
    }
}

fn transverse_norm_sq(coords: &[i64]) -> u128 {
    coords[1..].iter().map(|&c| (c * c) as u128).sum()
}

fn lattice_set(lat: &Lattice, mut pred: impl FnMut(&[i64]) -> bool) -> VertexSet {
    let mut coords = vec![0i64; lat.window.dim];
    VertexSet::from_predicate(&lat.graph, |id| {
        lat.window.coords_into(id, &mut coords);
        pred(&coords)
    })
}

/// Thorn `{(x_1, x') : x_1 >= 0, |x'| <= f(x_1)}` clipped to the window.
pub fn thorn_set(lat: &Lattice, f: &Profile) -> VertexSet {
    lattice_set(lat, |c| c[0] >= 0 && f.admits(c[0], transverse_norm_sq(c)))
}

/// Cylinder `{0 <= x_1 <= h, |x'| <= r}`.
pub fn cylinder_set(lat: &Lattice, h: i64, r: i64) -> VertexSet {
    let r_sq = (r * r) as u128;
    lattice_set(lat, |c| {
        (0..=h).contains(&c[0]) && transverse_norm_sq(c) <= r_sq
    })
}

/// The coordinate axis `Z x {0}^{d-1}` inside the window.
pub fn axis_set(lat: &Lattice) -> VertexSet {
    lattice_set(lat, |c| c[1..].iter().all(|&x| x == 0))
}

/// Half-space `{min <= x_axis <= max}` (either bound optional).
pub fn halfspace_set(lat: &Lattice, axis: usize, min: Option<i64>, max: Option<i64>) -> VertexSet {
    lattice_set(lat, |c| {
        min.map_or(true, |m| c[axis] >= m) && max.map_or(true, |m| c[axis] <= m)
    })
}

/// JSON set description evaluated against a lattice window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SetSpec {
    Thorn { f: Profile },
    Cylinder { h: i64, r: i64 },
    Axis {},
    Ball {
        #[serde(default)]
        center: Option<Vec<i64>>,
        radius: usize,
    },
    Halfspace {
        #[serde(default)]
        axis: usize,
        #[serde(default)]
        min: Option<i64>,
        #[serde(default)]
        max: Option<i64>,
    },
    /// The faces of the window box.
    Frontier {},
    Points { points: Vec<Vec<i64>> },
    Ids { ids: Vec<usize> },
    Complement { of: Box<SetSpec> },
    Union { sets: Vec<SetSpec> },
    Intersection { sets: Vec<SetSpec> },
}

impl SetSpec {
    pub fn evaluate(&self, lat: &Lattice) -> Result<VertexSet> {
        let g = &lat.graph;
        let dim = lat.window.dim;
        let point = |c: &Vec<i64>| {
            lat.window.id(c).ok_or_else(|| {
                Error::SetSpec(format!("point {c:?} outside the window or wrong dimension"))
            })
        };
        Ok(match self {
            SetSpec::Thorn { f } => thorn_set(lat, f),
            SetSpec::Cylinder { h, r } => cylinder_set(lat, *h, *r),
            SetSpec::Axis {} => axis_set(lat),
            SetSpec::Ball { center, radius } => {
                let c = match center {
                    Some(c) => point(c)?,
                    None => lat.window.origin(),
                };
                ball(g, c, *radius)
            }
            SetSpec::Halfspace { axis, min, max } => {
                if *axis >= dim {
                    return Err(Error::SetSpec(format!("axis {axis} >= dimension {dim}")));
                }
                halfspace_set(lat, *axis, *min, *max)
            }
            SetSpec::Frontier {} => VertexSet::from_predicate(g, |x| lat.window.is_frontier(x)),
            SetSpec::Points { points } => {
                VertexSet::new(g, points.iter().map(point).collect::<Result<Vec<_>>>()?)?
            }
            SetSpec::Ids { ids } => VertexSet::new(g, ids.iter().copied())?,
            SetSpec::Complement { of } => of.evaluate(lat)?.complement(g),
            SetSpec::Union { sets } => {
                let mut acc = VertexSet::empty(g);
                for s in sets {
                    acc = acc.union(&s.evaluate(lat)?);
                }
                acc
            }
            SetSpec::Intersection { sets } => {
                let mut iter = sets.iter();
                let mut acc = match iter.next() {
                    Some(s) => s.evaluate(lat)?,
                    None => return Err(Error::SetSpec("empty intersection".into())),
                };
                for s in iter {
                    acc = acc.intersection(&s.evaluate(lat)?);
                }
                acc
            }
        })
    }

    /// Evaluates the set description on an arbitrary graph; only `ids` and the set
    /// algebra are available there.
    pub fn evaluate_on_graph(&self, g: &WeightedGraph) -> Result<VertexSet> {
        Ok(match self {
            SetSpec::Ids { ids } => VertexSet::new(g, ids.iter().copied())?,
            SetSpec::Complement { of } => of.evaluate_on_graph(g)?.complement(g),
            SetSpec::Union { sets } => {
                let mut acc = VertexSet::empty(g);
                for s in sets {
                    acc = acc.union(&s.evaluate_on_graph(g)?);
                }
                acc
            }
            SetSpec::Intersection { sets } => {
                let mut iter = sets.iter();
                let mut acc = match iter.next() {
                    Some(s) => s.evaluate_on_graph(g)?,
                    None => return Err(Error::SetSpec("empty intersection".into())),
                };
                for s in iter {
                    acc = acc.intersection(&s.evaluate_on_graph(g)?);
                }
                acc
            }
            other => {
                return Err(Error::SetSpec(format!(
                    "set kind {:?} needs a lattice window",
                    serde_json::to_value(other)
                        .ok()
                        .and_then(|v| v.get("kind").cloned())
                        .unwrap_or_default()
                )))
            }
        })
    }
}
