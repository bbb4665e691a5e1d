//! Weighted graphs, hop metric and set calculus.
//!
//! Vertices are dense ids `0..n`. Adjacency is stored in CSR form with both
//! orientations of every undirected edge, so `neighbors(x)` is a contiguous
//! slice. The canonical vertex measure `mu(x) = sum_y mu_xy` is computed once
//! at construction.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub type VertexId = usize;

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_graph_id() -> u64 {
    NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed)
}

/// Immutable symmetric weighted graph.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    id: u64,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    measure: Vec<f64>,
    vertex_weight: Option<Vec<f64>>,
}

impl WeightedGraph {
    /// Builds a graph from undirected edges `(x, y, weight)`.
    ///
    /// Each edge must appear once; `(x, y)` and `(y, x)` count as the same edge.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId, f64)]) -> Result<Self> {
        let mut directed: Vec<(u32, u32, f64)> = Vec::with_capacity(2 * edges.len());
        for &(x, y, w) in edges {
            for id in [x, y] {
                if id >= vertex_count {
                    return Err(Error::IdOutOfRange { id, vertex_count });
                }
            }
            if x == y {
                return Err(Error::SelfLoop(x));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { x, y, weight: w });
            }
            directed.push((x as u32, y as u32, w));
            directed.push((y as u32, x as u32, w));
        }
        directed.sort_unstable_by_key(|&(x, y, _)| (x, y));
        for pair in directed.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                let (x, y) = (pair[0].0 as usize, pair[0].1 as usize);
                return Err(Error::DuplicateEdge(x.min(y), x.max(y)));
            }
        }
        let mut offsets = vec![0usize; vertex_count + 1];
        for &(x, _, _) in &directed {
            offsets[x as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = directed.iter().map(|e| e.1).collect();
        let weights = directed.iter().map(|e| e.2).collect();
        Ok(Self::from_csr(offsets, targets, weights))
    }

    /// Assembles a graph from CSR arrays that are already symmetric, sorted
    /// per row and free of loops and duplicates. Used by the lattice generator.
    pub(crate) fn from_csr(offsets: Vec<usize>, targets: Vec<u32>, weights: Vec<f64>) -> Self {
        let n = offsets.len() - 1;
        let measure = (0..n)
            .map(|x| weights[offsets[x]..offsets[x + 1]].iter().sum())
            .collect();
        WeightedGraph {
            id: fresh_graph_id(),
            offsets,
            targets,
            weights,
            measure,
            vertex_weight: None,
        }
    }

    /// Replaces the vertex weight `m` used by [`crate::plaplace::p_laplacian_at`].
    /// Capacities and energies never depend on it.
    pub fn with_vertex_weight(mut self, m: Vec<f64>) -> Result<Self> {
        if m.len() != self.vertex_count() {
            return Err(Error::InvalidMeasure(format!(
                "expected {} entries, got {}",
                self.vertex_count(),
                m.len()
            )));
        }
        if let Some(bad) = m.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-positive entry {bad}")));
        }
        self.vertex_weight = Some(m);
        self.id = fresh_graph_id();
        Ok(self)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, x: VertexId) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Neighbors of `x` with edge weights, in increasing id order.
    pub fn neighbors(&self, x: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&y, &w)| (y as usize, w))
    }

    pub(crate) fn raw_neighbors(&self, x: VertexId) -> (&[u32], &[f64]) {
        let range = self.offsets[x]..self.offsets[x + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub fn weight(&self, x: VertexId, y: VertexId) -> Option<f64> {
        let (targets, weights) = self.raw_neighbors(x);
        targets
            .binary_search(&(y as u32))
            .ok()
            .map(|i| weights[i])
    }

    /// Canonical measure `mu(x) = sum_{y ~ x} mu_xy`.
    pub fn measure(&self, x: VertexId) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// Vertex weight `m(x)`; the canonical measure unless overridden.
    pub fn vertex_weight(&self, x: VertexId) -> f64 {
        match &self.vertex_weight {
            Some(m) => m[x],
            None => self.measure[x],
        }
    }

    /// Unordered edges `(x, y, w)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |x| {
            self.neighbors(x)
                .filter(move |&(y, _)| x < y)
                .map(move |(y, w)| (x, y, w))
        })
    }

    /// Sum of the canonical measure over a set.
    pub fn set_measure(&self, set: &VertexSet) -> f64 {
        set.iter().map(|x| self.measure[x]).sum()
    }

    pub fn check_vertex(&self, id: VertexId) -> Result<()> {
        if id < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::IdOutOfRange {
                id,
                vertex_count: self.vertex_count(),
            })
        }
    }

    /// Hop distances from `source`, `u32::MAX` where unreachable. Stops
    /// expanding past `max_radius` when given.
    pub fn distances_from(&self, source: VertexId, max_radius: Option<usize>) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let limit = max_radius.map(|r| r as u32).unwrap_or(u32::MAX - 1);
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x];
            if dx >= limit {
                continue;
            }
            for &y in self.raw_neighbors(x).0 {
                let y = y as usize;
                if dist[y] == u32::MAX {
                    dist[y] = dx + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Subgraph induced on `set`, with its own canonical measure, plus the map
    /// from new ids to old ids.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<(WeightedGraph, Vec<VertexId>)> {
        set.check_graph(self)?;
        let mut local = vec![u32::MAX; self.vertex_count()];
        for (i, x) in set.iter().enumerate() {
            local[x] = i as u32;
        }
        let mut offsets = Vec::with_capacity(set.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for x in set.iter() {
            for (y, w) in self.neighbors(x) {
                if local[y] != u32::MAX {
                    targets.push(local[y]);
                    weights.push(w);
                }
            }
            offsets.push(targets.len());
        }
        Ok((
            WeightedGraph::from_csr(offsets, targets, weights),
            set.ids.clone(),
        ))
    }
}

/// Sorted, duplicate-free set of vertices of one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    graph_id: u64,
    ids: Vec<VertexId>,
}

impl VertexSet {
    pub fn new<I: IntoIterator<Item = VertexId>>(g: &WeightedGraph, ids: I) -> Result<Self> {
        let mut ids: Vec<VertexId> = ids.into_iter().collect();
        for &id in &ids {
            g.check_vertex(id)?;
        }
        ids.sort_unstable();
        ids.dedup();
        Ok(VertexSet {
            graph_id: g.id(),
            ids,
        })
    }

    pub fn empty(g: &WeightedGraph) -> Self {
        VertexSet {
            graph_id: g.id(),
            ids: Vec::new(),
        }
    }

    pub fn all(g: &WeightedGraph) -> Self {
        VertexSet {
            graph_id: g.id(),
            ids: (0..g.vertex_count()).collect(),
        }
    }

    /// Builds the set of vertices whose mask entry is true.
    pub fn from_mask(g: &WeightedGraph, mask: &[bool]) -> Self {
        debug_assert_eq!(mask.len(), g.vertex_count());
        VertexSet {
            graph_id: g.id(),
            ids: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        }
    }

    pub fn from_predicate(g: &WeightedGraph, mut pred: impl FnMut(VertexId) -> bool) -> Self {
        VertexSet {
            graph_id: g.id(),
            ids: (0..g.vertex_count()).filter(|&x| pred(x)).collect(),
        }
    }

    pub fn graph_id(&self) -> u64 {
        self.graph_id
    }

    pub fn check_graph(&self, g: &WeightedGraph) -> Result<()> {
        if self.graph_id == g.id() {
            Ok(())
        } else {
            Err(Error::ForeignVertexSet)
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ids.iter().copied()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.ids.binary_search(&x).is_ok()
    }

    pub fn mask(&self, vertex_count: usize) -> Vec<bool> {
        let mut mask = vec![false; vertex_count];
        for &x in &self.ids {
            mask[x] = true;
        }
        mask
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut ids = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.ids.len() && j < other.ids.len() {
            let (a, b) = (self.ids[i], other.ids[j]);
            ids.push(a.min(b));
            i += (a <= b) as usize;
            j += (b <= a) as usize;
        }
        ids.extend_from_slice(&self.ids[i..]);
        ids.extend_from_slice(&other.ids[j..]);
        VertexSet {
            graph_id: self.graph_id,
            ids,
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            graph_id: self.graph_id,
            ids: self.iter().filter(|&x| other.contains(x)).collect(),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            graph_id: self.graph_id,
            ids: self.iter().filter(|&x| !other.contains(x)).collect(),
        }
    }

    pub fn complement(&self, g: &WeightedGraph) -> VertexSet {
        let mask = self.mask(g.vertex_count());
        VertexSet::from_predicate(g, |x| !mask[x])
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().all(|x| !large.contains(x))
    }
}

/// Hop distance between two vertices, `None` when they lie in different components.
pub fn graph_distance(g: &WeightedGraph, x: VertexId, y: VertexId) -> Option<usize> {
    if x == y {
        return Some(0);
    }
    let mut dist = vec![u32::MAX; g.vertex_count()];
    dist[x] = 0;
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        for &w in g.raw_neighbors(v).0 {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                if w == y {
                    return Some(dist[w] as usize);
                }
                queue.push_back(w);
            }
        }
    }
    None
}

/// Closed ball `B(center, r)` in the hop metric.
pub fn ball(g: &WeightedGraph, center: VertexId, r: usize) -> VertexSet {
    let dist = g.distances_from(center, Some(r));
    VertexSet::from_predicate(g, |x| (dist[x] as usize) <= r)
}

/// Vertices outside `omega` adjacent to it.
pub fn vertex_boundary(g: &WeightedGraph, omega: &VertexSet) -> VertexSet {
    let inside = omega.mask(g.vertex_count());
    let mut outside = vec![false; g.vertex_count()];
    for x in omega.iter() {
        for &y in g.raw_neighbors(x).0 {
            if !inside[y as usize] {
                outside[y as usize] = true;
            }
        }
    }
    VertexSet::from_mask(g, &outside)
}

/// Edges leaving `omega`, oriented `(x in omega, y in boundary, weight)`.
pub fn edge_boundary(g: &WeightedGraph, omega: &VertexSet) -> Vec<(VertexId, VertexId, f64)> {
    let inside = omega.mask(g.vertex_count());
    omega
        .iter()
        .flat_map(|x| {
            g.neighbors(x)
                .filter(|&(y, _)| !inside[y])
                .map(move |(y, w)| (x, y, w))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn closure(g: &WeightedGraph, omega: &VertexSet) -> VertexSet {
    omega.union(&vertex_boundary(g, omega))
}

/// Connected component of the subgraph induced on `omega` that contains `x`.
pub fn component_of(g: &WeightedGraph, omega: &VertexSet, x: VertexId) -> Result<VertexSet> {
    if !omega.contains(x) {
        return Err(Error::XNotInSet(x));
    }
    let inside = omega.mask(g.vertex_count());
    Ok(VertexSet::from_mask(g, &flood(g, &inside, x)))
}

pub(crate) fn flood(g: &WeightedGraph, inside: &[bool], start: VertexId) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.raw_neighbors(v).0 {
            let w = w as usize;
            if inside[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Smallest `p0` for which `mu_xy / mu(x) >= 1/p0` holds on every edge.
/// Returns 0 for an edgeless graph, where every `p0` works.
pub fn check_p0(g: &WeightedGraph) -> f64 {
    (0..g.vertex_count())
        .flat_map(|x| g.neighbors(x).map(move |(_, w)| g.measure(x) / w))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        WeightedGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn single_edge_measure() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.measure(0), 1.0);
        assert_eq!(g.measure(1), 1.0);
        assert_eq!(path(3).measure(1), 2.0);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            WeightedGraph::from_edges(2, &[(0, 1, 0.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, &[(1, 1, 1.0)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, &[(0, 2, 1.0)]),
            Err(Error::IdOutOfRange { id: 2, .. })
        ));
        assert!(WeightedGraph::from_edges(2, &[(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn distances_and_balls() {
        let g = path(3);
        assert_eq!(graph_distance(&g, 0, 2), Some(2));
        assert_eq!(graph_distance(&g, 1, 1), Some(0));
        assert_eq!(ball(&g, 1, 1).ids(), &[0, 1, 2]);
        assert_eq!(ball(&g, 2, 0).ids(), &[2]);
        let split = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(graph_distance(&split, 0, 2), None);
    }

    #[test]
    fn boundaries() {
        let g = path(3);
        let omega = VertexSet::new(&g, [1]).unwrap();
        assert_eq!(vertex_boundary(&g, &omega).ids(), &[0, 2]);
        assert_eq!(edge_boundary(&g, &omega).len(), 2);
        assert_eq!(closure(&g, &omega).ids(), &[0, 1, 2]);
        assert!(vertex_boundary(&g, &VertexSet::all(&g)).is_empty());
    }

    #[test]
    fn components() {
        let g = path(3);
        let omega = VertexSet::new(&g, [0, 2]).unwrap();
        assert_eq!(component_of(&g, &omega, 0).unwrap().ids(), &[0]);
        assert_eq!(
            component_of(&g, &VertexSet::all(&g), 1).unwrap(),
            VertexSet::all(&g)
        );
        assert_eq!(component_of(&g, &omega, 1), Err(Error::XNotInSet(1)));
    }

    #[test]
    fn p0_values() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(check_p0(&g), 1.0);
        let star = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (0, 2, 2.0)]).unwrap();
        assert_eq!(check_p0(&star), 3.0);
    }

    #[test]
    fn set_algebra() {
        let g = path(5);
        let a = VertexSet::new(&g, [3, 1, 1]).unwrap();
        let b = VertexSet::new(&g, [1, 4]).unwrap();
        assert_eq!(a.ids(), &[1, 3]);
        assert_eq!(a.union(&b).ids(), &[1, 3, 4]);
        assert_eq!(a.intersection(&b).ids(), &[1]);
        assert_eq!(a.difference(&b).ids(), &[3]);
        assert_eq!(a.complement(&g).ids(), &[0, 2, 4]);
        assert!(!a.is_disjoint(&b));
        let other = path(5);
        assert_eq!(a.check_graph(&other), Err(Error::ForeignVertexSet));
    }

    #[test]
    fn induced_subgraph_restricts_measure() {
        let g = path(4);
        let set = VertexSet::new(&g, [1, 2, 3]).unwrap();
        let (sub, map) = g.induced_subgraph(&set).unwrap();
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(sub.measure(0), 1.0);
    }
}
