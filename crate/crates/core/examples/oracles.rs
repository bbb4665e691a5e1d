//! The independent references: brute-force energy minimization, the direct
//! linear solve and random walks.

use pharmonic::capacity::{capacity, Condenser};
use pharmonic::graph::{VertexSet, WeightedGraph};
use pharmonic::lattice::lattice_box;
use pharmonic::oracles::{bruteforce_condenser, mc_escape_probability};
use pharmonic::plaplace::PExponent;

fn main() -> pharmonic::Result<()> {
    let edges = [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 4, 1.0), (4, 3, 3.0), (1, 4, 0.7)];
    let g = WeightedGraph::from_edges(5, &edges)?;
    for p in [1.3, 2.0, 3.5] {
        let c = Condenser::new(VertexSet::new(&g, [0])?, VertexSet::new(&g, [3])?, PExponent::new(p)?);
        let solved = capacity(&g, &c, &Default::default())?;
        let brute = bruteforce_condenser(&g, &c, 9)?;
        println!("p={p}: solver {:.12} brute force {:.12} (spread {:.1e})", solved.value, brute.value, brute.spread);
    }
    let lat = lattice_box(2, 20, None)?;
    let o = lat.window.origin();
    let punctured = VertexSet::new(&lat.graph, [o])?.complement(&lat.graph);
    let start = lat.window.id(&[1, 0]).unwrap();
    for e in mc_escape_probability(&lat, &punctured, o, start, 10_000, &[5, 10, 20], 3)? {
        println!("walks from (1,0) reaching distance {:<2} before the origin: {:.3} +- {:.3}", e.radius, e.estimate, e.stderr);
    }
    Ok(())
}
