//! Capacity of the origin to infinity in Z^1, Z^2 and Z^3, with a random-walk
//! cross-check for the linear case.

use pharmonic::graph::VertexSet;
use pharmonic::lattice::lattice_box;
use pharmonic::massiveness::parabolicity_sequence;
use pharmonic::oracles::mc_point_capacity;
use pharmonic::plaplace::PExponent;

fn main() -> pharmonic::Result<()> {
    let p = PExponent::new(2.0)?;
    let radii = [2, 4, 8, 16, 32];
    for d in 1..=3 {
        let lat = lattice_box(d, 33, None)?;
        let o = lat.window.origin();
        let k = VertexSet::new(&lat.graph, [o])?;
        let ev = parabolicity_sequence(&lat, o, &k, &p, &radii, &Default::default())?;
        let values: Vec<String> = ev.sequence.points.iter().map(|pt| format!("{:.5}", pt.value)).collect();
        println!("Z^{d}: {} -> {:?}", values.join(" "), ev.verdict);
        if d == 3 {
            for e in mc_point_capacity(&lat, o, 2000, &radii, 1)? {
                println!("      walks R={:<2} {:.4} +- {:.4}", e.radius, e.estimate, e.stderr);
            }
        }
    }
    Ok(())
}
