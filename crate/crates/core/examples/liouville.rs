//! Two disjoint half-spaces in Z^3 are separated by a bounded p-harmonic
//! function, and the Dirichlet problem outside a point is not unique.

use pharmonic::graph::VertexSet;
use pharmonic::lattice::{halfspace_set, lattice_box};
use pharmonic::massiveness::{liouville_construct, uniqueness_gap_probe};
use pharmonic::plaplace::PExponent;

fn main() -> pharmonic::Result<()> {
    let lat = lattice_box(3, 17, None)?;
    let o = lat.window.origin();
    let p = PExponent::new(2.0)?;
    let up = halfspace_set(&lat, 0, Some(2), None);
    let down = halfspace_set(&lat, 0, None, Some(-2));
    let rep = liouville_construct(&lat, &up, &down, o, &p, 16, &Default::default())?;
    println!(
        "half-spaces: inf on the upper core {:.4}, sup on the lower core {:.4}, margin {:.4}",
        rep.core1.inf, rep.core2.sup, rep.margin
    );
    let omega = VertexSet::new(&lat.graph, [o])?.complement(&lat.graph);
    let x0 = lat.window.id(&[1, 0, 0]).unwrap();
    let gap = uniqueness_gap_probe(&lat, &omega, o, x0, |_| 0.0, 1.0, &p, &[4, 8, 16], &Default::default())?;
    for pt in &gap.points {
        println!("R={:<2} minimal {:.4} inflated {:.4} gap {:.4}", pt.radius, pt.minimal_at_x0, pt.inflated_at_x0, pt.gap);
    }
    Ok(())
}
