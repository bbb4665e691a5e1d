//! Capacity of cylinders {0 <= x_1 <= h, |x'| <= r} in Z^3 against the window
//! faces, normalized by h r^(d-p-1). Pass a window radius (default 24).

use pharmonic::capacity::{capacity, Condenser};
use pharmonic::graph::VertexSet;
use pharmonic::lattice::{cylinder_set, lattice_box};
use pharmonic::plaplace::{PExponent, SolverOptions};

fn main() -> pharmonic::Result<()> {
    let radius: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(24);
    let lat = lattice_box(3, radius, None)?;
    let faces = VertexSet::from_predicate(&lat.graph, |x| lat.window.is_frontier(x));
    let p = PExponent::new(1.5)?;
    for r in [1, 2, 4] {
        let h = 4 * r;
        let c = Condenser::new(cylinder_set(&lat, h, r), faces.clone(), p);
        let res = capacity(&lat.graph, &c, &SolverOptions::default())?;
        let norm = res.value / (h as f64 * (r as f64).powf(3.0 - 1.5 - 1.0));
        println!("r={r} h={h}: cap={:.6} cap/(h r^0.5)={norm:.4}", res.value);
    }
    Ok(())
}
