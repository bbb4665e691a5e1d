//! Capacity of a ball inside a larger ball against the volume bound.

use pharmonic::capacity::ball_capacity_bounds_check;
use pharmonic::lattice::lattice_box;
use pharmonic::plaplace::{PExponent, SolverOptions};

fn main() -> pharmonic::Result<()> {
    for d in [2, 3] {
        let lat = lattice_box(d, 17, None)?;
        let o = lat.window.origin();
        for (r, big_r) in [(4, 8), (5, 9), (8, 16)] {
            for p in [1.5, 2.0] {
                let b = ball_capacity_bounds_check(&lat, o, r, big_r, &PExponent::new(p)?, &SolverOptions::default())?;
                println!(
                    "Z^{d} r={r:<2} R={big_r:<2} p={p}: cap={:>10.5} bound={:>10.3} holds={} cap*R^p/mu(B)={:.4}",
                    b.cap, b.upper_bound, b.upper_holds, b.ratio
                );
            }
        }
    }
    Ok(())
}
