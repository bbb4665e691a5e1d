//! Solves the Dirichlet problem for the p-Laplacian on a square of Z^2 and
//! compares the p = 2 case against the direct linear solve.

use pharmonic::graph::VertexSet;
use pharmonic::lattice::lattice_box;
use pharmonic::oracles::linear_dirichlet_p2;
use pharmonic::plaplace::{solve_dirichlet, PExponent, SolverOptions};

fn main() -> pharmonic::Result<()> {
    let lat = lattice_box(2, 20, None)?;
    let g = &lat.graph;
    let inside = VertexSet::from_predicate(g, |x| !lat.window.is_frontier(x));
    let data = |x: usize| {
        let c = lat.window.coords(x);
        if c[0] == 20 { 1.0 } else { 0.0 }
    };
    let probe = lat.window.id(&[10, 0]).unwrap();
    for p in [1.3, 2.0, 4.0] {
        let sol = solve_dirichlet(g, &inside, data, &PExponent::new(p)?, &SolverOptions::default())?;
        println!(
            "p={p:<4} method={:?} iterations={:<4} residual={:.2e} u(10,0)={:.6}",
            sol.method, sol.sweeps, sol.max_residual, sol.u[probe]
        );
        if p == 2.0 {
            let lin = linear_dirichlet_p2(g, &inside, data)?;
            let gap = inside.iter().map(|x| (lin.values[x] - sol.u[x]).abs()).fold(0.0, f64::max);
            println!("        {} oracle sup gap {gap:.2e}", lin.method);
        }
    }
    Ok(())
}
