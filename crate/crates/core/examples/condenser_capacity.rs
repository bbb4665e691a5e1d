//! Series law on a path, flux through level sets and the mass of -Delta_p u.

use pharmonic::capacity::{capacity, level_set_flux, level_set_sandwich_check, sigma_measure, Condenser};
use pharmonic::graph::{VertexSet, WeightedGraph};
use pharmonic::plaplace::{PExponent, SolverOptions};

fn main() -> pharmonic::Result<()> {
    let n = 10;
    let edges: Vec<_> = (0..n).map(|i| (i, i + 1, 1.0)).collect();
    let g = WeightedGraph::from_edges(n + 1, &edges)?;
    let opts = SolverOptions::default();
    for p in [1.5, 2.0, 3.0] {
        let pe = PExponent::new(p)?;
        let c = Condenser::new(VertexSet::new(&g, [0])?, VertexSet::new(&g, [n])?, pe);
        let res = capacity(&g, &c, &opts)?;
        let u = &res.potential.u;
        let flux: Vec<f64> = [0.0, 0.25, 0.5, 1.0].iter().map(|&t| level_set_flux(&g, u, t, &pe)).collect();
        let sigma: f64 = sigma_measure(&g, u, &pe)[0];
        println!(
            "p={p}: cap={:.10} (n^(1-p)={:.10})  flux at t=0,.25,.5,1: {:.8?}  sigma(K)={:.10}",
            res.value,
            (n as f64).powf(1.0 - p),
            flux,
            sigma
        );
        let s = level_set_sandwich_check(&g, &c, 0.5, &opts)?;
        println!("        level-set sandwich {:.6} <= {:.6} <= {:.6}: {}", s.lhs, s.mid, s.rhs, s.holds);
    }
    Ok(())
}
