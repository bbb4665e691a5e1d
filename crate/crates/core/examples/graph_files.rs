//! Writes a weighted graph in `pgraph v1` form, reads it back and reports the
//! capacity between two marked vertices.

use pharmonic::capacity::{capacity, Condenser};
use pharmonic::graph::VertexSet;
use pharmonic::io::{read_pgraph, write_pgraph, write_solution_csv};
use pharmonic::plaplace::PExponent;
use pharmonic::selftest::random_connected_graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pharmonic::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let g = random_connected_graph(16, 12, (0.1, 10.0), &mut rng)?;
    let mut text = Vec::new();
    write_pgraph(&g, &mut text)?;
    println!("{}", String::from_utf8_lossy(&text).lines().take(4).collect::<Vec<_>>().join("\n"));
    let back = read_pgraph(text.as_slice())?;
    let p = PExponent::new(2.5)?;
    let c = Condenser::new(VertexSet::new(&back, [0])?, VertexSet::new(&back, [15])?, p);
    let res = capacity(&back, &c, &Default::default())?;
    println!("...\ncap_2.5(0, 15) = {:.10}", res.value);
    let mut csv = Vec::new();
    write_solution_csv(&back, &res.potential, &p, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv).lines().take(4).map(|l| format!("{l}\n")).collect::<String>());
    Ok(())
}
