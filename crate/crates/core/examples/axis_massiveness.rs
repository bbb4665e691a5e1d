//! The complement of a coordinate axis in Z^3: the exhaustion sequence for
//! p-massiveness and the D_p probe.

use pharmonic::lattice::{axis_set, lattice_box};
use pharmonic::massiveness::{dp_massiveness_probe, massiveness_sequence};
use pharmonic::plaplace::PExponent;

fn main() -> pharmonic::Result<()> {
    let lat = lattice_box(3, 33, None)?;
    let o = lat.window.origin();
    let omega = axis_set(&lat).complement(&lat.graph);
    let x0 = lat.window.id(&[0, 1, 0]).unwrap();
    let radii = [4, 8, 16, 32];
    for p in [2.0, 1.5] {
        let pe = PExponent::new(p)?;
        let ev = massiveness_sequence(&lat, &omega, o, x0, &pe, &radii, &Default::default())?;
        let v: Vec<String> = ev.sequence.points.iter().map(|pt| format!("{:.4}", pt.value)).collect();
        println!("p={p}: v_R(x0) = {}  limit {:.4} -> {:?}", v.join(" "), ev.limit, ev.verdict);
    }
    let pe = PExponent::new(1.5)?;
    let dp = dp_massiveness_probe(&lat, &omega, &omega, o, &pe, &radii, &Default::default())?;
    let c: Vec<String> = dp.capacity.points.iter().map(|pt| format!("{:.3}", pt.value)).collect();
    println!("p=1.5 D_p probe: capacities {} -> {:?}", c.join(" "), dp.verdict);
    Ok(())
}
