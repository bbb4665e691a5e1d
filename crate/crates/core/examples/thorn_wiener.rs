//! Wiener terms of thorns {x_1 >= 0, |x'| <= f(x_1)} in Z^3 with p = 1.5.
//! The first argument is the number of dyadic scales (default 4).

use pharmonic::lattice::{lattice_box, thorn_set, Profile};
use pharmonic::plaplace::PExponent;
use pharmonic::wiener::{wiener_report, WienerOptions};

fn main() -> pharmonic::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let lat = lattice_box(3, (1 << (n + 1)) + 1, None)?;
    let o = lat.window.origin();
    let p = PExponent::new(1.5)?;
    for alpha in [0.5, 1.0] {
        let thorn = thorn_set(&lat, &Profile::Power { alpha, scale: 1.0 });
        let rep = wiener_report(&lat, o, &thorn, &p, n, &WienerOptions::default())?;
        let terms: Vec<String> = rep.scales.iter().map(|s| format!("{:.4}", s.term_main)).collect();
        println!(
            "f(n)=n^{alpha}: terms {} ratio {:.3} -> {:?}",
            terms.join(" "),
            rep.fit.ratio,
            rep.classification
        );
    }
    Ok(())
}
