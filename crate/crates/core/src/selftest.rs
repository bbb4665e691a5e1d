//! Invariant suite run by `pharmonic selftest`.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::capacity::{capacity, capacity_exhaustion, Condenser, SequenceOptions};
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::lattice::{lattice_box, thorn_set, Profile};
use crate::oracles::{bruteforce_condenser, linear_dirichlet_p2, mc_escape_probability};
use crate::plaplace::{
    greens_identity_check, solve_dirichlet, Method, PExponent, PotentialSolution, SolverOptions,
};
use crate::wiener::{wiener_report, WienerOptions};

/// Connected graph on `n` vertices: a random spanning tree plus up to `extra`
/// further edges, weights uniform in `[lo, hi)`.
pub fn random_connected_graph(
    n: usize,
    extra: usize,
    (lo, hi): (f64, f64),
    rng: &mut impl Rng,
) -> Result<WeightedGraph> {
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(n + extra);
    for y in 1..n {
        let x = rng.gen_range(0..y);
        seen.insert((x, y));
        edges.push((x, y, rng.gen_range(lo..hi)));
    }
    for _ in 0..extra {
        if n < 2 {
            break;
        }
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (x, y) = (a.min(b), a.max(b));
        if x != y && seen.insert((x, y)) {
            edges.push((x, y, rng.gen_range(lo..hi)));
        }
    }
    WeightedGraph::from_edges(n, &edges)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub bound: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Random graphs per check.
    pub graphs: usize,
    /// Solver tolerance used throughout.
    pub tol: f64,
    /// Largest pool used by the thread-count check.
    pub threads: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 7,
            graphs: 12,
            tol: 1e-10,
            threads: 4,
        }
    }
}

const EXPONENTS: [f64; 3] = [1.3, 2.0, 3.0];

struct Instance {
    g: WeightedGraph,
    omega: VertexSet,
    data: Vec<f64>,
}

fn instances(opts: &SelftestOptions, salt: u64) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..opts.graphs)
        .map(|_| {
            let n = rng.gen_range(12..60);
            let g = random_connected_graph(n, n, (0.1, 10.0), &mut rng)?;
            let mut omega: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            if omega.len() == n {
                omega.pop();
            }
            if omega.is_empty() {
                omega.push(0);
            }
            let data = (0..n).map(|_| rng.gen::<f64>()).collect();
            Ok(Instance {
                omega: VertexSet::new(&g, omega)?,
                g,
                data,
            })
        })
        .collect()
}

fn solver(opts: &SelftestOptions) -> SolverOptions {
    SolverOptions::with_tol(opts.tol)
}

fn solve(inst: &Instance, data: &[f64], p: &PExponent, s: &SolverOptions) -> Result<PotentialSolution> {
    let sol = solve_dirichlet(&inst.g, &inst.omega, |y| data[y], p, s)?;
    sol.ensure_converged()?;
    Ok(sol)
}

fn sup_diff(a: &[f64], b: &[f64], on: &VertexSet) -> f64 {
    on.iter().map(|x| (a[x] - b[x]).abs()).fold(0.0, f64::max)
}

type Measured = Result<(f64, String)>;

fn comparison(opts: &SelftestOptions) -> Measured {
    let mut worst = f64::NEG_INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 1);
    for inst in instances(opts, 1)? {
        let bumped: Vec<f64> = inst.data.iter().map(|v| v + rng.gen::<f64>() * 0.3).collect();
        for &p in &EXPONENTS {
            let p = PExponent::new(p)?;
            let lo = solve(&inst, &inst.data, &p, &solver(opts))?;
            let hi = solve(&inst, &bumped, &p, &solver(opts))?;
            for x in inst.omega.iter() {
                worst = worst.max(lo.u[x] - hi.u[x]);
            }
        }
    }
    let lat = lattice_box(2, 12, None)?;
    let g = &lat.graph;
    let omega = VertexSet::from_predicate(g, |x| !lat.window.is_frontier(x));
    let newton = SolverOptions {
        method: Method::Newton,
        ..solver(opts)
    };
    let p = PExponent::new(1.5)?;
    let f = |x: usize| {
        let c = lat.window.coords(x);
        ((c[0] + 2 * c[1]) as f64 / 36.0).sin()
    };
    let lo = solve_dirichlet(g, &omega, f, &p, &newton)?;
    let hi = solve_dirichlet(g, &omega, |x| f(x) + 0.01 * (x % 3) as f64, &p, &newton)?;
    lo.ensure_converged()?;
    hi.ensure_converged()?;
    for x in omega.iter() {
        worst = worst.max(lo.u[x] - hi.u[x]);
    }
    Ok((worst, "max (u_f - u_g) with f <= g on the boundary".into()))
}

fn maximum_principle(opts: &SelftestOptions) -> Measured {
    let mut worst = f64::NEG_INFINITY;
    for inst in instances(opts, 2)? {
        let boundary = inst.omega.complement(&inst.g);
        let lo = boundary.iter().map(|y| inst.data[y]).fold(f64::INFINITY, f64::min);
        let hi = boundary.iter().map(|y| inst.data[y]).fold(f64::NEG_INFINITY, f64::max);
        for &p in &EXPONENTS {
            let sol = solve(&inst, &inst.data, &PExponent::new(p)?, &solver(opts))?;
            for x in inst.omega.iter() {
                worst = worst.max(lo - sol.u[x]).max(sol.u[x] - hi);
            }
        }
    }
    Ok((worst, "overshoot of the boundary range".into()))
}

fn energy_monotone(opts: &SelftestOptions) -> Measured {
    let mut worst = f64::NEG_INFINITY;
    let mut sweeps = 0;
    for inst in instances(opts, 3)? {
        for &p in &EXPONENTS {
            for parallel in [false, true] {
                let s = SolverOptions {
                    method: Method::GaussSeidel,
                    record_energy: true,
                    parallel,
                    max_sweeps: Some(400),
                    ..solver(opts)
                };
                let sol = solve_dirichlet(&inst.g, &inst.omega, |y| inst.data[y], &PExponent::new(p)?, &s)?;
                let h = &sol.energy_history;
                sweeps += h.len();
                let scale = h.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
                for w in h.windows(2) {
                    worst = worst.max((w[1] - w[0]) / scale);
                }
            }
        }
    }
    Ok((worst, format!("largest relative energy increase over {sweeps} sweeps")))
}

fn plates(g: &WeightedGraph, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = g.vertex_count();
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        ids.swap(i, rng.gen_range(0..=i));
    }
    let k = rng.gen_range(1..=n / 4);
    let z = rng.gen_range(1..=n / 4);
    Ok((ids[..k].to_vec(), ids[k..k + z].to_vec()))
}

fn capacity_monotone(opts: &SelftestOptions) -> Measured {
    let mut worst = f64::NEG_INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 4);
    for inst in instances(opts, 4)? {
        let g = &inst.g;
        let (k, z) = plates(g, &mut rng)?;
        let extra = (0..g.vertex_count()).find(|x| !k.contains(x) && !z.contains(x));
        let Some(extra) = extra else { continue };
        let mut bigger = k.clone();
        bigger.push(extra);
        for &p in &EXPONENTS {
            let p = PExponent::new(p)?;
            let sink = VertexSet::new(g, z.iter().copied())?;
            let small = capacity(g, &Condenser::new(VertexSet::new(g, k.iter().copied())?, sink.clone(), p), &solver(opts))?;
            let large = capacity(g, &Condenser::new(VertexSet::new(g, bigger.iter().copied())?, sink, p), &solver(opts))?;
            let slack = small.uncertainty + large.uncertainty;
            worst = worst.max((small.value - large.value - slack) / large.value);
        }
    }
    Ok((worst, "relative excess of cap(K) over cap(K + x)".into()))
}

fn capacity_symmetry(opts: &SelftestOptions) -> Measured {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 5);
    for inst in instances(opts, 5)? {
        let g = &inst.g;
        let (k, z) = plates(g, &mut rng)?;
        let k = VertexSet::new(g, k)?;
        let z = VertexSet::new(g, z)?;
        for &p in &EXPONENTS {
            let p = PExponent::new(p)?;
            let a = capacity(g, &Condenser::new(k.clone(), z.clone(), p), &solver(opts))?;
            let b = capacity(g, &Condenser::new(z.clone(), k.clone(), p), &solver(opts))?;
            worst = worst.max((a.value - b.value).abs() / a.value);
        }
    }
    Ok((worst, "relative gap between cap(K, Z) and cap(Z, K)".into()))
}

fn homogeneity(opts: &SelftestOptions) -> Measured {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 6);
    let (c, a, b) = (3.7, -2.5, 0.75);
    for inst in instances(opts, 6)? {
        let g = &inst.g;
        let scaled_edges: Vec<_> = g.edges().map(|(x, y, w)| (x, y, c * w)).collect();
        let scaled = WeightedGraph::from_edges(g.vertex_count(), &scaled_edges)?;
        let (k, z) = plates(g, &mut rng)?;
        let affine: Vec<f64> = inst.data.iter().map(|v| a * v + b).collect();
        for &p in &EXPONENTS {
            let p = PExponent::new(p)?;
            let base = capacity(g, &Condenser::new(VertexSet::new(g, k.iter().copied())?, VertexSet::new(g, z.iter().copied())?, p), &solver(opts))?;
            let heavy = capacity(
                &scaled,
                &Condenser::new(VertexSet::new(&scaled, k.iter().copied())?, VertexSet::new(&scaled, z.iter().copied())?, p),
                &solver(opts),
            )?;
            worst = worst.max((heavy.value - c * base.value).abs() / (c * base.value));
            worst = worst.max(sup_diff(&heavy.potential.u, &base.potential.u, &base.potential.free_set));

            let u = solve(&inst, &inst.data, &p, &solver(opts))?;
            let v = solve(&inst, &affine, &p, &solver(opts))?;
            let mapped: Vec<f64> = u.u.iter().map(|t| a * t + b).collect();
            worst = worst.max(sup_diff(&mapped, &v.u, &inst.omega) / a.abs());
        }
    }
    Ok((worst, "weight scaling and affine data maps, relative".into()))
}

fn warm_start(opts: &SelftestOptions) -> Measured {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 7);
    for inst in instances(opts, 7)? {
        for &p in &EXPONENTS {
            let p = PExponent::new(p)?;
            let cold = solve(&inst, &inst.data, &p, &solver(opts))?;
            let guess: Vec<f64> = cold.u.iter().map(|v| v + rng.gen_range(-0.5..0.5)).collect();
            let warm = solve(
                &inst,
                &inst.data,
                &p,
                &SolverOptions {
                    initial_guess: Some(guess),
                    ..solver(opts)
                },
            )?;
            worst = worst.max(sup_diff(&cold.u, &warm.u, &inst.omega));
        }
    }
    let lat = lattice_box(3, 10, None)?;
    let k = VertexSet::new(&lat.graph, [lat.window.origin()])?;
    let p = PExponent::new(1.6)?;
    let radii = [3, 5, 7, 9];
    let seq = |warm| {
        capacity_exhaustion(
            &lat,
            lat.window.origin(),
            &k,
            None,
            &p,
            &radii,
            &SequenceOptions {
                solver: solver(opts),
                warm_start: warm,
            },
        )
    };
    let (w, c) = (seq(true)?, seq(false)?);
    for (a, b) in w.points.iter().zip(&c.points) {
        worst = worst.max((a.value - b.value).abs() / b.value);
    }
    Ok((worst, "solution gap between cold and perturbed warm starts".into()))
}

fn thread_count(opts: &SelftestOptions) -> Measured {
    let lat = lattice_box(2, 17, None)?;
    let thorn = thorn_set(&lat, &Profile::Power { alpha: 0.5, scale: 1.0 });
    let p = PExponent::new(1.5)?;
    let o = lat.window.origin();
    let wopts = WienerOptions {
        solver: solver(opts),
        ..Default::default()
    };
    let omega = VertexSet::all(&lat.graph);
    let run = |threads: usize| -> Result<_> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| {
            let report = wiener_report(&lat, o, &thorn, &p, 3, &wopts)?;
            let walks = mc_escape_probability(&lat, &omega, o, o, 5000, &[4, 8, 16], opts.seed)?;
            Ok((report, walks))
        })
    };
    let (r1, w1) = run(1)?;
    let (rn, wn) = run(opts.threads.max(2))?;
    let mut worst: f64 = 0.0;
    for (a, b) in r1.scales.iter().zip(&rn.scales) {
        worst = worst.max((a.term_main - b.term_main).abs()).max((a.cap_a - b.cap_a).abs());
    }
    for (a, b) in w1.iter().zip(&wn) {
        worst = worst.max((a.estimate - b.estimate).abs());
    }
    Ok((worst, format!("1 thread against {} threads", opts.threads.max(2))))
}

fn greens_identity(opts: &SelftestOptions) -> Measured {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 9);
    for inst in instances(opts, 9)? {
        let h: Vec<f64> = (0..inst.g.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for &p in &EXPONENTS {
            let p = PExponent::new(p)?;
            let gc = greens_identity_check(&inst.g, &inst.omega, &inst.data, &h, &p);
            worst = worst.max(gc.abs_gap);
            let sol = solve(&inst, &inst.data, &p, &solver(opts))?;
            let gc = greens_identity_check(&inst.g, &inst.omega, &sol.u, &h, &p);
            worst = worst.max(gc.abs_gap);
        }
    }
    Ok((worst, "absolute gap between the two sides".into()))
}

fn oracle_agreement(opts: &SelftestOptions) -> Measured {
    let mut worst: f64 = 0.0;
    for inst in instances(opts, 10)? {
        let lin = linear_dirichlet_p2(&inst.g, &inst.omega, |y| inst.data[y])?;
        let sol = solve(&inst, &inst.data, &PExponent::new(2.0)?, &solver(opts))?;
        worst = worst.max(sup_diff(&lin.values, &sol.u, &inst.omega));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + 10);
    for i in 0..3 {
        let g = random_connected_graph(9, 6, (0.5, 2.0), &mut rng)?;
        let c = Condenser::new(VertexSet::new(&g, [0])?, VertexSet::new(&g, [8])?, PExponent::new(EXPONENTS[i])?);
        let exact = capacity(&g, &c, &solver(opts))?;
        let brute = bruteforce_condenser(&g, &c, opts.seed + i as u64)?;
        worst = worst.max((exact.value - brute.value).abs() / brute.value);
    }
    Ok((worst, "p = 2 against the linear oracle, small condensers against brute force".into()))
}

/// Runs every check; failures are reported, not raised.
pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let suite: [(&str, f64, fn(&SelftestOptions) -> Measured); 10] = [
        ("comparison_principle", 1e-7, comparison),
        ("maximum_principle", 1e-9, maximum_principle),
        ("energy_monotone_per_sweep", 1e-12, energy_monotone),
        ("capacity_monotone", 1e-7, capacity_monotone),
        ("capacity_symmetry", 1e-7, capacity_symmetry),
        ("homogeneity", 1e-6, homogeneity),
        ("warm_start_invariance", 1e-6, warm_start),
        ("thread_count_invariance", 1e-12, thread_count),
        ("greens_identity", 1e-10, greens_identity),
        ("oracle_agreement", 1e-6, oracle_agreement),
    ];
    let checks = suite
        .iter()
        .map(|&(name, bound, f)| {
            let start = Instant::now();
            let outcome = f(opts);
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok((worst, detail)) => Check {
                    name: name.into(),
                    passed: worst <= bound,
                    worst,
                    bound,
                    detail,
                    seconds,
                },
                Err(e) => Check {
                    name: name.into(),
                    passed: false,
                    worst: f64::NAN,
                    bound,
                    detail: format!("error: {e}"),
                    seconds,
                },
            }
        })
        .collect();
    SelftestReport {
        seed: opts.seed,
        checks,
    }
}
