use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pharmonic::capacity::{capacity, Condenser};
use pharmonic::graph::{vertex_boundary, VertexSet, WeightedGraph};
use pharmonic::plaplace::{solve_dirichlet, PExponent, SolverOptions};
use pharmonic::selftest::random_connected_graph;

fn tight() -> SolverOptions {
    SolverOptions::with_tol(1e-11)
}

/// A random graph with a random proper subset as domain.
fn instance(seed: u64, n: usize) -> (WeightedGraph, VertexSet, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_connected_graph(n, n / 2, (0.1, 10.0), &mut rng).unwrap();
    let mut omega: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
    if omega.len() == n {
        omega.pop();
    }
    if omega.is_empty() {
        omega.push(0);
    }
    let omega = VertexSet::new(&g, omega).unwrap();
    (g, omega, rng)
}

fn two_plates(g: &WeightedGraph, rng: &mut ChaCha8Rng) -> (VertexSet, VertexSet) {
    let n = g.vertex_count();
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (VertexSet::new(g, [a]).unwrap(), VertexSet::new(g, [b]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weighted_series_law(weights in prop::collection::vec(0.1f64..10.0, 1..9), p in 1.2f64..4.0) {
        let k = weights.len();
        let edges: Vec<_> = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
        let g = WeightedGraph::from_edges(k + 1, &edges).unwrap();
        let pe = PExponent::new(p).unwrap();
        let c = Condenser::new(VertexSet::new(&g, [0]).unwrap(), VertexSet::new(&g, [k]).unwrap(), pe);
        let cap = capacity(&g, &c, &tight()).unwrap().value;
        let resistance: f64 = weights.iter().map(|w| w.powf(-1.0 / (p - 1.0))).sum();
        assert_relative_eq!(cap, resistance.powf(1.0 - p), max_relative = 1e-7);
    }

    #[test]
    fn comparison_principle(seed in any::<u64>(), n in 6usize..40, p in 1.3f64..3.5, shift in 0.0f64..0.5) {
        let (g, omega, mut rng) = instance(seed, n);
        let pe = PExponent::new(p).unwrap();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h: Vec<f64> = f.iter().map(|v| v + shift * rng.gen::<f64>()).collect();
        let lo = solve_dirichlet(&g, &omega, |y| f[y], &pe, &tight()).unwrap();
        let hi = solve_dirichlet(&g, &omega, |y| h[y], &pe, &tight()).unwrap();
        prop_assert!(lo.converged && hi.converged);
        for x in omega.iter() {
            prop_assert!(lo.u[x] <= hi.u[x] + 1e-7, "x={} {} > {}", x, lo.u[x], hi.u[x]);
        }
    }

    #[test]
    fn maximum_principle(seed in any::<u64>(), n in 6usize..40, p in 1.3f64..3.5) {
        let (g, omega, mut rng) = instance(seed, n);
        let pe = PExponent::new(p).unwrap();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let sol = solve_dirichlet(&g, &omega, |y| f[y], &pe, &tight()).unwrap();
        let bdry = vertex_boundary(&g, &omega);
        let max = bdry.iter().map(|y| f[y]).fold(f64::MIN, f64::max);
        let min = bdry.iter().map(|y| f[y]).fold(f64::MAX, f64::min);
        for x in omega.iter() {
            prop_assert!(sol.u[x] <= max + 1e-9 && sol.u[x] >= min - 1e-9);
        }
    }

    #[test]
    fn capacity_is_symmetric(seed in any::<u64>(), n in 4usize..40, p in 1.3f64..3.5) {
        let (g, _, mut rng) = instance(seed, n);
        let pe = PExponent::new(p).unwrap();
        let (a, b) = two_plates(&g, &mut rng);
        let ab = capacity(&g, &Condenser::new(a.clone(), b.clone(), pe), &tight()).unwrap();
        let ba = capacity(&g, &Condenser::new(b, a, pe), &tight()).unwrap();
        assert_relative_eq!(ab.value, ba.value, max_relative = 1e-7);
    }

    #[test]
    fn capacity_grows_with_the_source(seed in any::<u64>(), n in 5usize..40, p in 1.3f64..3.5) {
        let (g, _, mut rng) = instance(seed, n);
        let pe = PExponent::new(p).unwrap();
        let (a, b) = two_plates(&g, &mut rng);
        let extra: Vec<usize> = (0..n).filter(|&x| !b.contains(x) && rng.gen_bool(0.3)).collect();
        let bigger = a.union(&VertexSet::new(&g, extra).unwrap());
        let small = capacity(&g, &Condenser::new(a, b.clone(), pe), &tight()).unwrap();
        let large = capacity(&g, &Condenser::new(bigger, b, pe), &tight()).unwrap();
        prop_assert!(small.value <= large.value * (1.0 + 1e-7) + 1e-12);
    }

    #[test]
    fn weights_scale_capacity(seed in any::<u64>(), n in 4usize..30, p in 1.3f64..3.5, s in 0.2f64..5.0) {
        let (g, _, mut rng) = instance(seed, n);
        let pe = PExponent::new(p).unwrap();
        let (a, b) = two_plates(&g, &mut rng);
        let scaled: Vec<_> = g.edges().map(|(x, y, w)| (x, y, w * s)).collect();
        let gs = WeightedGraph::from_edges(n, &scaled).unwrap();
        let base = capacity(&g, &Condenser::new(a.clone(), b.clone(), pe), &tight()).unwrap();
        let a2 = VertexSet::new(&gs, a.ids().to_vec()).unwrap();
        let b2 = VertexSet::new(&gs, b.ids().to_vec()).unwrap();
        let big = capacity(&gs, &Condenser::new(a2, b2, pe), &tight()).unwrap();
        assert_relative_eq!(big.value, s * base.value, max_relative = 1e-7);
    }
}
