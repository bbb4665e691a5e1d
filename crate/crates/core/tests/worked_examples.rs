use pharmonic::capacity::{
    ball_capacity_bounds_check, capacity, capacity_exhaustion, level_set_flux, level_set_sandwich_check,
    Condenser,
};
use pharmonic::graph::{ball, check_p0, component_of, graph_distance, vertex_boundary, VertexSet, WeightedGraph};
use pharmonic::lattice::{cylinder_set, halfspace_set, lattice_box, thorn_set, axis_set, Lattice, Profile};
use pharmonic::massiveness::{
    dp_massiveness_probe, liouville_construct, massiveness_sequence, uniqueness_gap_probe, DpVerdict,
    MassiveVerdict,
};
use pharmonic::oracles::{bruteforce_condenser, linear_dirichlet_p2, mc_escape_probability};
use pharmonic::plaplace::{greens_identity_check, p_energy_full, p_laplacian_at, solve_dirichlet, PExponent};
use pharmonic::wiener::dyadic_scales;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn path(edges: usize) -> WeightedGraph {
    let e: Vec<_> = (0..edges).map(|i| (i, i + 1, 1.0)).collect();
    WeightedGraph::from_edges(edges + 1, &e).unwrap()
}

fn ends(g: &WeightedGraph, p: f64) -> Condenser {
    let n = g.vertex_count();
    Condenser::new(
        VertexSet::new(g, [0]).unwrap(),
        VertexSet::new(g, [n - 1]).unwrap(),
        PExponent::new(p).unwrap(),
    )
}

fn at(lat: &Lattice, c: &[i64]) -> usize {
    lat.window.id(c).unwrap()
}

fn pe(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

#[test]
fn lattice_measure_distance_and_balls() {
    let lat = lattice_box(2, 2, None).unwrap();
    let o = lat.window.origin();
    assert!((lat.graph.measure(o) - 1.0).abs() < 1e-15);
    assert_eq!(graph_distance(&lat.graph, o, at(&lat, &[2, 1])), Some(3));

    let lat = lattice_box(2, 5, None).unwrap();
    let o = lat.window.origin();
    assert_eq!(ball(&lat.graph, o, 2).len(), 13);
    assert_eq!(vertex_boundary(&lat.graph, &ball(&lat.graph, o, 1)).len(), 8);
}

#[test]
fn diagonal_quadrants_are_separate_components() {
    let lat = lattice_box(2, 4, None).unwrap();
    let g = &lat.graph;
    let quadrant = |sign: i64| {
        VertexSet::from_predicate(g, |x| {
            let c = lat.window.coords(x);
            c[0] * sign > 0 && c[1] * sign > 0
        })
    };
    let omega = quadrant(1).union(&quadrant(-1));
    let comp = component_of(g, &omega, at(&lat, &[1, 1])).unwrap();
    assert_eq!(comp.ids(), quadrant(1).ids());
}

#[test]
fn star_p0() {
    let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (0, 2, 2.0)]).unwrap();
    assert_eq!(check_p0(&g), 3.0);
}

#[test]
fn small_grids_thorns_and_cylinders() {
    let lat = lattice_box(2, 1, None).unwrap();
    assert_eq!((lat.graph.vertex_count(), lat.graph.edge_count()), (9, 12));

    let lat = lattice_box(2, 5, None).unwrap();
    let wedge = thorn_set(&lat, &Profile::Power { alpha: 1.0, scale: 1.0 });
    assert!(wedge.contains(at(&lat, &[4, 3])));
    assert!(!wedge.contains(at(&lat, &[3, 4])));

    let lat = lattice_box(3, 5, None).unwrap();
    let thin = thorn_set(&lat, &Profile::Power { alpha: 0.5, scale: 1.0 });
    assert!(thin.contains(at(&lat, &[4, 1, 1])));
    assert_eq!(cylinder_set(&lat, 2, 1).len(), 15);
}

#[test]
fn energy_and_laplacian_by_hand() {
    let g = path(2);
    assert!((p_energy_full(&g, &[0.0, 0.5, 1.0], &pe(2.0)) - 0.5).abs() < 1e-15);

    let star = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
    let lap = p_laplacian_at(&star, &[0.0, 1.0, 1.0, -2.0], 0, &pe(3.0));
    assert!((lap + 2.0 / 3.0).abs() < 1e-14);
}

#[test]
fn path_interpolation_for_several_p() {
    let g = path(3);
    let omega = VertexSet::new(&g, [1, 2]).unwrap();
    for p in [1.3, 2.0, 3.5] {
        let sol = solve_dirichlet(&g, &omega, |y| if y == 3 { 1.0 } else { 0.0 }, &pe(p), &Default::default()).unwrap();
        assert!(sol.converged);
        for (i, want) in [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0].iter().enumerate() {
            assert!((sol.u[i] - want).abs() < 1e-8, "p={p} u[{i}]={}", sol.u[i]);
        }
    }
}

#[test]
fn linear_data_on_a_grid_is_harmonic() {
    let lat = lattice_box(2, 2, None).unwrap();
    let g = &lat.graph;
    let omega = VertexSet::from_predicate(g, |x| lat.window.coords(x).iter().all(|c| c.abs() <= 1));
    let (a, b) = (0.7, -1.3);
    let lin = |x: usize| {
        let c = lat.window.coords(x);
        a * c[0] as f64 + b * c[1] as f64
    };
    let sol = solve_dirichlet(g, &omega, lin, &pe(2.0), &Default::default()).unwrap();
    for x in omega.iter() {
        assert!((sol.u[x] - lin(x)).abs() < 1e-8);
    }
}

#[test]
fn greens_identity_on_a_four_by_four_grid() {
    let idx = |i: usize, j: usize| 4 * i + j;
    let mut edges = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if i + 1 < 4 {
                edges.push((idx(i, j), idx(i + 1, j), 1.0));
            }
            if j + 1 < 4 {
                edges.push((idx(i, j), idx(i, j + 1), 1.0));
            }
        }
    }
    let g = WeightedGraph::from_edges(16, &edges).unwrap();
    let omega = VertexSet::new(&g, [idx(1, 1), idx(1, 2), idx(2, 1), idx(2, 2)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let h: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let check = greens_identity_check(&g, &omega, &f, &h, &pe(2.5));
    assert!(check.abs_gap <= 1e-10, "gap {}", check.abs_gap);
}

#[test]
fn path_condenser_potential_flux_and_sigma() {
    let g = path(4);
    let res = capacity(&g, &ends(&g, 2.5), &Default::default()).unwrap();
    for (i, want) in [1.0, 0.75, 0.5, 0.25, 0.0].iter().enumerate() {
        assert!((res.potential.u[i] - want).abs() < 1e-9);
    }

    let g = path(10);
    for p in [1.5, 2.0, 3.0] {
        let res = capacity(&g, &ends(&g, p), &Default::default()).unwrap();
        let exact = 10f64.powf(1.0 - p);
        assert!((res.sigma_mass_on_source - exact).abs() < 1e-6);
        for t in [0.05, 0.3, 0.5, 0.77, 0.95] {
            let flux = level_set_flux(&g, &res.potential.u, t, &pe(p));
            assert!((flux - res.value).abs() < 1e-9, "p={p} t={t}");
        }
    }
}

#[test]
fn annulus_potential_has_rotation_symmetry() {
    let lat = lattice_box(2, 7, None).unwrap();
    let g = &lat.graph;
    let o = lat.window.origin();
    let c = Condenser::new(ball(g, o, 1), ball(g, o, 5).complement(g), pe(2.0));
    let res = capacity(g, &c, &Default::default()).unwrap();
    let u = &res.potential.u;
    for x in 0..g.vertex_count() {
        let p = lat.window.coords(x);
        let y = at(&lat, &[-p[1], p[0]]);
        assert!((u[x] - u[y]).abs() <= 1e-8);
    }
}

#[test]
fn parallel_edges_add() {
    let (w1, w2) = (0.4, 2.5);
    let g = WeightedGraph::from_edges(4, &[(0, 2, w1), (1, 3, w2), (0, 1, 5.0)]).unwrap();
    for p in [1.5, 2.0, 4.0] {
        let c = Condenser::new(
            VertexSet::new(&g, [0, 1]).unwrap(),
            VertexSet::new(&g, [2, 3]).unwrap(),
            pe(p),
        );
        assert!((capacity(&g, &c, &Default::default()).unwrap().value - (w1 + w2)).abs() < 1e-12);
    }
}

#[test]
fn sandwich_on_a_path_and_an_annulus() {
    let g = path(4);
    let s = level_set_sandwich_check(&g, &ends(&g, 2.0), 0.5, &Default::default()).unwrap();
    assert!(s.holds);
    assert!((s.lhs - s.mid).abs() < 1e-9, "{s:?}");
    assert!((s.mid - 0.25).abs() < 1e-9);

    let lat = lattice_box(2, 9, None).unwrap();
    let o = lat.window.origin();
    let c = Condenser::new(ball(&lat.graph, o, 1), ball(&lat.graph, o, 7).complement(&lat.graph), pe(2.0));
    let s = level_set_sandwich_check(&lat.graph, &c, 0.3, &Default::default()).unwrap();
    assert!(s.holds, "{s:?}");
}

#[test]
fn ball_bounds_in_small_lattices() {
    let lat = lattice_box(2, 10, None).unwrap();
    let b = ball_capacity_bounds_check(&lat, lat.window.origin(), 4, 8, &pe(2.0), &Default::default()).unwrap();
    assert!(b.upper_holds && b.ratio > 0.0);

    let lat = lattice_box(3, 10, None).unwrap();
    let b = ball_capacity_bounds_check(&lat, lat.window.origin(), 5, 9, &pe(1.5), &Default::default()).unwrap();
    assert!(b.upper_holds && b.ratio > 0.0);
}

#[test]
fn exhaustion_in_z3_stabilizes() {
    let lat = lattice_box(3, 33, None).unwrap();
    let o = lat.window.origin();
    let k = VertexSet::new(&lat.graph, [o]).unwrap();
    let seq = capacity_exhaustion(&lat, o, &k, None, &pe(2.0), &[2, 4, 8, 16, 32], &Default::default()).unwrap();
    let v: Vec<f64> = seq.points.iter().map(|p| p.value).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
    assert!(seq.error_proxy / seq.estimate <= 0.05, "{v:?}");
}

#[test]
fn exhaustion_in_z2_decays_like_one_over_k() {
    let lat = lattice_box(2, 65, None).unwrap();
    let g = &lat.graph;
    let o = lat.window.origin();
    let k = VertexSet::new(g, [o]).unwrap();
    let radii: Vec<usize> = (1..=6).map(|k| 1 << k).collect();
    let seq = capacity_exhaustion(&lat, o, &k, None, &pe(2.0), &radii, &Default::default()).unwrap();
    let scaled: Vec<f64> = seq.points[1..]
        .iter()
        .zip(2..)
        .map(|(pt, k)| pt.value * k as f64)
        .collect();
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    assert!(hi / lo <= 2.0, "{scaled:?}");

    let dist = g.distances_from(o, Some(16));
    let omega = VertexSet::from_predicate(g, |x| dist[x] > 0 && dist[x] < 16);
    let lin = linear_dirichlet_p2(g, &omega, |y| if y == o { 1.0 } else { 0.0 }).unwrap();
    let oracle: f64 = g.neighbors(o).map(|(y, w)| w * (1.0 - lin.values[y])).sum();
    let at16 = seq.points.iter().find(|p| p.radius == 16).unwrap().value;
    assert!((oracle - at16).abs() < 1e-6, "{oracle} vs {at16}");
}

#[test]
fn axis_scale_sizes() {
    let lat = lattice_box(3, 17, None).unwrap();
    let o = lat.window.origin();
    let scales = dyadic_scales(&lat, o, &axis_set(&lat), 3).unwrap();
    for s in &scales {
        assert_eq!(s.a_n.len(), 2 * (1 << s.n) + 1);
    }
    assert_eq!(dyadic_scales(&lat, o, &axis_set(&lat), 1).unwrap().len(), 1);
}

#[test]
fn bruteforce_matches_series_law_and_solver() {
    let g = path(4);
    let bf = bruteforce_condenser(&g, &ends(&g, 2.5), 3).unwrap();
    assert!((bf.value - 4f64.powf(-1.5)).abs() < 1e-8);

    let tri = WeightedGraph::from_edges(3, &[(0, 1, 0.7), (1, 2, 1.9), (0, 2, 0.3)]).unwrap();
    let c = ends(&tri, 3.0);
    let bf = bruteforce_condenser(&tri, &c, 5).unwrap();
    let direct = capacity(&tri, &c, &Default::default()).unwrap();
    assert!((bf.value - direct.value).abs() < 1e-8);
}

#[test]
fn random_walk_escape_cases() {
    let lat = lattice_box(3, 9, None).unwrap();
    let g = &lat.graph;
    let o = lat.window.origin();
    let all = VertexSet::all(g);
    let est = mc_escape_probability(&lat, &all, o, o, 100_000, &[4, 8], 1).unwrap();
    for e in &est {
        assert_eq!(e.estimate, 1.0);
        assert!(e.stderr <= 0.01);
    }

    let blocked = ball(g, o, 1).difference(&VertexSet::new(g, [o]).unwrap()).complement(g);
    let est = mc_escape_probability(&lat, &blocked, o, o, 5_000, &[4], 2).unwrap();
    assert_eq!(est[0].estimate, 0.0);

    let lat = lattice_box(2, 65, None).unwrap();
    let o = lat.window.origin();
    let punctured = VertexSet::new(&lat.graph, [o]).unwrap().complement(&lat.graph);
    let x0 = at(&lat, &[1, 0]);
    let est = mc_escape_probability(&lat, &punctured, o, x0, 40_000, &[2, 8, 32, 64], 3).unwrap();
    assert!(est.windows(2).all(|w| w[1].estimate < w[0].estimate));
    assert!(est[3].estimate < 0.5 * est[0].estimate);
}

#[test]
fn punctured_z3_is_massive_and_punctured_z2_is_not() {
    let lat = lattice_box(3, 33, None).unwrap();
    let o = lat.window.origin();
    let omega = VertexSet::new(&lat.graph, [o]).unwrap().complement(&lat.graph);
    let x0 = at(&lat, &[1, 0, 0]);
    let ev = massiveness_sequence(&lat, &omega, o, x0, &pe(2.0), &[4, 8, 16, 32], &Default::default()).unwrap();
    assert!(ev.monotone);
    assert_eq!(ev.verdict, MassiveVerdict::MassiveLike, "{:?}", ev.sequence.points);

    let dp = dp_massiveness_probe(&lat, &omega, &omega, o, &pe(2.0), &[4, 8, 16, 32], &Default::default()).unwrap();
    assert_eq!(dp.verdict, DpVerdict::DpMassiveLike);

    let gap = uniqueness_gap_probe(&lat, &omega, o, x0, |_| 0.0, 1.0, &pe(2.0), &[4, 8, 16, 32], &Default::default())
        .unwrap();
    for pt in &gap.points {
        assert!(pt.minimal_sup.abs() < 1e-12);
        assert!(pt.inflated_at_x0 > 0.5, "{pt:?}");
    }

    let lat = lattice_box(2, 65, None).unwrap();
    let o = lat.window.origin();
    let omega = VertexSet::new(&lat.graph, [o]).unwrap().complement(&lat.graph);
    let x0 = at(&lat, &[1, 0]);
    let ev = massiveness_sequence(&lat, &omega, o, x0, &pe(2.0), &[8, 16, 32, 64], &Default::default()).unwrap();
    assert_eq!(ev.verdict, MassiveVerdict::NonMassiveLike, "{:?}", ev.deficit_ratios);
}

#[test]
fn complement_of_a_thick_thorn_is_not_massive() {
    let lat = lattice_box(3, 65, None).unwrap();
    let o = lat.window.origin();
    let omega = thorn_set(&lat, &Profile::Power { alpha: 1.0, scale: 1.0 }).complement(&lat.graph);
    let x0 = at(&lat, &[-1, 0, 0]);
    let ev = massiveness_sequence(&lat, &omega, o, x0, &pe(1.5), &[8, 16, 32, 64], &Default::default()).unwrap();
    assert!(ev.monotone);
    assert_eq!(ev.verdict, MassiveVerdict::NonMassiveLike, "{:?}", ev.deficit_ratios);
}

#[test]
fn uniqueness_gap_closes_in_z2() {
    let lat = lattice_box(2, 129, None).unwrap();
    let o = lat.window.origin();
    let omega = VertexSet::new(&lat.graph, [o]).unwrap().complement(&lat.graph);
    let x0 = at(&lat, &[1, 0]);
    let radii = [4, 8, 16, 32, 64, 128];
    let gap = uniqueness_gap_probe(&lat, &omega, o, x0, |_| 0.0, 1.0, &pe(2.0), &radii, &Default::default()).unwrap();
    let gaps: Vec<f64> = gap.points.iter().map(|p| p.gap).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[5] < 0.5 * gaps[0]);

    let c = 0.7;
    let gap = uniqueness_gap_probe(&lat, &omega, o, x0, |_| c, 1.0, &pe(2.0), &radii, &Default::default()).unwrap();
    let pts = &gap.points;
    for w in pts.windows(2) {
        assert!(w[1].gap < w[0].gap);
        assert!((w[1].minimal_at_x0 - c).abs() < (w[0].minimal_at_x0 - c).abs());
        assert!((w[1].inflated_at_x0 - c).abs() < (w[0].inflated_at_x0 - c).abs());
    }
}

#[test]
fn opposite_half_spaces_in_z3_are_separated() {
    let lat = lattice_box(3, 33, None).unwrap();
    let o = lat.window.origin();
    let up = halfspace_set(&lat, 0, Some(2), None);
    let down = halfspace_set(&lat, 0, None, Some(-2));
    let rep = liouville_construct(&lat, &up, &down, o, &pe(2.0), 32, &Default::default()).unwrap();
    assert!(rep.margin > 0.2, "margin {}", rep.margin);
}
