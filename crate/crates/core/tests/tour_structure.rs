//! Structural checks on optimum tours of the tetrahedron instances and on the
//! trip / pseudo-tour validators.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tetra_tsp_core::geometry::Point;
use tetra_tsp_core::instances::{build_modified, build_modified_forced, build_tetrahedron};
use tetra_tsp_core::oracle::{held_karp_opt, two_opt_improve};
use tetra_tsp_core::tour::{
    build_tstar, build_tstar_at, closed_form_opt_length, decompose_trips, edges_form_tour,
    hull_order_ok, is_pseudo_tour, is_simple_polygon, opt_length_bounds, tour_length, Side,
};
use tetra_tsp_core::{Instance, LabelKind, Metric, Tour, VertexLabel};

const NS: [usize; 5] = [40, 44, 48, 60, 80];
const MS: [usize; 5] = [22, 24, 30, 40, 54];

fn grid() -> impl Iterator<Item = (usize, usize)> {
    NS.into_iter()
        .flat_map(|n| MS.into_iter().map(move |m| (n, m)))
        .filter(|&(n, m)| 2 * n <= 3 * m)
}

#[test]
fn tstar_on_the_grid() {
    let mut checked = 0;
    for (n, m) in grid() {
        let inst = build_modified(n, m).unwrap();
        let t = build_tstar(&inst).unwrap();
        assert_eq!(t.len(), inst.len());
        assert!(is_simple_polygon(&t, &inst), "({n},{m})");
        assert!(hull_order_ok(&t, &inst), "({n},{m})");
        let d = decompose_trips(&t, &inst).unwrap();
        assert_eq!(d.trips.len(), 1, "({n},{m})");
        let trip = &d.trips[0];
        assert_eq!(trip.main_side, Side::C);
        let (first, last) = trip.connection;
        assert_eq!(inst.label(first).kind, LabelKind::InternalE);
        assert_eq!(inst.label(last).kind, LabelKind::InternalF);
        let len = tour_length(&t, &inst, Metric::ExactEuclid);
        let closed = closed_form_opt_length(n, m).unwrap();
        assert!((len - closed).abs() <= 1e-9, "({n},{m}): {len} vs {closed}");
        let (lo, hi) = opt_length_bounds(n);
        assert!(lo - 1e-9 <= closed && closed <= hi + 1e-9, "({n},{m})");
        checked += 1;
    }
    assert_eq!(checked, 11);
}

#[test]
fn tstar_on_48_24_connects_at_layer_9() {
    let inst = build_modified(48, 24).unwrap();
    let t = build_tstar(&inst).unwrap();
    let d = decompose_trips(&t, &inst).unwrap();
    let trip = &d.trips[0];
    assert_eq!(inst.label(trip.path[0]), VertexLabel::c(23));
    assert_eq!(inst.label(*trip.path.last().unwrap()), VertexLabel::c(24));
    assert_eq!(inst.label(trip.connection.0), VertexLabel::e(9));
    assert_eq!(inst.label(trip.connection.1), VertexLabel::f(9));
}

#[test]
fn mirrored_trip_position_has_equal_length() {
    // n = 24: the trip between c_12 and c_13 is the mirror image of c_11..c_12
    let inst = build_modified_forced(24, 18, Some(9)).unwrap();
    let t11 = build_tstar_at(&inst, 11).unwrap();
    let t12 = build_tstar_at(&inst, 12).unwrap();
    let (l11, l12) = (
        tour_length(&t11, &inst, Metric::ExactEuclid),
        tour_length(&t12, &inst, Metric::ExactEuclid),
    );
    assert!((l11 - l12).abs() < 1e-9, "{l11} vs {l12}");
    let d = decompose_trips(&build_tstar(&inst).unwrap(), &inst).unwrap();
    assert_eq!(inst.label(d.trips[0].path[0]), VertexLabel::c(11));
    // an off-centre trip is strictly longer
    let t5 = build_tstar_at(&inst, 5).unwrap();
    assert!(tour_length(&t5, &inst, Metric::ExactEuclid) > l11 + 1e-6);
}

/// Edge list of a drawing: each item is a polyline of labels. Straight runs
/// along one segment family are expanded through the vertices they pass.
struct Drawing<'a> {
    inst: &'a Instance,
    edges: Vec<(usize, usize)>,
}

impl<'a> Drawing<'a> {
    fn new(inst: &'a Instance) -> Self {
        Self {
            inst,
            edges: Vec::new(),
        }
    }

    fn run(&mut self, from: VertexLabel, to: VertexLabel) -> &mut Self {
        assert_eq!(from.kind, to.kind);
        let step: isize = if to.index >= from.index { 1 } else { -1 };
        let mut i = from.index as isize;
        while i != to.index as isize {
            let a = VertexLabel::new(from.kind, i as usize);
            let b = VertexLabel::new(from.kind, (i + step) as usize);
            self.edge(a, b);
            i += step;
        }
        self
    }

    fn edge(&mut self, a: VertexLabel, b: VertexLabel) -> &mut Self {
        self.edges
            .push((self.inst.index_of(a), self.inst.index_of(b)));
        self
    }

    /// The whole `b` side from `A` to `C`.
    fn side_b(&mut self, n: usize) -> &mut Self {
        self.run(VertexLabel::b(n), VertexLabel::b(0))
    }
}

use VertexLabel as L;

/// The four-trip tour on `T'(24,18)` with `i0 = 9`.
fn four_trip_tour(inst: &Instance) -> Vec<(usize, usize)> {
    let mut d = Drawing::new(inst);
    d.side_b(24)
        .run(L::c(0), L::c(9))
        .run(L::c(10), L::c(13))
        .run(L::c(14), L::c(24))
        // a_16 -> g_15..g_12 -> e_12..e_9 -> g_9..g_11 -> a_17
        .edge(L::a(16), L::g(15))
        .run(L::g(15), L::g(12))
        .edge(L::g(12), L::e(12))
        .run(L::e(12), L::e(9))
        .edge(L::e(9), L::g(9))
        .run(L::g(9), L::g(11))
        .edge(L::g(11), L::a(17))
        .run(L::a(17), L::a(24))
        .run(L::a(0), L::a(6))
        .edge(L::a(6), L::f(9))
        .run(L::f(9), L::f(12))
        .edge(L::f(12), L::a(7))
        .run(L::a(7), L::a(16))
        .edge(L::c(9), L::e(13))
        .run(L::e(13), L::e(16))
        .edge(L::e(16), L::c(10))
        // c_13 -> e_17 -> g_16 -> M -> f_17..f_13 -> c_14
        .edge(L::c(13), L::e(17))
        .edge(L::e(17), L::g(16))
        .run(L::g(16), L::g(18))
        .edge(L::g(18), L::f(17))
        .run(L::f(17), L::f(13))
        .edge(L::f(13), L::c(14));
    d.edges.clone()
}

/// Two trips between `c_9` and `c_10`, one between `a_6` and `a_7`.
fn doubled_trip_structure(inst: &Instance) -> Vec<(usize, usize)> {
    let mut d = Drawing::new(inst);
    d.side_b(24)
        .run(L::c(0), L::c(9))
        .run(L::c(10), L::c(24))
        .run(L::a(0), L::a(6))
        .edge(L::a(6), L::f(9))
        .run(L::f(9), L::f(12))
        .edge(L::f(12), L::a(7))
        .run(L::a(7), L::a(24))
        .edge(L::c(9), L::e(13))
        .run(L::e(13), L::e(18))
        .edge(L::e(18), L::c(10))
        .edge(L::c(9), L::e(9))
        .run(L::e(9), L::e(12))
        .edge(L::e(12), L::g(9))
        .run(L::g(9), L::g(17))
        .edge(L::g(17), L::f(17))
        .run(L::f(17), L::f(13))
        .edge(L::f(13), L::c(10));
    d.edges.clone()
}

/// Cyclic order of a Hamiltonian edge list.
fn cycle_order(nv: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); nv];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut order = vec![0];
    let mut prev = usize::MAX;
    let mut cur = 0;
    loop {
        let next = if adj[cur][0] != prev {
            adj[cur][0]
        } else {
            adj[cur][1]
        };
        if next == 0 {
            break;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    order
}

#[test]
fn four_trip_drawing_is_a_tour_with_four_trips() {
    let inst = build_modified_forced(24, 18, Some(9)).unwrap();
    let edges = four_trip_tour(&inst);
    assert!(edges_form_tour(inst.len(), &edges));
    assert!(!is_pseudo_tour(&inst, &edges));
    let t = Tour::for_instance(cycle_order(inst.len(), &edges), &inst).unwrap();
    assert!(hull_order_ok(&t, &inst));
    let d = decompose_trips(&t, &inst).unwrap();
    assert_eq!(d.trips.len(), 4);
    let mut sides: Vec<Side> = d.trips.iter().map(|t| t.main_side).collect();
    sides.sort();
    assert_eq!(sides, vec![Side::A, Side::A, Side::C, Side::C]);
    // it is longer than the single-trip optimum
    let opt = tour_length(&build_tstar(&inst).unwrap(), &inst, Metric::ExactEuclid);
    assert!(tour_length(&t, &inst, Metric::ExactEuclid) > opt);
}

#[test]
fn doubled_trip_is_a_pseudo_tour() {
    let inst = build_modified_forced(24, 18, Some(9)).unwrap();
    let edges = doubled_trip_structure(&inst);
    assert!(!edges_form_tour(inst.len(), &edges));
    assert!(is_pseudo_tour(&inst, &edges));

    // restoring the edge c_9 c_10 breaks the "iff" condition
    let mut extra = edges.clone();
    extra.push((inst.index_of(L::c(9)), inst.index_of(L::c(10))));
    assert!(!is_pseudo_tour(&inst, &extra));
    // dropping a base edge with no trip across it breaks it as well
    let cut = (inst.index_of(L::c(3)), inst.index_of(L::c(4)));
    let missing: Vec<_> = edges.iter().copied().filter(|&e| e != cut).collect();
    assert!(!is_pseudo_tour(&inst, &missing));
}

#[test]
fn hamiltonian_cycles_and_detached_cycles_are_not_pseudo_tours() {
    let inst = build_modified(48, 24).unwrap();
    let t = build_tstar(&inst).unwrap();
    let edges: Vec<_> = t.edges().collect();
    assert!(!is_pseudo_tour(&inst, &edges));

    // the base cycle plus a separate cycle through all internal vertices
    let nb = inst.base_count();
    let nv = inst.len();
    let mut two: Vec<_> = (0..nb).map(|i| (i, (i + 1) % nb)).collect();
    two.extend((nb..nv).map(|i| (i, if i + 1 == nv { nb } else { i + 1 })));
    assert!(!is_pseudo_tour(&inst, &two));
}

#[test]
fn tiny_optima_are_simple_polygons() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let k = rand::Rng::random_range(&mut rng, 4..=12);
        let pts: Vec<Point> = (0..k)
            .map(|_| {
                Point::new(
                    rand::Rng::random_range(&mut rng, 0.0..100.0),
                    rand::Rng::random_range(&mut rng, 0.0..100.0),
                )
            })
            .collect();
        let inst = Instance::imported("random", pts).unwrap();
        let r = held_karp_opt(&inst, Metric::ExactEuclid).unwrap();
        assert!(is_simple_polygon(&r.tour, &inst));
    }
}

#[test]
fn tetra_optimum_by_held_karp_is_hull_ordered() {
    let inst = build_tetrahedron(3, 2).unwrap();
    let r = held_karp_opt(&inst, Metric::ExactEuclid).unwrap();
    assert!(is_simple_polygon(&r.tour, &inst));
    assert!(hull_order_ok(&r.tour, &inst));
}

#[test]
fn two_opt_never_beats_the_closed_form() {
    let (n, m) = (40, 27);
    let inst = build_modified(n, m).unwrap();
    let closed = closed_form_opt_length(n, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let mut order: Vec<usize> = (0..inst.len()).collect();
        order.shuffle(&mut rng);
        let t = Tour::for_instance(order, &inst).unwrap();
        let improved = two_opt_improve(&t, &inst, Metric::ExactEuclid);
        let len = tour_length(&improved, &inst, Metric::ExactEuclid);
        assert!(len >= closed - 1e-9, "{len} < {closed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tour_text_round_trip(n in 3usize..60, seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = Tour::new(order, n).unwrap();
        prop_assert_eq!(Tour::parse_text(&t.to_text(), n).unwrap(), t.clone());
        prop_assert_eq!(t.reversed().canonical(), t.canonical());
    }

    #[test]
    fn tstar_invariants(n in 40usize..90, m in 22usize..70) {
        prop_assume!(2 * n <= 3 * m);
        let inst = build_modified(n, m).unwrap();
        let t = build_tstar(&inst).unwrap();
        prop_assert!(hull_order_ok(&t, &inst));
        prop_assert_eq!(decompose_trips(&t, &inst).unwrap().trips.len(), 1);
        let len = tour_length(&t, &inst, Metric::ExactEuclid);
        let closed = closed_form_opt_length(n, m).unwrap();
        prop_assert!((len - closed).abs() <= 1e-9);
        let (lo, hi) = opt_length_bounds(n);
        prop_assert!(lo - 1e-9 <= closed && closed <= hi + 1e-9);
    }

    #[test]
    fn swapping_two_base_vertices_breaks_hull_order(i in 1usize..38) {
        let inst = build_modified(40, 27).unwrap();
        let mut order = build_tstar(&inst).unwrap().order().to_vec();
        let (p, q) = (
            order.iter().position(|&v| v == inst.index_of(L::a(i))).unwrap(),
            order.iter().position(|&v| v == inst.index_of(L::a(i + 1))).unwrap(),
        );
        order.swap(p, q);
        let t = Tour::for_instance(order, &inst).unwrap();
        prop_assert!(!hull_order_ok(&t, &inst));
        prop_assert!(decompose_trips(&t, &inst).is_err());
    }
}
