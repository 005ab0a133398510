//! Agreement between independent solution methods: exact tour oracles
//! against each other and a branch-and-bound written here, the cutting-plane
//! LP against full enumeration and against an explicitly written relaxation,
//! and warm-started against cold-started simplex solves.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetra_tsp_core::geometry::Point;
use tetra_tsp_core::instances::{build_modified, build_tetrahedron};
use tetra_tsp_core::lp::{solve_lp, LpProblem, LpSolution, LpStatus, Relation, Row, Simplex};
use tetra_tsp_core::oracle::{held_karp_opt, permutation_opt};
use tetra_tsp_core::subtour::{
    build_explicit_fractional, check_feasibility, edge_index, edge_list, enumerate_subtour_lp,
    solve_subtour_lp, subset_row,
};
use tetra_tsp_core::tour::closed_form_opt_length;
use tetra_tsp_core::{Instance, Metric};

fn random_instance(rng: &mut impl Rng, k: usize) -> Instance {
    let pts = (0..k)
        .map(|_| Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    Instance::imported("random", pts).unwrap()
}

/// Depth-first branch and bound with a "cheapest remaining edge" bound.
fn branch_and_bound(d: &[f64], n: usize) -> f64 {
    let cheapest: Vec<f64> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v)
                .map(|u| d[v * n + u])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut best = f64::INFINITY;
    let mut used = vec![false; n];
    used[0] = true;
    #[allow(clippy::too_many_arguments)]
    fn go(
        d: &[f64],
        n: usize,
        cheapest: &[f64],
        used: &mut [bool],
        last: usize,
        depth: usize,
        len: f64,
        rest_bound: f64,
        best: &mut f64,
    ) {
        if depth == n {
            *best = best.min(len + d[last * n]);
            return;
        }
        if len + rest_bound >= *best {
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                go(
                    d,
                    n,
                    cheapest,
                    used,
                    v,
                    depth + 1,
                    len + d[last * n + v],
                    rest_bound - cheapest[v],
                    best,
                );
                used[v] = false;
            }
        }
    }
    // every unvisited vertex and vertex 0 still needs an incoming edge
    let bound: f64 = cheapest[1..].iter().sum::<f64>() + cheapest[0];
    go(d, n, &cheapest, &mut used, 0, 1, 0.0, bound, &mut best);
    best
}

#[test]
fn held_karp_matches_permutation_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let k = rng.random_range(3..=10);
        let inst = random_instance(&mut rng, k);
        let hk = held_karp_opt(&inst, Metric::ExactEuclid).unwrap();
        let perm = permutation_opt(&inst, Metric::ExactEuclid).unwrap();
        assert_eq!(hk.length, perm.length);
        assert_eq!(hk.tour, perm.tour);
    }
}

#[test]
fn held_karp_on_small_tetrahedron_matches_branch_and_bound() {
    let inst = build_tetrahedron(3, 2).unwrap();
    let d = inst.distance_matrix(Metric::ExactEuclid);
    let bb = branch_and_bound(&d, inst.len());
    let hk = held_karp_opt(&inst, Metric::ExactEuclid).unwrap();
    assert!((hk.length - bb).abs() < 1e-9, "{} vs {bb}", hk.length);
    // every vertex lies on a unit-spaced boundary path or the internal spokes
    assert!(hk.length >= 9.0);
}

#[test]
fn branch_and_bound_agrees_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let inst = random_instance(&mut rng, 9);
        let d = inst.distance_matrix(Metric::ExactEuclid);
        let hk = held_karp_opt(&inst, Metric::ExactEuclid).unwrap();
        assert!((hk.length - branch_and_bound(&d, 9)).abs() < 1e-9);
    }
}

#[test]
fn cutting_plane_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let k = rng.random_range(8..=12);
        let inst = random_instance(&mut rng, k);
        let cp = solve_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
        let en = enumerate_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
        assert!(
            (cp.objective - en).abs() <= 1e-6,
            "{} vs {en}",
            cp.objective
        );
        assert!(check_feasibility(&cp.solution).is_feasible());
        let opt = held_karp_opt(&inst, Metric::ExactEuclid).unwrap().length;
        assert!(cp.objective <= opt + 1e-9);
    }
}

#[test]
fn cutting_plane_matches_enumeration_on_tiny_tetrahedra() {
    for n in 2..=3 {
        for m in 1..=3 {
            let inst = build_tetrahedron(n, m).unwrap();
            if inst.len() > 16 {
                continue;
            }
            let cp = solve_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
            let en = enumerate_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
            assert!((cp.objective - en).abs() <= 1e-6, "T({n},{m})");
        }
    }
}

/// The full relaxation with every subset row, written out directly.
fn explicit_relaxation(inst: &Instance) -> LpProblem {
    let n = inst.len();
    let edges = edge_list(n);
    let mut p = LpProblem::new(edges.len());
    for (e, &(u, v)) in edges.iter().enumerate() {
        p.objective[e] = inst.distance(u, v, Metric::ExactEuclid);
        p.bounds[e] = (0.0, 1.0);
    }
    for v in 0..n {
        let coeffs = (0..n)
            .filter(|&u| u != v)
            .map(|u| (edge_index(n, u, v), 1.0))
            .collect();
        p.add_row(Row::new(coeffs, Relation::Eq, 2.0));
    }
    for s in 0u32..(1 << n) {
        let size = s.count_ones() as usize;
        if s & 1 == 1 || size < 2 || size > n - 2 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
        let mut coeffs = Vec::new();
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                coeffs.push((edge_index(n, u, v), 1.0));
            }
        }
        p.add_row(Row::new(coeffs, Relation::Le, size as f64 - 1.0));
    }
    p
}

/// Lagrangian bound `y b + sum_j min_{x_j in bounds} (c - yA)_j x_j` for duals
/// projected onto their sign constraints; a valid lower bound for any `y`.
fn lagrangian_bound(p: &LpProblem, y: &[f64]) -> f64 {
    let y: Vec<f64> = y
        .iter()
        .zip(&p.rows)
        .map(|(&v, r)| match r.relation {
            Relation::Eq => v,
            Relation::Le => v.min(0.0),
            Relation::Ge => v.max(0.0),
        })
        .collect();
    let mut reduced = p.objective.clone();
    let mut bound = 0.0;
    for (r, &yi) in p.rows.iter().zip(&y) {
        bound += yi * r.rhs;
        for &(j, a) in &r.coeffs {
            reduced[j] -= yi * a;
        }
    }
    for (j, &d) in reduced.iter().enumerate() {
        let (lo, hi) = p.bounds[j];
        bound += if d >= 0.0 { d * lo } else { d * hi };
    }
    bound
}

#[test]
fn strong_duality_on_the_explicit_relaxation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..12 {
        let k = rng.random_range(6..=9);
        let inst = random_instance(&mut rng, k);
        let p = explicit_relaxation(&inst);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let dual = lagrangian_bound(&p, &sol.duals);
        assert!(
            (dual - sol.objective_value).abs() <= 1e-6,
            "dual {dual} vs primal {}",
            sol.objective_value
        );
        let cp = solve_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
        assert!((cp.objective - sol.objective_value).abs() <= 1e-6);
        assert!((enumerate_subtour_lp(&inst, Metric::ExactEuclid).unwrap() - dual).abs() <= 1e-6);
    }
}

fn degree_lp(inst: &Instance) -> LpProblem {
    let n = inst.len();
    let edges = edge_list(n);
    let mut p = LpProblem::new(edges.len());
    for (e, &(u, v)) in edges.iter().enumerate() {
        p.objective[e] = inst.distance(u, v, Metric::ExactEuclid);
        p.bounds[e] = (0.0, 1.0);
    }
    for v in 0..n {
        let coeffs = (0..n)
            .filter(|&u| u != v)
            .map(|u| (edge_index(n, u, v), 1.0))
            .collect();
        p.add_row(Row::new(coeffs, Relation::Eq, 2.0));
    }
    p
}

fn same_outcome(warm: &LpSolution, cold: &LpSolution) -> bool {
    warm.status == cold.status
        && (warm.status != LpStatus::Optimal
            || (warm.objective_value - cold.objective_value).abs()
                <= 1e-7 * cold.objective_value.abs().max(1.0))
}

#[test]
fn warm_started_cuts_match_cold_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let k = rng.random_range(6..=11);
        let inst = random_instance(&mut rng, k);
        let mut p = degree_lp(&inst);
        let mut warm = Simplex::new(&p).unwrap();
        let first = warm.solve().unwrap();
        assert!(same_outcome(&first, &solve_lp(&p).unwrap()));
        for _ in 0..rng.random_range(1..=6) {
            let mut verts: Vec<usize> = (0..k).collect();
            verts.shuffle(&mut rng);
            let size = rng.random_range(2..=k - 2);
            let mut subset = verts[..size].to_vec();
            subset.sort_unstable();
            let row = subset_row(k, &subset);
            let w = warm.add_row_and_resolve(&row).unwrap();
            p.add_row(row);
            let c = solve_lp(&p).unwrap();
            assert!(
                same_outcome(&w, &c),
                "warm {:?} {} vs cold {:?} {}",
                w.status,
                w.objective_value,
                c.status,
                c.objective_value
            );
        }
    }
}

#[test]
fn explicit_fractional_point_bounds_the_lp_from_above() {
    let (n, m) = (40, 27);
    let inst = build_modified(n, m).unwrap();
    let x = build_explicit_fractional(&inst).unwrap();
    assert!(check_feasibility(&x).is_feasible());
    let upper = x.objective(&inst, Metric::ExactEuclid);
    let lp = solve_subtour_lp(&inst, Metric::ExactEuclid)
        .unwrap()
        .objective;
    assert!(lp <= upper + 1e-9, "{lp} > {upper}");
    assert!(lp <= closed_form_opt_length(n, m).unwrap() + 1e-9);
}
