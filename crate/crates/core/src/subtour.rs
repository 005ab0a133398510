//! The subtour relaxation of the TSP.
//!
//! `min sum c_e x_e` over the complete graph subject to `x(delta(v)) = 2`,
//! `x(E(S)) <= |S| - 1` for every proper vertex subset with at least two
//! vertices, and `0 <= x_e <= 1`. [`solve_subtour_lp`] starts from the degree
//! system and adds one violated subset row per round, found as a global
//! minimum cut of the current solution's support graph.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::instances::{Family, Instance, VertexLabel};
use crate::lp::{LpProblem, LpStatus, Relation, Row, Simplex};
use crate::mincut::{components, cut_weight, stoer_wagner};

/// A cut of weight below `2 - CUT_VIOLATION` is a violated subset row.
pub const CUT_VIOLATION: f64 = 1e-6;
/// Largest vertex count [`enumerate_subtour_lp`] accepts.
pub const ENUMERATION_LIMIT: usize = 16;

/// Index of edge `{u, v}`, `u != v`, in the lexicographic list of pairs.
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// All pairs `u < v` in [`edge_index`] order.
pub fn edge_list(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            out.push((u, v));
        }
    }
    out
}

/// Edge values of a point of the relaxation; absent edges are zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FractionalSolution {
    n: usize,
    values: BTreeMap<(usize, usize), f64>,
}

impl FractionalSolution {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            values: BTreeMap::new(),
        }
    }

    /// Indicator of a cyclic vertex order.
    pub fn from_cycle(n: usize, order: &[usize]) -> Self {
        let mut x = Self::new(n);
        for k in 0..order.len() {
            x.add(order[k], order[(k + 1) % order.len()], 1.0);
        }
        x
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Sets `x_{uv}`; zero removes the entry.
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u}, {v})");
        let key = (u.min(v), u.max(v));
        if value == 0.0 {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
    }

    pub fn add(&mut self, u: usize, v: usize, value: f64) {
        let cur = self.get(u, v);
        self.set(u, v, cur + value);
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values
            .get(&(u.min(v), u.max(v)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Nonzero entries `(u, v, x)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values.iter().map(|(&(u, v), &x)| (u, v, x))
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.edges()
            .filter(|&(a, b, _)| a == v || b == v)
            .map(|e| e.2)
            .sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = alloc::vec![0.0; self.n];
        for (u, v, x) in self.edges() {
            d[u] += x;
            d[v] += x;
        }
        d
    }

    pub fn objective(&self, inst: &Instance, metric: Metric) -> f64 {
        self.edges()
            .map(|(u, v, x)| x * inst.distance(u, v, metric))
            .sum()
    }

    /// Dense symmetric weight matrix.
    pub fn weight_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut w = alloc::vec![0.0; n * n];
        for (u, v, x) in self.edges() {
            w[u * n + v] = x;
            w[v * n + u] = x;
        }
        w
    }

    /// Lines `u v value`, 1-based ids, 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (u, v, x) in self.edges() {
            let _ = writeln!(out, "{} {} {}", u + 1, v + 1, crate::fmt::sig(x, 12));
        }
        out
    }

    pub fn parse_text(text: &str, n: usize) -> Result<Self> {
        let mut x = Self::new(n);
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: no + 1, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(format!("expected `u v value`, got `{line}`")));
            }
            let u: usize = f[0]
                .parse()
                .map_err(|_| bad(format!("bad id `{}`", f[0])))?;
            let v: usize = f[1]
                .parse()
                .map_err(|_| bad(format!("bad id `{}`", f[1])))?;
            let val: f64 = f[2]
                .parse()
                .map_err(|_| bad(format!("bad value `{}`", f[2])))?;
            if u == 0 || v == 0 || u > n || v > n || u == v {
                return Err(bad(format!(
                    "edge ({u}, {v}) is not a pair of ids in 1..={n}"
                )));
            }
            x.set(u - 1, v - 1, val);
        }
        Ok(x)
    }
}

/// A vertex subset and the weight of its cut.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCertificate {
    pub subset: Vec<usize>,
    pub cut_weight: f64,
}

/// A global minimum cut of the support graph when it is violated.
/// A disconnected support yields its smallest component.
pub fn min_cut_separate(x: &FractionalSolution) -> Option<CutCertificate> {
    min_cut_separate_with(x, CUT_VIOLATION)
}

/// [`min_cut_separate`] with threshold `2 - violation`.
pub fn min_cut_separate_with(x: &FractionalSolution, violation: f64) -> Option<CutCertificate> {
    let cut = global_min_cut(x)?;
    (cut.cut_weight < 2.0 - violation).then_some(cut)
}

fn global_min_cut(x: &FractionalSolution) -> Option<CutCertificate> {
    let n = x.num_vertices();
    if n < 2 {
        return None;
    }
    let w = x.weight_matrix();
    let comps = components(&w, n, 0.0);
    if comps.len() > 1 {
        let smallest = comps.into_iter().min_by_key(|c| c.len()).expect("nonempty");
        return Some(CutCertificate {
            cut_weight: cut_weight(&w, n, &smallest),
            subset: smallest,
        });
    }
    let c = stoer_wagner(&w, n);
    Some(CutCertificate {
        subset: c.side,
        cut_weight: c.weight,
    })
}

/// First violated condition of the relaxation, if any.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible { min_cut: f64 },
    Bound { u: usize, v: usize, value: f64 },
    Degree { vertex: usize, degree: f64 },
    Cut(CutCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Checks bounds (within `1e-9`), degrees (within `1e-9`) and the minimum
/// cut (at least `2 - 1e-6`), in that order.
pub fn check_feasibility(x: &FractionalSolution) -> Feasibility {
    for (u, v, value) in x.edges() {
        if !(-1e-9..=1.0 + 1e-9).contains(&value) {
            return Feasibility::Bound { u, v, value };
        }
    }
    for (vertex, &degree) in x.degrees().iter().enumerate() {
        if (degree - 2.0).abs() > 1e-9 {
            return Feasibility::Degree { vertex, degree };
        }
    }
    match global_min_cut(x) {
        Some(c) if c.cut_weight < 2.0 - CUT_VIOLATION => Feasibility::Cut(c),
        Some(c) => Feasibility::Feasible {
            min_cut: c.cut_weight,
        },
        None => Feasibility::Feasible {
            min_cut: f64::INFINITY,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtourOptions {
    /// Cuts lighter than `2 - cut_violation` are added.
    pub cut_violation: f64,
    /// Rounds of separation before giving up.
    pub max_rounds: usize,
    /// Consecutive cuts that leave the objective unchanged before giving up.
    pub stall_limit: usize,
}

impl Default for SubtourOptions {
    fn default() -> Self {
        Self {
            cut_violation: CUT_VIOLATION,
            max_rounds: 10_000,
            stall_limit: 200,
        }
    }
}

/// Optimum of the subtour relaxation with the cuts that were needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtourLp {
    pub solution: FractionalSolution,
    pub objective: f64,
    pub cuts: Vec<CutCertificate>,
    pub lp_iterations: usize,
}

/// Row `x(E(S)) <= |S| - 1`.
pub fn subset_row(n: usize, subset: &[usize]) -> Row {
    let mut coeffs = Vec::with_capacity(subset.len() * subset.len() / 2);
    for (a, &u) in subset.iter().enumerate() {
        for &v in &subset[a + 1..] {
            coeffs.push((edge_index(n, u, v), 1.0));
        }
    }
    Row::new(coeffs, Relation::Le, subset.len() as f64 - 1.0)
}

fn degree_lp(inst: &Instance, metric: Metric) -> LpProblem {
    let n = inst.len();
    let edges = edge_list(n);
    let mut p = LpProblem::new(edges.len());
    p.objective = edges
        .iter()
        .map(|&(u, v)| inst.distance(u, v, metric))
        .collect();
    p.bounds = alloc::vec![(0.0, 1.0); edges.len()];
    for v in 0..n {
        let coeffs = (0..n)
            .filter(|&u| u != v)
            .map(|u| (edge_index(n, u, v), 1.0))
            .collect();
        p.add_row(Row::new(coeffs, Relation::Eq, 2.0));
    }
    p
}

/// Nearest-neighbour cycle from vertex 0; its edges start the simplex at
/// their upper bound so the degree rows hold from the first basis on.
fn crash_cycle(inst: &Instance, metric: Metric) -> Vec<usize> {
    let n = inst.len();
    let mut used = alloc::vec![false; n];
    let mut order = alloc::vec![0];
    used[0] = true;
    for _ in 1..n {
        let cur = *order.last().expect("nonempty");
        let next = (0..n)
            .filter(|&v| !used[v])
            .min_by(|&a, &b| {
                inst.distance(cur, a, metric)
                    .total_cmp(&inst.distance(cur, b, metric))
            })
            .expect("unvisited vertex");
        used[next] = true;
        order.push(next);
    }
    order
}

pub fn solve_subtour_lp(inst: &Instance, metric: Metric) -> Result<SubtourLp> {
    solve_subtour_lp_with(inst, metric, SubtourOptions::default())
}

pub fn solve_subtour_lp_with(
    inst: &Instance,
    metric: Metric,
    opts: SubtourOptions,
) -> Result<SubtourLp> {
    let n = inst.len();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "the subtour relaxation needs at least 3 vertices, got {n}"
        )));
    }
    let edges = edge_list(n);
    let p = degree_lp(inst, metric);
    let mut lp = Simplex::new(&p)?;
    let cycle = crash_cycle(inst, metric);
    let upper: Vec<usize> = (0..n)
        .map(|k| edge_index(n, cycle[k], cycle[(k + 1) % n]))
        .collect();
    lp.start_at_upper(&upper);
    let mut sol = lp.solve()?;
    let mut cuts: Vec<CutCertificate> = Vec::new();
    let mut stall = 0;
    for _ in 0..opts.max_rounds {
        if sol.status != LpStatus::Optimal {
            return Err(Error::Numerical(format!(
                "subtour LP reported {:?}, which is impossible with {n} vertices",
                sol.status
            )));
        }
        let x = to_fractional(n, &edges, &sol.values);
        let Some(cut) = min_cut_separate_with(&x, opts.cut_violation) else {
            return Ok(SubtourLp {
                objective: sol.objective_value,
                solution: x,
                cuts,
                lp_iterations: lp.iterations(),
            });
        };
        if cuts.iter().any(|c| c.subset == cut.subset) {
            return Err(Error::Numerical(format!(
                "separation repeated a subset of {} vertices already in the LP",
                cut.subset.len()
            )));
        }
        let before = sol.objective_value;
        sol = lp.add_row_and_resolve(&subset_row(n, &cut.subset))?;
        cuts.push(cut);
        if sol.objective_value > before + 1e-9 {
            stall = 0;
        } else {
            stall += 1;
            if stall >= opts.stall_limit {
                return Err(Error::Numerical(format!(
                    "{stall} consecutive cuts left the objective at {before}"
                )));
            }
        }
    }
    Err(Error::Numerical(format!(
        "no convergence within {} separation rounds",
        opts.max_rounds
    )))
}

fn to_fractional(n: usize, edges: &[(usize, usize)], values: &[f64]) -> FractionalSolution {
    let mut x = FractionalSolution::new(n);
    for (&(u, v), &val) in edges.iter().zip(values) {
        // clean simplex noise so the support graph is exact
        let val = if val.abs() < 1e-10 {
            0.0
        } else if (val - 1.0).abs() < 1e-10 {
            1.0
        } else {
            val
        };
        x.set(u, v, val);
    }
    x
}

/// Optimum of the relaxation with every subset row present, solved through
/// its dual. Exponential; at most [`ENUMERATION_LIMIT`] vertices.
///
/// Dual variables: `y_v` (free) for the degree rows, `z_S >= 0` for the
/// subset rows over all `S` avoiding vertex 0 with `2 <= |S| <= n - 2`, and
/// `u_e >= 0` for the upper bounds. One row per edge:
/// `y_i + y_j - sum_{S contains i,j} z_S - u_e <= c_e`, maximizing
/// `2 sum y - sum (|S| - 1) z_S - sum u`.
pub fn enumerate_subtour_lp(inst: &Instance, metric: Metric) -> Result<f64> {
    let n = inst.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            what: "subset enumeration",
            limit: ENUMERATION_LIMIT,
            got: n,
        });
    }
    if n < 3 {
        return Err(Error::Precondition(format!(
            "the subtour relaxation needs at least 3 vertices, got {n}"
        )));
    }
    let edges = edge_list(n);
    let ne = edges.len();
    let subsets: Vec<u32> = (0u32..(1 << n))
        .filter(|&s| s & 1 == 0 && (2..=n - 2).contains(&(s.count_ones() as usize)))
        .collect();
    let nvars = n + subsets.len() + ne;
    let mut p = LpProblem::new(nvars);
    let mut rows: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); ne];
    for v in 0..n {
        p.objective[v] = -2.0;
        p.bounds[v] = (f64::NEG_INFINITY, f64::INFINITY);
        for u in 0..n {
            if u != v {
                rows[edge_index(n, u, v)].push((v, 1.0));
            }
        }
    }
    for (k, &s) in subsets.iter().enumerate() {
        let var = n + k;
        p.objective[var] = f64::from(s.count_ones()) - 1.0;
        let members: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                rows[edge_index(n, u, v)].push((var, -1.0));
            }
        }
    }
    for (e, row) in rows.iter_mut().enumerate() {
        let var = n + subsets.len() + e;
        p.objective[var] = 1.0;
        row.push((var, -1.0));
    }
    for (e, coeffs) in rows.into_iter().enumerate() {
        let (u, v) = edges[e];
        p.add_row(Row::new(coeffs, Relation::Le, inst.distance(u, v, metric)));
    }
    let sol = crate::lp::solve_lp(&p)?;
    match sol.status {
        LpStatus::Optimal => Ok(-sol.objective_value),
        other => Err(Error::Numerical(format!(
            "enumeration dual reported {other:?}"
        ))),
    }
}

/// The half-integral point of the relaxation for `T'(n,m)`: value 1 on the
/// base paths `c_1..c_n`, `a_1..a_n`, `b_1..b_n` and the internal paths
/// `e_i0..e_{m-1}`, `f_i0..f_{m-1}`, `g_i0..g_m`; value 1/2 on the triangles
/// `(c_0, e_i0, c_1)`, `(a_0, f_i0, a_1)`, `(b_0, g_i0, b_1)` and
/// `(e_{m-1}, M, f_{m-1})`.
pub fn build_explicit_fractional(inst: &Instance) -> Result<FractionalSolution> {
    let (n, m, i0) = match (inst.family(), inst.tetra_params(), inst.i0()) {
        (Family::TetraModified, Some((n, m)), Some(i0)) if i0 < m && n >= 2 => (n, m, i0),
        _ => {
            return Err(Error::Precondition(format!(
                "the explicit solution is defined on T'(n,m) with i0 < m, got {}",
                inst.name()
            )))
        }
    };
    let at = |l: VertexLabel| inst.index_of(l);
    let mut x = FractionalSolution::new(inst.len());
    let path = |x: &mut FractionalSolution, labels: &[VertexLabel]| {
        for w in labels.windows(2) {
            x.add(at(w[0]), at(w[1]), 1.0);
        }
    };
    let side = |f: fn(usize) -> VertexLabel| -> Vec<VertexLabel> { (1..=n).map(f).collect() };
    path(&mut x, &side(VertexLabel::c));
    path(&mut x, &side(VertexLabel::a));
    path(&mut x, &side(VertexLabel::b));
    path(&mut x, &(i0..m).map(VertexLabel::e).collect::<Vec<_>>());
    path(&mut x, &(i0..m).map(VertexLabel::f).collect::<Vec<_>>());
    path(&mut x, &(i0..=m).map(VertexLabel::g).collect::<Vec<_>>());
    let triangles = [
        [VertexLabel::c(0), VertexLabel::e(i0), VertexLabel::c(1)],
        [VertexLabel::a(0), VertexLabel::f(i0), VertexLabel::a(1)],
        [VertexLabel::b(0), VertexLabel::g(i0), VertexLabel::b(1)],
        [
            VertexLabel::e(m - 1),
            VertexLabel::g(m),
            VertexLabel::f(m - 1),
        ],
    ];
    for t in triangles {
        for k in 0..3 {
            x.add(at(t[k]), at(t[(k + 1) % 3]), 0.5);
        }
    }
    Ok(x)
}

/// Lower and upper bound on the subtour LP value of `T'(n,m)` when
/// `n <= 3m/2`: `3n + 3n/sqrt(3) - 33` and `3n + 3n/sqrt(3)`.
pub fn lp_value_bounds(n: usize) -> (f64, f64) {
    let base = 3.0 * n as f64 + 3.0 * n as f64 / crate::instances::SQRT3;
    (base - 33.0, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::instances::build_modified;
    use alloc::vec;

    #[test]
    fn edge_indexing_is_a_bijection() {
        let n = 7;
        for (k, &(u, v)) in edge_list(n).iter().enumerate() {
            assert_eq!(edge_index(n, u, v), k);
            assert_eq!(edge_index(n, v, u), k);
        }
    }

    #[test]
    fn triangle_is_its_perimeter() {
        let p = Point::new;
        let inst = Instance::imported("t", vec![p(0., 0.), p(3., 0.), p(0., 4.)]).unwrap();
        let r = solve_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
        assert!((r.objective - 12.0).abs() < 1e-9);
        assert!(r.solution.edges().all(|(_, _, x)| (x - 1.0).abs() < 1e-12));
        let e = enumerate_subtour_lp(&inst, Metric::ExactEuclid).unwrap();
        assert!((e - 12.0).abs() < 1e-9);
    }

    #[test]
    fn unit_square() {
        let p = Point::new;
        let inst =
            Instance::imported("sq", vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]).unwrap();
        assert!(
            (solve_subtour_lp(&inst, Metric::ExactEuclid)
                .unwrap()
                .objective
                - 4.0)
                .abs()
                < 1e-9
        );
        assert!((enumerate_subtour_lp(&inst, Metric::ExactEuclid).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn separation_examples() {
        let cycle = FractionalSolution::from_cycle(6, &[0, 1, 2, 3, 4, 5]);
        assert!(min_cut_separate(&cycle).is_none());
        assert!(check_feasibility(&cycle).is_feasible());

        let mut two = FractionalSolution::from_cycle(6, &[0, 1, 2]);
        for (u, v) in [(3, 4), (4, 5), (3, 5)] {
            two.set(u, v, 1.0);
        }
        let c = min_cut_separate(&two).unwrap();
        assert_eq!(c.cut_weight, 0.0);
        assert_eq!(c.subset.len(), 3);
        assert!(matches!(check_feasibility(&two), Feasibility::Cut(_)));

        let mut env = FractionalSolution::new(6);
        for (u, v, x) in [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (0, 2, 0.5),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (3, 5, 0.5),
            (0, 3, 0.5),
            (2, 5, 0.5),
        ] {
            env.set(u, v, x);
        }
        let c = min_cut_separate(&env).unwrap();
        assert!((c.cut_weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feasibility_reports_first_problem() {
        let mut x = FractionalSolution::from_cycle(4, &[0, 1, 2, 3]);
        x.set(0, 1, 1.5);
        assert!(matches!(
            check_feasibility(&x),
            Feasibility::Bound { u: 0, v: 1, .. }
        ));
        x.set(0, 1, 0.5);
        assert!(matches!(
            check_feasibility(&x),
            Feasibility::Degree { vertex: 0, .. }
        ));
    }

    #[test]
    fn text_round_trip() {
        let mut x = FractionalSolution::new(4);
        x.set(0, 1, 0.5);
        x.set(2, 3, 1.0 / 3.0);
        let text = x.to_text();
        assert_eq!(text, "1 2 0.5\n3 4 0.333333333333\n");
        let back = FractionalSolution::parse_text(&text, 4).unwrap();
        assert_eq!(back.get(0, 1), 0.5);
        assert!((back.get(2, 3) - 1.0 / 3.0).abs() < 1e-12);
        assert!(FractionalSolution::parse_text("1 1 0.5", 4).is_err());
        assert!(FractionalSolution::parse_text("1 5 0.5", 4).is_err());
    }

    #[test]
    fn explicit_solution_48_24() {
        let inst = build_modified(48, 24).unwrap();
        let x = build_explicit_fractional(&inst).unwrap();
        assert!(x.degrees().iter().all(|&d| (d - 2.0).abs() < 1e-12));
        assert!(check_feasibility(&x).is_feasible());
        let obj = x.objective(&inst, Metric::ExactEuclid);
        let (lo, hi) = lp_value_bounds(48);
        assert!((hi - 227.14).abs() < 0.01);
        assert!(lo <= obj && obj <= hi, "{lo} <= {obj} <= {hi}");
    }

    #[test]
    fn enumeration_size_guard() {
        let pts: Vec<Point> = (0..17)
            .map(|i| Point::new(i as f64, (i * i % 7) as f64))
            .collect();
        let inst = Instance::imported("big", pts).unwrap();
        assert!(matches!(
            enumerate_subtour_lp(&inst, Metric::ExactEuclid),
            Err(Error::SizeGuard {
                limit: 16,
                got: 17,
                ..
            })
        ));
    }
}
