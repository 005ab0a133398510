//! Tours as cyclic vertex orders, the polygon validators, the decomposition of
//! hull-ordered tours into trips, and the optimum tour `T*` of `T'(n,m)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{hull_boundary, orientation, segments_intersect, Metric, Point};
use crate::instances::{
    gamma, i0_index, tetra_point, Family, Instance, LabelKind, VertexLabel, MODIFIED_MIN_M,
    MODIFIED_MIN_N,
};

/// A closed tour: every vertex index `0..n` exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Checks that `order` is a permutation of `0..n` with `n >= 3`.
    pub fn new(order: Vec<usize>, n: usize) -> Result<Self> {
        if order.len() != n {
            return Err(Error::InvalidTour(format!(
                "tour has {} entries, instance has {n} vertices",
                order.len()
            )));
        }
        if n < 3 {
            return Err(Error::InvalidTour(format!(
                "a tour needs 3 vertices, got {n}"
            )));
        }
        let mut seen = alloc::vec![false; n];
        for &v in &order {
            if v >= n {
                return Err(Error::InvalidTour(format!("vertex index {v} out of range")));
            }
            if core::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidTour(format!("vertex index {v} repeated")));
            }
        }
        Ok(Self { order })
    }

    pub fn for_instance(order: Vec<usize>, inst: &Instance) -> Result<Self> {
        Self::new(order, inst.len())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Edges `(order[k], order[k+1])`, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// The same cycle traversed the other way, still starting at `order[0]`.
    pub fn reversed(&self) -> Self {
        let mut order = Vec::with_capacity(self.order.len());
        order.push(self.order[0]);
        order.extend(self.order[1..].iter().rev());
        Self { order }
    }

    /// Rotation and direction normal form: starts at vertex 0 and
    /// `order[1] < order[n-1]`. Equal cycles have equal normal forms.
    pub fn canonical(&self) -> Self {
        let start = self.order.iter().position(|&v| v == 0).unwrap_or(0);
        let mut order: Vec<usize> = self.order[start..]
            .iter()
            .chain(&self.order[..start])
            .copied()
            .collect();
        if order.len() > 2 && order[1] > order[order.len() - 1] {
            order[1..].reverse();
        }
        Self { order }
    }

    /// One line of whitespace-separated 1-based vertex ids.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.order.len() * 4);
        for (k, v) in self.order.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", v + 1);
        }
        out.push('\n');
        out
    }

    pub fn parse_text(text: &str, n: usize) -> Result<Self> {
        let mut order = Vec::with_capacity(n);
        for (k, tok) in text.split_whitespace().enumerate() {
            let id: usize = tok.parse().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("bad vertex id `{tok}` at position {}", k + 1),
            })?;
            if id == 0 {
                return Err(Error::Parse {
                    line: 1,
                    msg: String::from("vertex ids are 1-based"),
                });
            }
            order.push(id - 1);
        }
        Self::new(order, n)
    }
}

/// Sum of consecutive distances including the closing edge.
pub fn tour_length(t: &Tour, inst: &Instance, metric: Metric) -> f64 {
    t.edges().map(|(u, v)| inst.distance(u, v, metric)).sum()
}

/// Same as [`tour_length`] against a precomputed row-major matrix.
pub fn tour_length_matrix(t: &Tour, dist: &[f64]) -> f64 {
    let n = t.len();
    t.edges().map(|(u, v)| dist[u * n + v]).sum()
}

/// No two edges meet except consecutive edges at their shared vertex.
/// Collinear overlap, including a consecutive edge folding back on the
/// previous one, counts as an intersection.
pub fn is_simple_polygon(t: &Tour, inst: &Instance) -> bool {
    let pts: Vec<Point> = t.order().iter().map(|&v| inst.point(v)).collect();
    simple_polygon(&pts)
}

/// [`is_simple_polygon`] on an explicit vertex sequence.
pub fn simple_polygon(pts: &[Point]) -> bool {
    let k = pts.len();
    if k < 3 {
        return false;
    }
    for i in 0..k {
        let (a, b, c) = (pts[i], pts[(i + 1) % k], pts[(i + 2) % k]);
        // consecutive edges a-b and b-c overlap when c lies back towards a
        if orientation(a, b, c) == Ordering::Equal {
            let dot = (a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y);
            if dot > 0.0 {
                return false;
            }
        }
    }
    for i in 0..k {
        let (p1, p2) = (pts[i], pts[(i + 1) % k]);
        for j in (i + 2)..k {
            if i == 0 && j == k - 1 {
                continue; // closing edge shares vertex 0
            }
            if segments_intersect(p1, p2, pts[j], pts[(j + 1) % k]) {
                return false;
            }
        }
    }
    true
}

/// The counterclockwise cyclic order of the hull vertices: the `3n` base
/// vertices for the tetrahedron families, the convex-hull boundary otherwise.
pub fn base_order(inst: &Instance) -> Vec<usize> {
    if inst.is_tetra_family() {
        (0..inst.base_count()).collect()
    } else {
        hull_boundary(&inst.points())
    }
}

/// Restricting `t` to the hull vertices gives their cyclic order, up to
/// rotation and reflection.
pub fn hull_order_ok(t: &Tour, inst: &Instance) -> bool {
    let base = base_order(inst);
    if base.len() <= 3 {
        return true;
    }
    let mut rank = alloc::vec![usize::MAX; inst.len()];
    for (r, &v) in base.iter().enumerate() {
        rank[v] = r;
    }
    let seq: Vec<usize> = t
        .order()
        .iter()
        .map(|&v| rank[v])
        .filter(|&r| r != usize::MAX)
        .collect();
    let k = seq.len();
    let forward = (0..k).all(|i| seq[(i + 1) % k] == (seq[i] + 1) % k);
    let backward = (0..k).all(|i| seq[i] == (seq[(i + 1) % k] + 1) % k);
    forward || backward
}

/// The side of the outer triangle a base edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
    C,
}

/// A base-to-base subpath with at least one internal vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trip {
    /// Vertex indices; first and last are consecutive base vertices.
    pub path: Vec<usize>,
    pub main_side: Side,
    /// First and last internal vertex (equal for one-vertex trips).
    pub connection: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub trips: Vec<Trip>,
    /// Edges between consecutive base vertices, lower rank first.
    pub base_edges: Vec<(usize, usize)>,
}

fn side_of_edge(inst: &Instance, from: usize) -> Side {
    match inst.label(from).kind {
        LabelKind::BaseA => Side::A,
        LabelKind::BaseB => Side::B,
        _ => Side::C,
    }
}

/// Splits a hull-ordered tour of a tetrahedron instance into trips and base
/// edges, oriented counterclockwise.
pub fn decompose_trips(t: &Tour, inst: &Instance) -> Result<Decomposition> {
    if !inst.is_tetra_family() {
        return Err(Error::Precondition(String::from(
            "trips are defined for tetrahedron instances only",
        )));
    }
    if !hull_order_ok(t, inst) {
        return Err(Error::Precondition(String::from(
            "tour does not visit the base vertices in hull order",
        )));
    }
    Ok(decompose_order(t.order(), inst.base_count(), |v| {
        side_of_edge(inst, v)
    }))
}

/// Decomposition of a cyclic order whose vertices `0..nb` are the base
/// vertices in counterclockwise order and appear in that cyclic order.
fn decompose_order(tour: &[usize], nb: usize, side: impl Fn(usize) -> Side) -> Decomposition {
    let len = tour.len();
    // orient counterclockwise and start at base vertex 0
    let start = tour.iter().position(|&v| v == 0).unwrap_or(0);
    let mut order: Vec<usize> = (0..len).map(|k| tour[(start + k) % len]).collect();
    let next_base = order[1..].iter().copied().find(|&v| v < nb);
    if next_base.is_some_and(|v| v != 1 % nb) {
        order[1..].reverse();
    }
    order.push(order[0]);

    let mut out = Decomposition::default();
    let mut from = 0;
    for k in 1..order.len() {
        let v = order[k];
        if v >= nb {
            continue;
        }
        let u = order[from];
        if k == from + 1 {
            out.base_edges.push((u, v));
        } else {
            let path = order[from..=k].to_vec();
            out.trips.push(Trip {
                connection: (path[1], path[path.len() - 2]),
                main_side: side(u),
                path,
            });
        }
        from = k;
    }
    out
}

/// Whether an edge multiset is a pseudo-tour: edges between consecutive base
/// vertices plus trips covering all internal vertices, such that consecutive
/// base vertices are joined by an edge exactly when no trip connects them,
/// and the whole is not a tour.
pub fn is_pseudo_tour(inst: &Instance, edges: &[(usize, usize)]) -> bool {
    if !inst.is_tetra_family() {
        return false;
    }
    let nv = inst.len();
    let nb = inst.base_count();
    let consecutive = |u: usize, v: usize| (u + 1) % nb == v || (v + 1) % nb == u;
    let key = |u: usize, v: usize| if (u + 1) % nb == v { u } else { v };

    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); nv];
    let mut edge_at = alloc::vec![0usize; nb];
    for &(u, v) in edges {
        if u >= nv || v >= nv || u == v {
            return false;
        }
        if u < nb && v < nb {
            if !consecutive(u, v) {
                return false;
            }
            edge_at[key(u, v)] += 1;
        } else {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    if edge_at.iter().any(|&c| c > 1) {
        return false;
    }
    // every internal vertex lies inside exactly one trip
    if (nb..nv).any(|v| adj[v].len() != 2) {
        return false;
    }
    let mut trip_at = alloc::vec![0usize; nb];
    let mut seen = alloc::vec![false; nv];
    for b in 0..nb {
        for &first in &adj[b] {
            if seen[first] {
                continue;
            }
            let (mut prev, mut cur) = (b, first);
            while cur >= nb {
                seen[cur] = true;
                let nxt = if adj[cur][0] == prev {
                    adj[cur][1]
                } else {
                    adj[cur][0]
                };
                prev = cur;
                cur = nxt;
            }
            if !consecutive(b, cur) {
                return false;
            }
            trip_at[key(b, cur)] += 1;
        }
    }
    if (nb..nv).any(|v| !seen[v]) {
        return false; // an internal cycle is not a trip
    }
    if (0..nb).any(|k| (trip_at[k] > 0) == (edge_at[k] > 0)) {
        return false;
    }
    !edges_form_tour(nv, edges)
}

/// A Hamiltonian cycle on `nv` vertices.
pub fn edges_form_tour(nv: usize, edges: &[(usize, usize)]) -> bool {
    if edges.len() != nv || nv < 3 {
        return false;
    }
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); nv];
    let mut distinct = BTreeMap::new();
    for &(u, v) in edges {
        if u >= nv || v >= nv || u == v {
            return false;
        }
        adj[u].push(v);
        adj[v].push(u);
        *distinct.entry((u.min(v), u.max(v))).or_insert(0usize) += 1;
    }
    if distinct.len() != nv || adj.iter().any(|a| a.len() != 2) {
        return false;
    }
    let (mut prev, mut cur, mut steps) = (0, adj[0][0], 1);
    while cur != 0 {
        let nxt = if adj[cur][0] == prev {
            adj[cur][1]
        } else {
            adj[cur][0]
        };
        prev = cur;
        cur = nxt;
        steps += 1;
    }
    steps == nv
}

fn modified_params(inst: &Instance) -> Result<(usize, usize, usize)> {
    match (inst.family(), inst.tetra_params(), inst.i0()) {
        (Family::TetraModified, Some((n, m)), Some(i0)) if i0 < m => Ok((n, m, i0)),
        _ => Err(Error::Precondition(format!(
            "T* is defined on T'(n,m) with at least one removed layer kept below M, got {}",
            inst.name()
        ))),
    }
}

/// The optimum tour `T*` of `T'(n,m)`, trip between `c_k` and `c_{k+1}` with
/// `k = floor((n-1)/2)`.
pub fn build_tstar(inst: &Instance) -> Result<Tour> {
    let (n, _, _) = modified_params(inst)?;
    build_tstar_at(inst, (n - 1) / 2)
}

/// `T*` with its trip between `c_k` and `c_{k+1}`. For even `n` both
/// `k = (n-2)/2` and `k = n/2` are mirror images of each other.
pub fn build_tstar_at(inst: &Instance, k: usize) -> Result<Tour> {
    let (n, m, i0) = modified_params(inst)?;
    if k + 1 >= n {
        return Err(Error::Precondition(format!(
            "trip start c_{k} must leave room for c_{} on side c",
            k + 1
        )));
    }
    let at = |l: VertexLabel| inst.index_of(l);
    let mut order = Vec::with_capacity(inst.len());
    order.extend((0..=k).map(|i| at(VertexLabel::c(i))));
    order.extend((i0..m).map(|j| at(VertexLabel::e(j))));
    order.push(at(VertexLabel::g(m)));
    order.extend((i0..m).rev().map(|j| at(VertexLabel::g(j))));
    order.extend((i0..m).rev().map(|j| at(VertexLabel::f(j))));
    order.extend((k + 1..n).map(|i| at(VertexLabel::c(i))));
    order.extend((0..n).map(|i| at(VertexLabel::a(i))));
    order.extend((0..n).map(|i| at(VertexLabel::b(i))));
    Tour::for_instance(order, inst)
}

fn check_eq7(n: usize, m: usize) -> Result<()> {
    if n < MODIFIED_MIN_N || m < MODIFIED_MIN_M {
        return Err(Error::Precondition(format!(
            "requires n >= {MODIFIED_MIN_N} and m >= {MODIFIED_MIN_M}, got n={n}, m={m}"
        )));
    }
    Ok(())
}

/// Exact Euclidean length of `T*` on `T'(n,m)`:
/// `3n - 1 + 3 d(M, e_i0) - gamma + d(g_i0, f_{m-1}) + d(c_k, e_i0) + d(c_{k+1}, f_i0)`.
pub fn closed_form_opt_length(n: usize, m: usize) -> Result<f64> {
    check_eq7(n, m)?;
    let i0 = i0_index(n, m)?;
    let p = |l| tetra_point(n, m, l);
    let k = (n - 1) / 2;
    let big_m = p(VertexLabel::g(m));
    Ok(
        (3 * n) as f64 - 1.0 + 3.0 * big_m.dist(p(VertexLabel::e(i0))) - gamma(n, m)
            + p(VertexLabel::g(i0)).dist(p(VertexLabel::f(m - 1)))
            + p(VertexLabel::c(k)).dist(p(VertexLabel::e(i0)))
            + p(VertexLabel::c(k + 1)).dist(p(VertexLabel::f(i0))),
    )
}

/// `K = 3n - 1 + (3(m - i0) - 1) gamma`.
pub fn k_constant(n: usize, m: usize) -> Result<f64> {
    check_eq7(n, m)?;
    let i0 = i0_index(n, m)?;
    Ok((3 * n) as f64 - 1.0 + (3 * (m - i0)) as f64 * gamma(n, m) - gamma(n, m))
}

/// Lower and upper bound on the optimum tour length of `T'(n,m)` when
/// `n <= 3m/2`: `4n + 4n/sqrt(3) - 69` and `4n + 4n/sqrt(3) - 17`.
pub fn opt_length_bounds(n: usize) -> (f64, f64) {
    let base = 4.0 * n as f64 + 4.0 * n as f64 / crate::instances::SQRT3;
    (base - 69.0, base - 17.0)
}
