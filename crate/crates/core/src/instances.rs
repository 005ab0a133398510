//! The three instance families.
//!
//! Tetrahedron instances `T(n,m)` place `n - 1` equidistant points on each side
//! of an equilateral triangle `ABC` (side length `n`) and `m - 1` equidistant
//! points on each of the three segments joining a corner to the center `M`.
//! `T'(n,m)` drops the internal points closer than `max(10, 4 + 4 gamma)` to a
//! corner. `P(n,d)` puts `n` unit-spaced points on each of three parallel
//! lines at distance `d`.
//!
//! Vertex order is fixed: base vertices counterclockwise from `A = c_0`
//! (`c_0..c_{n-1}`, `a_0..a_{n-1}`, `b_0..b_{n-1}`), then `e`, `f`, `g` by
//! ascending index with `M` stored last as `g_m`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geometry::{Metric, Point};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Smallest `n` accepted by [`build_modified`].
pub const MODIFIED_MIN_N: usize = 40;
/// Smallest `m` accepted by [`build_modified`].
pub const MODIFIED_MIN_M: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelKind {
    BaseA,
    BaseB,
    BaseC,
    InternalE,
    InternalF,
    InternalG,
    /// A point of the three-lines family; index is `row * n + column`.
    Line,
    /// A point read from a TSPLIB file; index is the file id minus one.
    Imported,
}

/// Symbolic identity of a vertex, e.g. `c_3` or `e_9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexLabel {
    pub kind: LabelKind,
    pub index: usize,
}

impl VertexLabel {
    pub const fn new(kind: LabelKind, index: usize) -> Self {
        Self { kind, index }
    }
    pub const fn a(i: usize) -> Self {
        Self::new(LabelKind::BaseA, i)
    }
    pub const fn b(i: usize) -> Self {
        Self::new(LabelKind::BaseB, i)
    }
    pub const fn c(i: usize) -> Self {
        Self::new(LabelKind::BaseC, i)
    }
    pub const fn e(j: usize) -> Self {
        Self::new(LabelKind::InternalE, j)
    }
    pub const fn f(j: usize) -> Self {
        Self::new(LabelKind::InternalF, j)
    }
    pub const fn g(j: usize) -> Self {
        Self::new(LabelKind::InternalG, j)
    }

    pub fn is_base(self) -> bool {
        matches!(
            self.kind,
            LabelKind::BaseA | LabelKind::BaseB | LabelKind::BaseC
        )
    }

    pub fn is_internal(self) -> bool {
        matches!(
            self.kind,
            LabelKind::InternalE | LabelKind::InternalF | LabelKind::InternalG
        )
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            LabelKind::BaseA => "a",
            LabelKind::BaseB => "b",
            LabelKind::BaseC => "c",
            LabelKind::InternalE => "e",
            LabelKind::InternalF => "f",
            LabelKind::InternalG => "g",
            LabelKind::Line => "p",
            LabelKind::Imported => "v",
        };
        write!(f, "{prefix}_{}", self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Tetra,
    TetraModified,
    ThreeLines,
    Imported,
}

impl Family {
    /// Short tag used in exported names and CSV rows.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Tetra => "tetra",
            Family::TetraModified => "tetramod",
            Family::ThreeLines => "lines",
            Family::Imported => "imported",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Tetra { n: usize, m: usize },
    Lines { n: usize, d: f64 },
    Imported,
}

/// A labeled point set with its family metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    family: Family,
    params: Params,
    vertices: Vec<(VertexLabel, Point)>,
    gamma: Option<f64>,
    i0: Option<usize>,
    forced: bool,
}

impl Instance {
    /// An instance outside the generated families, e.g. read from a file.
    pub fn imported(name: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        if let Some(p) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::Precondition(format!(
                "point {} is not finite",
                p + 1
            )));
        }
        let vertices = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| (VertexLabel::new(LabelKind::Imported, i), p))
            .collect();
        Ok(Self {
            name: name.into(),
            family: Family::Imported,
            params: Params::Imported,
            vertices,
            gamma: None,
            i0: None,
            forced: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn family(&self) -> Family {
        self.family
    }
    pub fn params(&self) -> Params {
        self.params
    }
    /// Internal-vertex spacing for the tetrahedron families.
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }
    /// Smallest retained internal index of a modified instance.
    pub fn i0(&self) -> Option<usize> {
        self.i0
    }
    /// Built below the `n >= 40, m >= 22` threshold for illustration only.
    pub fn is_forced(&self) -> bool {
        self.forced
    }

    /// `(n, m)` of a tetrahedron-family instance.
    pub fn tetra_params(&self) -> Option<(usize, usize)> {
        match self.params {
            Params::Tetra { n, m } => Some((n, m)),
            _ => None,
        }
    }

    pub fn is_tetra_family(&self) -> bool {
        matches!(self.family, Family::Tetra | Family::TetraModified)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[(VertexLabel, Point)] {
        &self.vertices
    }
    pub fn point(&self, i: usize) -> Point {
        self.vertices[i].1
    }
    pub fn label(&self, i: usize) -> VertexLabel {
        self.vertices[i].0
    }
    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| v.1).collect()
    }

    pub fn distance(&self, i: usize, j: usize, metric: Metric) -> f64 {
        metric.distance(self.point(i), self.point(j))
    }

    pub fn distance_matrix(&self, metric: Metric) -> Vec<f64> {
        metric.matrix(&self.points())
    }

    /// Number of base vertices (`3n`) for tetrahedron families, else 0.
    pub fn base_count(&self) -> usize {
        match (self.family, self.params) {
            (Family::Tetra | Family::TetraModified, Params::Tetra { n, .. }) => 3 * n,
            _ => 0,
        }
    }

    /// Maps an aliased label to the one it is stored under:
    /// `A = c_0 = b_n = e_0`, `B = a_0 = c_n = f_0`, `C = b_0 = a_n = g_0`,
    /// `M = e_m = f_m = g_m`.
    pub fn canonical(&self, label: VertexLabel) -> VertexLabel {
        let Some((n, m)) = self.tetra_params() else {
            return label;
        };
        use LabelKind::*;
        match (label.kind, label.index) {
            (BaseB, i) if i == n => VertexLabel::c(0),
            (InternalE, 0) => VertexLabel::c(0),
            (BaseC, i) if i == n => VertexLabel::a(0),
            (InternalF, 0) => VertexLabel::a(0),
            (BaseA, i) if i == n => VertexLabel::b(0),
            (InternalG, 0) => VertexLabel::b(0),
            (InternalE | InternalF, j) if j == m => VertexLabel::g(m),
            _ => label,
        }
    }

    /// Position of a vertex given any of its labels, `None` if it is absent
    /// (out of range, or removed by the modification).
    pub fn find(&self, label: VertexLabel) -> Option<usize> {
        let label = self.canonical(label);
        match self.params {
            Params::Tetra { n, m } => {
                let lo = self.i0.unwrap_or(1);
                let per = m - lo; // retained e (or f) vertices, M excluded
                let idx = match label.kind {
                    LabelKind::BaseC if label.index < n => label.index,
                    LabelKind::BaseA if label.index < n => n + label.index,
                    LabelKind::BaseB if label.index < n => 2 * n + label.index,
                    LabelKind::InternalE if (lo..m).contains(&label.index) => {
                        3 * n + label.index - lo
                    }
                    LabelKind::InternalF if (lo..m).contains(&label.index) => {
                        3 * n + per + label.index - lo
                    }
                    LabelKind::InternalG if (lo..=m).contains(&label.index) => {
                        3 * n + 2 * per + label.index - lo
                    }
                    _ => return None,
                };
                debug_assert_eq!(self.vertices[idx].0, label);
                Some(idx)
            }
            Params::Lines { .. } if label.kind == LabelKind::Line => {
                (label.index < self.len()).then_some(label.index)
            }
            Params::Imported if label.kind == LabelKind::Imported => {
                (label.index < self.len()).then_some(label.index)
            }
            _ => None,
        }
    }

    /// [`find`](Self::find) for labels that must exist.
    pub fn index_of(&self, label: VertexLabel) -> usize {
        self.find(label)
            .unwrap_or_else(|| panic!("vertex {label} is not part of {}", self.name))
    }

    /// Smallest pairwise distance (O(N^2)).
    pub fn min_pairwise_distance(&self) -> f64 {
        let pts = self.points();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.min(pts[i].dist(pts[j]));
            }
        }
        best
    }
}

/// Internal-vertex spacing `n / (sqrt(3) m)`.
pub fn gamma(n: usize, m: usize) -> f64 {
    n as f64 / (SQRT3 * m as f64)
}

/// Internal vertices closer than this to a corner are dropped in `T'(n,m)`.
pub fn removal_threshold(gamma: f64) -> f64 {
    10f64.max(4.0 + 4.0 * gamma)
}

/// Smallest `j` whose internal vertex survives the modification. A vertex at
/// exactly the threshold distance (within 1e-9) survives.
pub fn i0_index(n: usize, m: usize) -> Result<usize> {
    if n < 1 || m < 1 {
        return Err(Error::Precondition(format!(
            "i0 needs n >= 1 and m >= 1, got n={n}, m={m}"
        )));
    }
    Ok(i0_for_gamma(gamma(n, m)))
}

/// The removal rule for a given spacing: smallest `j >= 1` with
/// `j * gamma >= max(10, 4 + 4 gamma)`, since `dist(A, e_j) = j * gamma`.
pub fn i0_for_gamma(gamma: f64) -> usize {
    let thr = removal_threshold(gamma) - crate::GEOM_TOL;
    let mut j = (libm::ceil(thr / gamma) as usize).max(1);
    while j > 1 && (j - 1) as f64 * gamma >= thr {
        j -= 1;
    }
    while (j as f64) * gamma < thr {
        j += 1;
    }
    j
}

fn coords(n: usize, m: usize) -> impl Fn(VertexLabel) -> Point {
    let (nf, mf) = (n as f64, m as f64);
    move |l: VertexLabel| {
        let i = l.index as f64;
        match l.kind {
            LabelKind::BaseA => Point::new(nf - i / 2.0, i * SQRT3 / 2.0),
            LabelKind::BaseB => Point::new(nf / 2.0 - i / 2.0, (nf - i) * SQRT3 / 2.0),
            LabelKind::BaseC => Point::new(i, 0.0),
            LabelKind::InternalE => Point::new(i * nf / (2.0 * mf), i * nf / (2.0 * SQRT3 * mf)),
            LabelKind::InternalF => {
                Point::new(nf - i * nf / (2.0 * mf), i * nf / (2.0 * SQRT3 * mf))
            }
            LabelKind::InternalG => Point::new(nf / 2.0, nf * SQRT3 / 2.0 - i * nf / (SQRT3 * mf)),
            LabelKind::Line | LabelKind::Imported => unreachable!("not a tetrahedron label"),
        }
    }
}

/// Coordinates of a tetrahedron label in `T(n,m)`, without building the
/// instance. Aliases evaluate to the same point.
pub fn tetra_point(n: usize, m: usize, label: VertexLabel) -> Point {
    coords(n, m)(label)
}

fn tetra_vertices(n: usize, m: usize, lo: usize) -> Vec<(VertexLabel, Point)> {
    let at = coords(n, m);
    let mut labels = Vec::with_capacity(3 * n + 3 * (m + 1 - lo.min(m + 1)) + 1);
    labels.extend((0..n).map(VertexLabel::c));
    labels.extend((0..n).map(VertexLabel::a));
    labels.extend((0..n).map(VertexLabel::b));
    labels.extend((lo..m).map(VertexLabel::e));
    labels.extend((lo..m).map(VertexLabel::f));
    labels.extend((lo..=m).map(VertexLabel::g));
    labels.into_iter().map(|l| (l, at(l))).collect()
}

/// `T(n,m)` with `3(n+m) - 2` vertices.
pub fn build_tetrahedron(n: usize, m: usize) -> Result<Instance> {
    if n < 2 || m < 1 {
        return Err(Error::Precondition(format!(
            "T(n,m) needs n >= 2 and m >= 1, got n={n}, m={m}"
        )));
    }
    Ok(Instance {
        name: format!("tetra_{n}_{m}"),
        family: Family::Tetra,
        params: Params::Tetra { n, m },
        vertices: tetra_vertices(n, m, 1),
        gamma: Some(gamma(n, m)),
        i0: None,
        forced: false,
    })
}

/// `T'(n,m)`; requires `n >= 40` and `m >= 22`, which guarantees at least the
/// four internal vertices `e_{m-1}, f_{m-1}, g_{m-1}, M` survive.
pub fn build_modified(n: usize, m: usize) -> Result<Instance> {
    if n < MODIFIED_MIN_N || m < MODIFIED_MIN_M {
        return Err(Error::Precondition(format!(
            "T'(n,m) requires n >= {MODIFIED_MIN_N} and m >= {MODIFIED_MIN_M} \
             (at least four internal vertices must survive), got n={n}, m={m}"
        )));
    }
    let i0 = i0_index(n, m)?;
    debug_assert!(i0 < m);
    Ok(modified(n, m, i0, false))
}

/// `T'(n,m)` without the size assumption, for drawing small examples.
///
/// `i0` overrides the threshold rule; `None` applies it. The result is marked
/// forced and the structural results for `T'` are not claimed for it.
pub fn build_modified_forced(n: usize, m: usize, i0: Option<usize>) -> Result<Instance> {
    if n < 2 || m < 1 {
        return Err(Error::Precondition(format!(
            "T'(n,m) needs n >= 2 and m >= 1, got n={n}, m={m}"
        )));
    }
    let i0 = match i0 {
        Some(i) => i,
        None => i0_index(n, m)?,
    };
    if i0 == 0 || i0 > m {
        return Err(Error::Precondition(format!(
            "i0 must lie in 1..={m}, got {i0}"
        )));
    }
    Ok(modified(n, m, i0, true))
}

fn modified(n: usize, m: usize, i0: usize, forced: bool) -> Instance {
    Instance {
        name: format!("tetramod_{n}_{m}"),
        family: Family::TetraModified,
        params: Params::Tetra { n, m },
        vertices: tetra_vertices(n, m, i0),
        gamma: Some(gamma(n, m)),
        i0: Some(i0),
        forced,
    }
}

/// `P(n,d)`: `n` unit-spaced points on each of the lines `y = 0, d, 2d`, all
/// starting at `x = 0`.
pub fn build_three_lines(n: usize, d: f64) -> Result<Instance> {
    if n < 1 {
        return Err(Error::Precondition(String::from("P(n,d) needs n >= 1")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Precondition(format!(
            "P(n,d) needs a finite line distance d > 0, got {d}"
        )));
    }
    let mut vertices = Vec::with_capacity(3 * n);
    for row in 0..3 {
        for col in 0..n {
            vertices.push((
                VertexLabel::new(LabelKind::Line, row * n + col),
                Point::new(col as f64, row as f64 * d),
            ));
        }
    }
    Ok(Instance {
        name: format!("lines_{n}_{}", lines_d_tag(d)),
        family: Family::ThreeLines,
        params: Params::Lines { n, d },
        vertices,
        gamma: None,
        i0: None,
        forced: false,
    })
}

fn lines_d_tag(d: f64) -> String {
    format!("{d}").replace('.', "p")
}

/// `(n, m)` giving the hardest `T(n,m)` with `N` vertices:
/// `n = floor((3N - 40) / 10)`, `m = (N + 2) / 3 - n`.
pub fn select_nm(big_n: usize) -> Result<(usize, usize)> {
    if big_n % 3 != 1 || big_n < 50 {
        return Err(Error::Precondition(format!(
            "N must satisfy N = 1 (mod 3) and N >= 50, got {big_n}"
        )));
    }
    let n = (3 * big_n - 40) / 10;
    let m = big_n.div_ceil(3) - n;
    Ok((n, m))
}
