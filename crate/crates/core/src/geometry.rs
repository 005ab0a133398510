//! Points, the two distance functions and the orientation predicates used by
//! the polygon validators.

use alloc::vec::Vec;
use core::cmp::Ordering;

/// A point in the plane, measured in base-edge lengths for generated families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        libm::sqrt(dx * dx + dy * dy)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Which distance a length or LP objective is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Unrounded Euclidean distance on the stored coordinates.
    ExactEuclid,
    /// TSPLIB EUC_2D: coordinates multiplied by `scale` and rounded, then the
    /// Euclidean distance rounded to the nearest integer.
    Euc2dRounded { scale: u32 },
}

impl Metric {
    /// EUC_2D at the default export scale of 10000.
    pub const TSPLIB: Metric = Metric::Euc2dRounded { scale: 10_000 };

    pub fn distance(self, p: Point, q: Point) -> f64 {
        match self {
            Metric::ExactEuclid => p.dist(q),
            Metric::Euc2dRounded { scale } => {
                let s = f64::from(scale);
                let (px, py) = (round_coord(p.x * s), round_coord(p.y * s));
                let (qx, qy) = (round_coord(q.x * s), round_coord(q.y * s));
                nint(Point::new(px, py).dist(Point::new(qx, qy)))
            }
        }
    }

    /// Full symmetric distance matrix, row-major.
    pub fn matrix(self, points: &[Point]) -> Vec<f64> {
        let n = points.len();
        let mut d = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.distance(points[i], points[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        d
    }
}

/// Round half away from zero, the rule used when scaling coordinates.
pub fn round_coord(v: f64) -> f64 {
    libm::round(v)
}

/// TSPLIB `nint` on a nonnegative length: `floor(v + 0.5)`.
pub fn nint(v: f64) -> f64 {
    libm::floor(v + 0.5)
}

const EPS: f64 = 1e-12;
const EXACT_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

fn all_integral(ps: &[Point]) -> bool {
    ps.iter().all(|p| {
        p.x == libm::trunc(p.x)
            && p.y == libm::trunc(p.y)
            && libm::fabs(p.x) < EXACT_LIMIT
            && libm::fabs(p.y) < EXACT_LIMIT
    })
}

/// Sign of the cross product `(b - a) x (c - a)`: `Greater` for a left turn.
///
/// Integer coordinates are evaluated exactly in `i128`; otherwise values within
/// `1e-12` (relative to the coordinate magnitude) count as collinear.
pub fn orientation(a: Point, b: Point, c: Point) -> Ordering {
    if all_integral(&[a, b, c]) {
        let (ax, ay) = (a.x as i128, a.y as i128);
        let (bx, by) = (b.x as i128, b.y as i128);
        let (cx, cy) = (c.x as i128, c.y as i128);
        let cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
        return cross.cmp(&0);
    }
    let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let scale = [a.x, a.y, b.x, b.y, c.x, c.y]
        .iter()
        .fold(1.0f64, |m, v| m.max(libm::fabs(*v)));
    let eps = EPS * scale * scale;
    if cross > eps {
        Ordering::Greater
    } else if cross < -eps {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Whether `q`, known to be collinear with `a`-`b`, lies on the closed segment.
fn within_box(a: Point, b: Point, q: Point) -> bool {
    let tol = EPS
        * 1.0f64
            .max(libm::fabs(a.x))
            .max(libm::fabs(b.x))
            .max(libm::fabs(q.x));
    let toly = EPS
        * 1.0f64
            .max(libm::fabs(a.y))
            .max(libm::fabs(b.y))
            .max(libm::fabs(q.y));
    q.x >= a.x.min(b.x) - tol
        && q.x <= a.x.max(b.x) + tol
        && q.y >= a.y.min(b.y) - toly
        && q.y <= a.y.max(b.y) + toly
}

/// Closed-segment test: `q` lies on segment `a`-`b`.
pub fn on_segment(a: Point, b: Point, q: Point) -> bool {
    orientation(a, b, q) == Ordering::Equal && within_box(a, b, q)
}

/// Closed segments `p1`-`p2` and `q1`-`q2` share at least one point.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    if o1 != o2
        && o3 != o4
        && o1 != Ordering::Equal
        && o2 != Ordering::Equal
        && o3 != Ordering::Equal
        && o4 != Ordering::Equal
    {
        return true;
    }
    (o1 == Ordering::Equal && within_box(p1, p2, q1))
        || (o2 == Ordering::Equal && within_box(p1, p2, q2))
        || (o3 == Ordering::Equal && within_box(q1, q2, p1))
        || (o4 == Ordering::Equal && within_box(q1, q2, p2))
}

/// Indices of all points on the convex hull boundary (corners and points on
/// hull edges), counterclockwise starting from the leftmost (then lowest) point.
/// Duplicate points are not expected.
pub fn hull_boundary(points: &[Point]) -> Vec<usize> {
    let n = points.len();
    if n < 3 {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        let (p, q) = (points[i], points[j]);
        p.x.partial_cmp(&q.x)
            .unwrap_or(Ordering::Equal)
            .then(p.y.partial_cmp(&q.y).unwrap_or(Ordering::Equal))
    });
    // Strict monotone chain for the corners.
    let build = |order: &mut dyn Iterator<Item = usize>| {
        let mut chain: Vec<usize> = Vec::new();
        for i in order {
            while chain.len() >= 2 {
                let a = points[chain[chain.len() - 2]];
                let b = points[chain[chain.len() - 1]];
                if orientation(a, b, points[i]) != Ordering::Greater {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        chain
    };
    let mut corners = build(&mut idx.iter().copied());
    corners.pop();
    let mut upper = build(&mut idx.iter().rev().copied());
    upper.pop();
    corners.extend(upper);
    if corners.len() < 3 {
        // Everything collinear: walk out along the sorted order and back.
        return idx;
    }
    // Then every point lying on a hull edge, ordered along the edge.
    let mut hull = Vec::new();
    for k in 0..corners.len() {
        let a = points[corners[k]];
        let b = points[corners[(k + 1) % corners.len()]];
        let mut on_edge: Vec<(f64, usize)> = (0..n)
            .filter(|&i| i != corners[(k + 1) % corners.len()] && on_segment(a, b, points[i]))
            .map(|i| (points[i].dist(a), i))
            .collect();
        on_edge.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
        hull.extend(on_edge.into_iter().map(|(_, i)| i));
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euc2d_rounds_coordinates_then_distance() {
        let m = Metric::Euc2dRounded { scale: 1 };
        assert_eq!(m.distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(m.distance(Point::new(0.0, 0.0), Point::new(1.0, 1.0)), 1.0);
        let m = Metric::TSPLIB;
        assert_eq!(
            m.distance(Point::new(0.0, 0.0), Point::new(1.0, 0.0)),
            10_000.0
        );
    }

    #[test]
    fn crossing_and_touching_segments() {
        let p = Point::new;
        assert!(segments_intersect(
            p(0., 0.),
            p(2., 2.),
            p(0., 2.),
            p(2., 0.)
        ));
        assert!(!segments_intersect(
            p(0., 0.),
            p(1., 0.),
            p(0., 1.),
            p(1., 1.)
        ));
        // collinear overlap
        assert!(segments_intersect(
            p(0., 0.),
            p(2., 0.),
            p(1., 0.),
            p(3., 0.)
        ));
        // collinear, disjoint
        assert!(!segments_intersect(
            p(0., 0.),
            p(1., 0.),
            p(2., 0.),
            p(3., 0.)
        ));
        // T-junction
        assert!(segments_intersect(
            p(0., 0.),
            p(2., 0.),
            p(1., 0.),
            p(1., 5.)
        ));
    }

    #[test]
    fn irrational_collinearity_is_detected() {
        let s3 = libm::sqrt(3.0);
        let a = Point::new(9.0, 0.0);
        let b = Point::new(9.0 - 0.5, s3 / 2.0);
        let c = Point::new(9.0 - 1.5, 3.0 * s3 / 2.0);
        assert_eq!(orientation(a, b, c), Ordering::Equal);
    }

    #[test]
    fn hull_keeps_points_on_edges() {
        let p = Point::new;
        let pts = [
            p(0., 0.),
            p(1., 0.),
            p(2., 0.),
            p(2., 2.),
            p(0., 2.),
            p(1., 1.),
        ];
        let h = hull_boundary(&pts);
        assert_eq!(h, alloc::vec![0, 1, 2, 3, 4]);
        // 3x3 grid: vertical edges carry a middle point too
        let grid: alloc::vec::Vec<Point> =
            (0..9).map(|k| p((k % 3) as f64, (k / 3) as f64)).collect();
        assert_eq!(hull_boundary(&grid), alloc::vec![0, 1, 2, 5, 8, 7, 6, 3]);
    }
}
