//! Hard Euclidean TSP instances whose subtour-LP integrality ratio tends to 4/3.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`instances`]: the tetrahedron family `T(n,m)`, its modification `T'(n,m)`
//!   and the three-parallel-lines family `P(n,d)`.
//! * [`tsplib`]: bit-exact EUC_2D export and import.
//! * [`tour`]: tours, geometric validators, trip decomposition and the
//!   canonical optimum tour of `T'(n,m)` with its closed-form length.
//! * [`lp`]: a bounded-variable revised simplex with warm restarts.
//! * [`subtour`]: the subtour relaxation solved by cutting planes with
//!   global minimum-cut separation, plus an enumeration oracle.
//! * [`oracle`]: Held-Karp, brute force and 2-opt.
//! * [`analysis`]: integrality ratios, convergence tables and the
//!   exponential runtime model.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod instances;
pub mod lp;
pub mod mincut;
pub mod oracle;
pub mod subtour;
pub mod tour;
pub mod tsplib;

pub use error::{Error, Result};
pub use geometry::{Metric, Point};
pub use instances::{Family, Instance, LabelKind, Params, VertexLabel};
pub use tour::Tour;

/// Geometric equality tolerance in base-edge units.
pub const GEOM_TOL: f64 = 1e-9;
