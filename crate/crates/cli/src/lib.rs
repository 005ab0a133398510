//! Command line surface for the tetrahedron TSP instances: file generation,
//! exact tours, subtour LP bounds, integrality ratios and the external-solver
//! benchmark harness.

pub mod app;
pub mod bench;
pub mod exit;
pub mod grid;
pub mod source;
