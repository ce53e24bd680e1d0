//! Invariant geometry of the upper half-plane under `SL2(R)`.
//!
//! The three one-parameter subgroups of `SL2(R)` that fix the imaginary
//! unit give rise to three geometries on the upper half-plane, carried by
//! three number systems with `i² = σ`:
//!
//! | σ  | numbers | geometry   | stabilizer of `i` |
//! |----|---------|------------|-------------------|
//! | -1 | complex | elliptic   | `K` (rotations)   |
//! |  0 | dual    | parabolic  | `N'`              |
//! | +1 | double  | hyperbolic | `A'` (boosts)     |
//!
//! The parabolic geometry further splits into three flavors selected by an
//! independent parameter `σ̆` (see [`cycles::ParabolicFlavor`]).
//!
//! Modules, bottom-up:
//!
//! - [`numbers`]: complex / dual / double arithmetic and the σ-modulus.
//! - [`moebius`]: determinant-one matrices, the rotation subgroups and the
//!   fractional-linear action.
//! - [`metric`]: the invariant metric, curve length, Euler-Lagrange residuals.
//! - [`cycles`]: the quadruple `(k, l, n, m)`, geodesic families and foci.
//! - [`distance`]: invariant distances, relabeling, Cayley transform.
//! - [`geodesics`]: additivity ODE, family fitting, grid oracle and the
//!   triangle-inequality classifier.

pub mod cycles;
pub mod distance;
mod error;
pub mod geodesics;
pub mod metric;
pub mod moebius;
pub mod numbers;

pub use error::{Error, Result};
