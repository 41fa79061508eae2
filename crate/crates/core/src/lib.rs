//! Exact computations with stable-pairs descendents and their Virasoro operators.
//!
//! The crate realizes descendent insertions geometrically on two families of moduli
//! spaces: stable pairs on the cubic 3-fold in the line class, and Hilbert schemes of at
//! most one point on a simply connected surface. All arithmetic is exact over the
//! rationals.

pub mod cherncalc;
pub mod cli;
pub mod cohmodel;
pub mod cubicpt;
pub mod descalg;
pub mod exact;
pub mod hilbsurf;
