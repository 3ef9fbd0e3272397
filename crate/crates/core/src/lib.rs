//! Analysis toolkit for nilflows on compact nilmanifolds.
//!
//! The crate follows one pipeline end to end:
//!
//! 1. [`algebra`] — exact-rational nilpotent Lie algebra arithmetic
//!    (brackets, descending central series, BCH group law, Malcev/lattice
//!    bookkeeping);
//! 2. [`coadjoint`] — linear forms, the skew form `B_λ`, orbit invariants,
//!    rank classification, polarizing subalgebras and integrality tests;
//! 3. [`adapted`] — the codimension-one-ideal construction producing the
//!    model where the flow generator acts as `d/dt` and a distinguished
//!    central direction acts as multiplication by `2πi δ t`;
//! 4. [`solver`] — the numerical Green operator, invariant distributions,
//!    Sobolev norms and the estimate checks built on that model;
//! 5. [`diophantine`] — finite-range certification of small-denominator
//!    lower bounds for the abelianized frequency vector;
//! 6. [`sim`] — a nilflow simulator in Malcev coordinates of the second
//!    kind, used for empirical equidistribution and coboundary checks.
//!
//! All exact computations use `BigRational`; floating point only enters in
//! the numerical solver, the Diophantine scan and the simulator.

// Numeric kernels index several arrays in lockstep; iterator rewrites of
// those loops obscure the stencils.
#![allow(clippy::needless_range_loop)]

pub mod adapted;
pub mod algebra;
pub mod coadjoint;
pub mod diophantine;
pub mod io;
pub mod linalg;
pub mod rat;
pub mod sim;
pub mod solver;

pub use rat::Rat;
