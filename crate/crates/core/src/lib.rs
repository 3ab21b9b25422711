//! Hausdorff dimension of limsup sets generated by shrinking rectangles.
//!
//! The crate is split along the computation:
//!
//! * [`dimcore`] evaluates the dimensional number `s(t)` over the alphabet of
//!   candidate covering exponents.
//! * [`applications`] holds closed-form solvers (simultaneous approximation,
//!   linear forms, shrinking targets, multiplicative approximation on Cantor
//!   sets) and checks each one against [`dimcore`].
//! * [`coverlab`] models level covers and counts grid boxes on exactly built
//!   shrinking-target levels.
//! * [`verify`] measures ubiquity of the resonant systems and builds the
//!   Cantor-type mass tree used for the mass distribution principle.

pub mod applications;
pub mod cantor;
pub mod coverlab;
pub mod dimcore;
mod error;
pub mod numeric;
pub mod verify;

pub use cantor::{Anchor, CantorAxisSpec};
pub use dimcore::{
    build_alphabet, candidate_dim, compute_s, compute_s_hat, compute_s_with, partition_for,
    sup_over_candidates, Alphabet, CandidateRow, DimensionReport, ExponentProfile, Partition,
    ProductSpaceSpec, TiePolicy,
};
pub use error::{Error, ErrorClass, Result};
