//! Linking invariant of plane algebraic curves, computed from combinatorial
//! data and braid words.
//!
//! The crate is organised bottom-up:
//!
//! - [`abelian`]: Smith normal form and finitely generated abelian groups.
//! - [`braid`]: braid words, closure components and linking numbers.
//! - [`curve`]: combinatorics, incidence graph, walks, automorphisms.
//! - [`invariant`]: indeterminacy subgroup, linking sets, the pair test.
//! - [`fixture`], [`pipeline`]: the text input format and the end-to-end
//!   computation behind the `curvelink` binary.

pub mod abelian;
pub mod braid;
pub mod curve;
pub mod fixture;
pub mod invariant;
pub mod pipeline;
