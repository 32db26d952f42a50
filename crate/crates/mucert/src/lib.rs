//! Exact Dieudonné-module computations for mu-ordinary truncated
//! p-divisible groups with unitary structure.
//!
//! The crate computes, over finite fields of odd characteristic:
//!
//! * truncated Witt rings `W_n(F_q)` and their Frobenius ([`field`]);
//! * Dieudonné modules of the basic mu-ordinary building blocks `X(f)_n`,
//!   their slope decompositions, tangent spaces, and Cartier duals
//!   ([`dieudonne`]);
//! * Hom and End modules between building blocks, both by structural
//!   formula and by an independent exact linear-algebra solver over
//!   `Z/p^n` ([`homs`], [`oracle`]);
//! * the matricial structure of automorphism group schemes of mu-ordinary
//!   groups, their unipotent part `Aut^0`, the polarized (unitary) variant
//!   with its dagger involution, and the descending filtration with its
//!   graded pieces ([`autstruct`]);
//! * a fully explicit supersingular example: the p-kernel of a quadratic
//!   Lubin-Tate formal module as a Hopf algebra, its Cartier dual, the
//!   duality pairing, a hermitian polarization, and the unipotent group
//!   built from them, with point-level verification over nilpotent test
//!   algebras ([`mainexample`]);
//! * p-incompressibility certificates for mu-ordinary reductions of
//!   unitary Shimura varieties, and the companion dimension bound for
//!   generic abelian varieties ([`certify`]).
//!
//! Every closed-form count or dimension that the structural layer predicts
//! is re-derived by brute enumeration or an independent solver somewhere in
//! the test suite; the library itself also carries many of these
//! cross-checks at runtime (they return [`error::Error::InternalCheck`]
//! when violated, which the CLI maps to a dedicated exit code).
//!
//! # Runnable examples
//!
//! * `witt_arithmetic` — Witt vectors, Frobenius, Teichmüller lifts.
//! * `build_modules` — building blocks X(f)_n, tangent spaces, duals.
//! * `hom_predictions` — Hom/End counts vs. the exact solver.
//! * `aut_structure` — Aut^0 grids, orders, and the polarized filtration.
//! * `unipotent_model` — the supersingular group law and its pairing.
//! * `submodule_census` — enumerating stable lattices and subgroups.
//! * `certify_shimura` — end-to-end incompressibility certificates.
//! * `abelian_bounds` — the essential-dimension lower bound table.

pub mod autstruct;
pub mod certify;
pub mod dieudonne;
pub mod error;
pub mod field;
pub mod homs;
pub mod mainexample;
pub mod oracle;
pub mod suite;

pub use error::{Error, Result};
