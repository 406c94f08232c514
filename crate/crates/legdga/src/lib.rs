//! Computations with free non-commutative differential graded algebras
//! (DGAs) over Z2, as they arise in Legendrian contact homology.
//!
//! The crate provides:
//!
//! - [`freealg`]: Z2-polynomial arithmetic in free non-commutative graded
//!   variables, algebra homomorphisms, and twisted derivations.
//! - [`dga`]: DGA structure and validation, chain maps, chain homotopies,
//!   tame isomorphisms, and single-pair (de)stabilization.
//! - [`cone`]: mapping-cone DGAs of DGA morphisms (interval and torus
//!   flavors), concatenation with destabilization, and the chain-homotopy
//!   induced tame isomorphism between cones.
//! - [`invariants`]: augmentations, monodromy orbits, linearized homology
//!   over GF(2), and the single-generator degree-0 homology presentation.
//! - [`knots`]: built-in example DGAs and loop monodromies (unknot,
//!   trefoil, (p,2) torus knots) plus the elementary move morphisms.
//! - [`format`]: the line-oriented text formats for DGAs, morphisms,
//!   homotopies, and cones.
//!
//! All arithmetic is exact over GF(2); every value is immutable after
//! construction and every operation is pure, so values can be shared
//! freely across threads.

pub mod cone;
pub mod dga;
pub mod error;
pub mod format;
pub mod freealg;
pub mod invariants;
pub mod knots;

pub use error::{Error, Result, ValidationReport, Violation};
pub use freealg::{GenId, GenMap, GenSet, Generator, Monomial, Poly};
