//! Forbidden-pattern problems with a promise, their monochromatic-clique
//! dichotomy, and the reductions to and from promise CSPs.
//!
//! The crate is organised around finite relational structures
//! ([`structure`]), solution-space connectivity ([`connectivity`]),
//! coloured pattern families ([`mmsnp`]), the σ/τ compilers
//! ([`reduce`]), the integer relaxation solver ([`aip`]), the
//! label-cover gadget ([`gadget`]), brute-force deciders ([`oracle`]) and the
//! command-line front end ([`cli`]).

pub mod aip;
pub mod cli;
pub mod connectivity;
pub mod error;
pub mod gadget;
pub mod mmsnp;
pub mod oracle;
pub mod reduce;
pub mod structure;
pub mod util;

pub use error::{Error, Result};
pub use structure::{FiniteRelation, Homomorphism, RelStructure, TwoToOneMap};
