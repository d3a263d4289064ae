//! Exact-arithmetic toolkit for finding and verifying high-quality ABC and
//! Szpiro triples.
//!
//! The pipeline: enumerate smooth numbers, pick base triples (A0, B0, C0)
//! with small radicals, compute an LLL-reduced basis of their integer
//! relation lattice, combine the generators into candidate relations, and
//! score the resulting coprime triples A + B = C by their power
//! P = log C / log rad(ABC) and Szpiro quotient rho = log ABC / log rad(ABC).
//!
//! All lattice and number-theory decisions are made in exact integer or
//! rational arithmetic; floating point only enters when evaluating the
//! final logarithmic metrics.

pub mod lattice;
pub mod numtheory;
pub mod search;
pub mod triples;
