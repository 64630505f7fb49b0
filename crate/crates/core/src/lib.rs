//! Hyperelliptic curves over GF(2^n): an isomorphism-class census, point
//! counts and Weil polynomials, and coefficient-parity obstructions for
//! hyperelliptic Jacobians.

pub mod census;
pub mod error;
pub mod f2space;
pub mod gf2n;
pub mod moebius;
pub mod obstruct;
pub mod oracle;
pub mod poly;
pub mod stats;
pub mod weil;
pub mod zeta;

pub use census::{enumerate_genus, is_hyperelliptic, CurveRecord, CurveRow};
pub use error::{Error, Result};
pub use gf2n::{Field, FieldElement};
pub use moebius::ProjMatrix;
pub use obstruct::{Mode, ObstructionReport};
pub use poly::Poly;
pub use stats::ClassCountTable;
pub use weil::{ResiduePattern, WeilPoly};
