//! Certified arithmetic cohomology of metrized lattices over number rings.
//!
//! A metrized `O_F`-lattice is a full-rank lattice `Λ ⊂ R^d` carried by a
//! fixed Minkowski realization of a number field `F` (here `Q` or a real or
//! imaginary quadratic field).  The crate computes its arithmetic cohomology
//!
//! ```text
//! h^0(Λ) = log Σ_{x ∈ Λ} e^{-π |x|^2},      h^1(Λ) = h^0(ω ⊗ Λ^∨),
//! ```
//!
//! with certified tail bounds, and everything built on top of it: the exact
//! Riemann–Roch identity `h^0 - h^1 = deg Λ - (n/2) log Δ_F`, slope stability
//! and Harder–Narasimhan filtrations, effective vanishing bounds for `h^0`
//! and `h^1` far from the critical strip, and non-abelian zeta functions of
//! ranks one and two obtained by integrating theta series over moduli of
//! semistable lattices.
//!
//! The numerical contract throughout is "certified at the stated tolerance":
//! theta values carry explicit enumeration tails, quadratures carry explicit
//! truncation remainders, and destabilizing sublattices are found by search
//! radii that provably cover every candidate.

pub mod cli;
pub mod error;
pub mod field;
pub mod lattice;
pub mod linalg;
pub mod lll;
pub mod quad;
pub mod selftest;
pub mod stability;
pub mod theta;
pub mod vanishing;
pub mod zeta;
pub mod zmat;

pub use error::{Error, Result};
