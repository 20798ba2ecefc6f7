//! Exact and rigorous-interval verification engine for the broken k-diamond
//! partition function Δ_k(n).
//!
//! The crate is split along the lines of what each piece certifies:
//!
//! - [`eta`]: exact coefficients of eta quotients, with an independent
//!   logarithmic-derivative oracle, and the [`PartitionTable`] of Δ_k(n).
//! - [`verify`]: integer-decidable inequalities (log-concavity, cubic Turán,
//!   Θ monotonicity, signs of D^r log Δ_k, Jensen hyperbolicity).
//! - [`interval`]: outward-rounded interval arithmetic on MPFR floats.
//! - [`asymptotics`]: enclosures of I_ν, M_k(n), Λ_k/Θ_k bounds and the
//!   Bessel remainder estimate, confronted with exact table data.
//! - [`poly`]: exact polynomials, Sturm counting and positivity certificates.

pub mod asymptotics;
pub mod eta;
pub mod interval;
pub mod poly;
pub mod verify;

pub use eta::{delta_table, EtaQuotient, PartitionTable};
pub use interval::IntervalReal;
pub use verify::{SignOutcome, VerificationReport};

pub use rug::{Integer, Rational};
