//! Symbolic-numeric verification engine for the algebraic spectral
//! relations of the elliptic Calogero-Moser problems of types A2
//! (three particles on a line) and B2 (two variables with arguments
//! x, y, x+y, x-y).
//!
//! The engine
//! * constructs the explicit quantum integrals of both problems as
//!   differential operators over the ring generated by wp values at the
//!   in-scope argument forms ([`catalog`]),
//! * composes operator polynomials exactly by the Leibniz rule
//!   ([`diffop`]),
//! * certifies operator identities by a high-precision numeric
//!   vanishing oracle backed by the Weierstrass Laurent series
//!   ([`wpnum`], [`verifier`]) together with an exact reduction at the
//!   half-period point ([`verifier::halfperiod`]),
//! * rederives relation coefficients by symbol descent
//!   ([`verifier::descent`]) and checks symbol separation
//!   ([`verifier::separation`]),
//! * reduces the three-particle relation to the planar spectral curve
//!   and diffs it against the reference form ([`curves`]).

pub mod catalog;
pub mod curves;
pub mod diffop;
pub mod elliptic;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod poly;
pub mod rational;
pub mod report;
pub mod symbol;
pub mod verifier;
pub mod wpnum;

pub use error::VerifyError;
pub use rational::Rational;
