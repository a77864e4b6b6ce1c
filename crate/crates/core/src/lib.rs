//! Exact arithmetic for modular forms of level 1 modulo prime powers.
//!
//! Everything here is integer arithmetic: the crate computes q-expansions
//! over Z, reduces them into Z/p^M or an unramified extension of it, and
//! answers questions about Hecke eigensystems modulo p^m (strong vs weak
//! eigenforms, minimal weak weights, theta twists, h_{a,b} families) plus
//! the mod-2 delta-polynomial bound tables N(k), C(m), kappa(m).
//!
//! There is no floating point anywhere. Computations that only need to be
//! correct modulo p^m run at a higher working precision p^(m+s) and report
//! honest failure instead of guessing when the slack runs out.
//!
//! The crate is no_std (alloc only); IO, file formats and the CLI live in
//! the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod charpoly;
pub mod eigen;
pub mod error;
pub mod forms;
pub mod hecke;
pub mod hensel;
pub mod intpoly;
pub mod linear;
pub mod mod2;
pub mod modpoly;
pub mod qseries;
pub mod ring;
pub mod rng;
pub mod unramified;

pub use error::Error;
pub use ring::{IntegerRing, LocalRing, ResidueRing, Ring};
