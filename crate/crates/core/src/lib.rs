//! Geometric phases of squeezed and displaced oscillator states.
//!
//! The crate computes Berry phases and Hannay angles for the eigenstates of
//! harmonic-oscillator Hamiltonians deformed by squeezing and displacement,
//! both from closed-form one-form integrals over parameter loops and from
//! gauge-invariant Wilson-loop overlap products in a truncated Fock space,
//! with an independent cross-check on a position grid.  Units: ħ = 1; the
//! reference basis is the number basis at mω = 1.

pub mod banded;
pub mod berry;
pub mod deform;
pub mod error;
pub mod multiphoton;
pub mod ops;
pub mod position;

pub use error::{Error, Result};
pub use ops::{CMat, CVec, StateVector};
