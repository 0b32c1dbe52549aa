//! Faltings heights of elliptic curves over ℚ, the area constant of the
//! height-bounded region in the (A, B)-plane, and censuses (exact and
//! Möbius-sieved) of curves ordered by Faltings height.
//!
//! The pipeline: `modfun` evaluates Δ, j and the SL₂(ℤ)-invariant
//! G = |Δ(τ)|·(Im τ)⁶; `periods` computes real/complex period lattices by AGM;
//! `minimality` classifies (A, B) pairs by the scaling factor λ of the minimal
//! model; `heights` combines these into the height itself; `region` integrates
//! the area constant σ; `census` enumerates and sieves the curve counts.

pub mod error;
pub mod heights;
pub mod minimality;
pub mod census;
pub mod modfun;
pub mod periods;
mod quad;
pub mod region;

pub use error::{Error, Result};
