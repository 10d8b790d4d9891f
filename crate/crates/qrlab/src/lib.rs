//! Numerical laboratory for quasiradial Fourier multipliers.
//!
//! The crate studies operators of the form
//! `f ↦ F⁻¹[ h(ρ(ξ)/t) ĝ(ξ) ]` where `ρ` is a homogeneous distance function
//! and `h` a one-dimensional multiplier profile, together with the maximal and
//! square functions they generate and the function-space norms (Herz, Lorentz,
//! Besov, weighted L²) that control them.
//!
//! Layout:
//! * [`grid`] — periodized grids, unitary DFT pair, annulus decompositions,
//!   deterministic test banks;
//! * [`distance`] — built-in homogeneous distance functions, gradient bounds,
//!   unit-sphere quadrature;
//! * [`profile`] — 1-D multiplier profiles, dyadic frequency decomposition,
//!   Besov norms, oscillatory kernels and their Lorentz norms;
//! * [`spaces`] — Lorentz, Herz and weighted-L² norms on grid functions;
//! * [`operator`] — multiplier application, maximal functions, square
//!   functions, dyadic block operators and kernel decay probes;
//! * [`verify`] — ratio-report experiments pitting operator norms against the
//!   function-space bounds that are supposed to control them;
//! * [`report`] — serializable result types shared by the experiments.
//!
//! Conventions (used consistently everywhere): the forward transform is
//! `ĝ(ξ) = ∫ g(x) e^{-i⟨x,ξ⟩} dx` and the inverse carries the `(2π)^{-d}`
//! factor. Spatial L² mass is `Σ|g|²·Δx^d`; frequency-side mass carries an
//! extra `(2π)^{-d}` so that Parseval is an identity.

pub mod bessel;
pub mod distance;
pub mod error;
mod fft;
pub mod grid;
pub mod numeric;
pub mod operator;
pub mod profile;
pub mod report;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
