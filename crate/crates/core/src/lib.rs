//! Coupled-channel quantum simulation of the one-photon mazer with
//! cavity-atom detuning.
//!
//! A two-level atom moving along z crosses a single-mode cavity with mode
//! function u(z). On one photon block the internal problem reduces to two
//! coupled channels, |a,n⟩ and |b,n+1⟩, split by the detuning δ = ω − ω₀ and
//! coupled by g·u(z)·sqrt(n+1). The crate provides:
//!
//! - [`system`]: parameters, mode profiles, dressed-frame scalar relations;
//! - [`algebra`]: Fock-truncated verification of the basis identities and
//!   coupled-equation coefficients;
//! - [`scattering`]: exact stationary two-channel scattering on
//!   piecewise-constant profiles (emission probability, blocking, the
//!   detuning momentum step);
//! - [`wavepacket`]: time-dependent split-step oracle for the same physics;
//! - [`adiabatic`]: the adiabatic dressed-frame formulation, its dθ/dz
//!   singularity at sharp cavity edges, and its breakdown in the mesa limit.

pub mod adiabatic;
pub mod algebra;
pub mod error;
pub mod linalg;
pub mod scattering;
pub mod system;
pub mod wavepacket;

pub use error::{Error, Result};
pub use system::{ModeProfile, SystemConfig};
