//! Scalar interference simulation.
//!
//! The crate covers four connected pictures of the same experiment:
//!
//! * [`fraunhofer`]: closed-form far-field single-slit profiles, including the
//!   phase-resolved intensity `sinc²(kaθ)·cos²α` of the field-energy component.
//! * [`kirchhoff`]: the scalar Green's-theorem boundary integral over apertures
//!   in the Kirchhoff approximation, evaluated by adaptive Gauss–Legendre panels.
//! * [`ensemble`]: plane-wave superpositions over a k-sphere whose radius is set
//!   by the locally available energy, and their normalization.
//! * [`qtm`]: the two-Gaussian-slit wavefunction, its polar decomposition, the
//!   quantum potential and guidance-equation trajectories.
//!
//! All numerics run in nondimensional units (`ħ = m = 1` unless a type says
//! otherwise); [`physics::units`] converts to and from SI.

pub mod ensemble;
pub mod error;
pub mod fraunhofer;
pub mod kirchhoff;
pub mod ode;
pub mod physics;
pub mod qtm;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use physics::{Grid1D, Grid2D, PhysicalParams, Vec3};
