//! Wave propagation on Euclidean cones.
//!
//! The crate evaluates the sine and half-wave kernels of the Friedrichs
//! Laplacian on a cone of total angle `alpha` through several independent
//! representations, the diffraction coefficient and its pole limits, the
//! composition of two diffractive half-wave kernels with a stationary-phase
//! check, and the wave-trace singularity of diffractive periodic orbits.

pub mod cone_geometry;
pub mod cone_wave_kernel;
pub mod diffraction;
pub mod error;
pub mod par;
pub mod special_functions;
pub mod two_diffraction;
pub mod verification;
pub mod wave_trace;

pub use error::{Error, Result};
pub use num_complex::Complex64;
