//! Special functions and numerical building blocks.

pub mod bessel;
pub mod elementary;
pub mod fractional;
pub mod mollifier;
pub mod quadrature;
pub mod roots;

pub use bessel::{bessel_j, bessel_j_ladder};
pub use elementary::{dawson, elliptic_k};
pub use fractional::{half_derivative, half_derivative_spectral, SampledFunction1D};
pub use mollifier::{mollified_delta, mollified_inverse_power, Mollifier, SingularityOrder};
pub use roots::find_roots_convex;
