//! Limit laws: the spectral law of free unitary Brownian motion on the
//! circle, the semicircle law, the monotone map between them, and the free
//! Jacobi law.

mod jacobi;
mod nu;
mod pushforward;
mod semicircle;

pub use jacobi::{free_jacobi_law, FreeJacobiLaw};
pub use nu::{
    cdf, classical_location, density, kappa, kappa_residual, quantile, support_halfwidth,
    ClassicalLocation, SpectralMeasureNuT, EDGE_ZONE, KAPPA_RESIDUAL_TOL,
};
pub use pushforward::{pushforward_ft, Pushforward};
pub use semicircle::{semicircle_cdf, semicircle_density, semicircle_quantile};
