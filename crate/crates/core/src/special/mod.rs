pub mod bessel;
pub mod gamma;
pub mod gig;
pub mod quad;

pub use bessel::{bessel_k, ln_bessel_k};
pub use gamma::{dirichlet_sample, gamma_sample, GammaLaw};
pub use gig::{gig_cdf_point, ExpCoshLaw, GigCdf, GigLaw, RouSampler};
