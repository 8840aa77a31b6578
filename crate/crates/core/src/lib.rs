//! Numerical library for global-local scale-mixture identities: adaptive
//! quadrature, special functions, the Cauchy-Schlomilch-type transformation
//! machinery, special mixing densities, identity verifiers, convolution
//! checks and samplers.

// `!(x > 0.0)` is used on purpose throughout: it rejects NaN along with the
// out-of-domain sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convolutions;
pub mod densities;
pub mod density;
pub mod mixtures;
pub mod quad;
pub mod samplers;
pub mod series;
pub mod special;
pub mod transforms;

pub use density::ScalarDensity;
pub use mixtures::VerificationRecord;
pub use quad::{integrate, Interval, QuadResult};
