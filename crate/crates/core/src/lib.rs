//! Numerical Lorentzian comparison geometry on generalized Robertson-Walker
//! (warped-product) spacetimes.
//!
//! The crate is organized around a catalog of closed-form comparison model
//! spaces ([`model`]), a Riccati comparison engine ([`riccati`]), a GRW
//! spacetime kernel with geodesics and Jacobi fields ([`spacetime`]),
//! time-separation and cut-locus machinery ([`distance`]), Busemann functions
//! of rays ([`busemann`]), and area/volume comparison with rigidity checks
//! ([`comparison`]).
//!
//! All floating point work is `f64`. Operations are pure: spacetimes and
//! profiles are immutable after construction and safe to share across threads.

pub mod busemann;
pub mod comparison;
pub mod config;
pub mod distance;
pub mod error;
pub mod fiber;
pub mod model;
pub mod numerics;
pub mod riccati;
pub mod spacetime;
pub mod tolerances;

pub use error::Error;
pub use model::{build_profile, s_kappa, volume_profile, ModelParams, VolumeProfile, WarpingProfile};
pub use spacetime::{Hypersurface, Point, Spacetime, Tangent};

/// Seeded, reproducible RNG used by every sampling routine in the crate.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
