//! Region-wide acoustic velocity from spherical-harmonic pressure coefficients.
//!
//! A sound field inside a source-free sphere is described by its global
//! pressure coefficients `α_ℓ^q(k)`. Translating the expansion to an arbitrary
//! point `r_b` and reading off the first-degree local coefficients gives the
//! particle velocity there; because the translation weights do not depend on
//! frequency, the whole map `α → ζ_e` (velocity coefficients along `e = x, y, z`)
//! collapses into three constant `L² × (L+1)²` matrices.
//!
//! On top of that the crate solves loudspeaker driving functions that match
//! either the velocity coefficients (`H w = ζ_des`) or the pressure coefficients
//! (`G w = α_des`), and measures how well the reproduced velocity directions
//! follow the desired ones.
//!
//! ```
//! use shvel::{operators::VelocityOperators, sources::plane_wave_coeffs, MediumConstants};
//!
//! let ops = VelocityOperators::build(4, MediumConstants::default()).unwrap();
//! let alpha = plane_wave_coeffs(std::f64::consts::FRAC_PI_2, 0.0, 4);
//! let [zx, zy, zz] = ops.apply(&alpha).unwrap();
//! assert_eq!(zx.len(), 16);
//! # let _ = (zy, zz);
//! ```

pub mod coupling;
pub mod error;
pub mod field;
pub mod metrics;
pub mod operators;
pub mod reproduction;
pub mod sh_basis;
pub mod sources;

pub use error::{Error, Result};
pub use field::{FieldGrid, GridSpec, SoundField, VelocityVector};
pub use operators::{Axis, MediumConstants, OperatorMatrix, VelocityOperators};
pub use sh_basis::{ShVector, SphericalPoint};
pub use sources::{LoudspeakerArray, SourceSpec};

/// Library version, embedded in exported files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
