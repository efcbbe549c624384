//! Calculus of the intrinsic scale: ℓ, `L`, `L^{-1}`, `φ_a`, the reference
//! measure of annuli, dyadic radii and regular-variation diagnostics.

mod calculus;
mod diagnostics;
mod family;

pub use calculus::{ScaleCalculus, DEFAULT_INV_ABS_TOL, DEFAULT_QUAD_REL_TOL, RADIUS_FLOOR};
pub use diagnostics::{log_grid_pairs, log_space};
pub use family::{Family, ScaleFunction};
