//! Numerical laboratory for symmetric pure-jump Lévy processes whose jump
//! intensity near the origin is `ℓ(|h|)/|h|^d` with ℓ regularly varying.
//!
//! * [`scale`]: the intrinsic scale `L`, its inverse, `φ_a` and annulus measures.
//! * [`symbol`]: the characteristic exponent ψ and its comparison with `L(1/|ξ|)`.
//! * [`sim`]: exact compound-Poisson path simulation with exit/hit detection.
//! * [`mc`]: Monte Carlo estimators for exit, far-exit, hitting and harmonic functions.
//! * [`cli`]: the experiment driver behind the `levyscale` binary.
//!
//! Only translation-invariant kernels `K(x, h) = k(h)` truncated to the unit
//! ball are simulated.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod quad;
pub mod scale;
pub mod sim;
pub mod symbol;

pub use error::{Error, Result};
pub use geometry::{Dim, Point};
