#![no_std]
#![forbid(unsafe_code)]

//! Information geometry of one-dimensional Lévy processes.
//!
//! The crate works directly with Lévy triplets `(σ, ν, γ)`:
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`levy`] | Lévy measures and models, the characteristic exponent, martingale drifts, equivalence checks |
//! | [`quadrature`] | Adaptive Gauss–Kronrod integration on the real line, split around the origin and the tails |
//! | [`divergence`] | The exponent functional Δ and α-divergences between equivalent processes |
//! | [`models`] | Closed forms for generalized/classical tempered stable (GTS/CTS) and variance gamma (VG) |
//! | [`geometry`] | Fisher metrics, α-connections, Jeffreys priors, Laplace–Beltrami and superharmonic scans |
//! | [`inference`] | FFT densities, simulation, plain and Jeffreys-penalized maximum likelihood |
//!
//! Everything here is `no_std` (with `alloc`) and free of IO. File formats,
//! parallel benchmark drivers and the command line live in the `levy-ig` crate.
//!
//! ```
//! use levy_ig_core::divergence::{alpha_divergence, DivergenceRequest};
//! use levy_ig_core::levy::{LevyMeasure, LevyModel};
//!
//! let p = LevyModel::pure_jump(LevyMeasure::cts(1.0, 0.5, 1.0, 1.0).unwrap());
//! let q = LevyModel::pure_jump(LevyMeasure::cts(1.0, 0.5, 2.0, 1.0).unwrap());
//! let kl = alpha_divergence(&p, &q, &DivergenceRequest::new(-1.0, 1.0)).unwrap();
//! assert!(kl.value > 0.0);
//! ```

extern crate alloc;

pub mod divergence;
pub mod error;
pub mod geometry;
pub mod inference;
pub mod levy;
pub mod models;
pub mod quadrature;

pub use error::{Error, Result};
pub use levy::{LevyMeasure, LevyModel};
pub use quadrature::QuadratureConfig;
