//! PUF population simulation, quality metrics, and guesswork-based
//! security analysis.
//!
//! The crate has five parts:
//! - [`puf_model`]: seeded synthetic populations (stable weak PUFs, noisy
//!   re-reads, correlated device pairs) with measured-hardware presets.
//! - [`metrics`]: empirical quality statistics (FHD, stability, bias,
//!   tuple entropy) and the measurement-to-growth-rate report pipeline.
//! - [`analytic`]: closed-form entropies, divergences, and guesswork
//!   growth rates, including the distortion, attack-failure, model-attack,
//!   authentication-game, and MAC-game quantities.
//! - [`oracle`]: exhaustive and Monte Carlo ground truth at small sizes
//!   for every analytic claim.
//! - [`strong_puf`]: the keyed-hash strong PUF and its avalanche and
//!   noise-propagation experiments.

pub mod analytic;
pub mod bits;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod puf_model;
pub mod strong_puf;
pub mod validate;

pub use bits::BitVector;
pub use error::{Error, Result};
pub use puf_model::{PufSpec, Seed};
