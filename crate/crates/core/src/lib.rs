//! Lee-metric channel coding over the integer rings Z_q.
//!
//! * [`ring`]: modular arithmetic, Lee weight and distance, compositions.
//! * [`channel`] and [`sphere`]: the memoryless Lee channel, its
//!   entropy-maximizing marginal, and exact uniform sampling of
//!   constant-Lee-weight error vectors.
//! * [`bounds`]: random coding union bounds, the Shannon limit and the
//!   normal approximation.
//! * [`code`]: sparse parity-check codes, the regular ensemble and PEG.
//! * [`decoder`]: belief propagation and symbol message passing.
//! * [`de`]: density evolution thresholds and the q-SC approximation gap.
//! * [`sim`]: seeded Monte Carlo block error rate estimation.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod code;
pub mod de;
pub mod decoder;
pub mod error;
pub mod pmf;
pub mod ring;
pub mod rng;
pub mod sim;
pub mod sphere;

pub use error::{Error, Result};

/// Crate version, recorded in every CSV this crate writes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
