//! Iterative decoders for parity-check codes over Z_q.
//!
//! Both decoders compute check-to-variable messages for the law of
//! `x_v = -h_v^{-1} Σ_{v'≠v} h_{v'} x_{v'}`, so that every codeword is a
//! fixed point of message passing.

mod bp;
mod smp;

pub use bp::BpDecoder;
pub use smp::{extrinsic_reliability, SmpDecoder, XiSchedule};

use rand::Rng;

use crate::ring::Symbol;

/// Outcome of one decoding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub estimate: Vec<Symbol>,
    /// The estimate has zero syndrome.
    pub converged: bool,
    pub iterations: usize,
    /// A BP message could not be normalized at some point.
    pub numerical_failure: bool,
}

/// Indices within `1e-12` (relative) of the maximum.
pub(crate) fn maximizers(values: &[f64], out: &mut Vec<usize>) {
    out.clear();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + max.abs());
    out.extend((0..values.len()).filter(|&i| values[i] >= max - tol));
}

/// Argmax with ties broken uniformly at random. The RNG is only consumed
/// when there is a tie.
pub(crate) fn argmax_uniform<R: Rng + ?Sized>(values: &[f64], ties: &mut Vec<usize>, rng: &mut R) -> usize {
    maximizers(values, ties);
    match ties.len() {
        1 => ties[0],
        0 => rng.gen_range(0..values.len()),
        k => ties[rng.gen_range(0..k)],
    }
}
