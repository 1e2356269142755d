//! Density evolution for regular (v, c) ensembles over the Lee channel.
//!
//! All recursions condition on the all-zero codeword. The SMP recursion is
//! deterministic and models extrinsic messages as q-SC observations; the BP
//! recursion uses population dynamics.

mod bp;
mod smp;

pub use bp::{bp_de_run, bp_de_threshold, BpDeConfig, BpDeRun, BpThreshold};
pub use smp::{
    qsc_approximation_gap, schedule_from_report, smp_de_run, smp_de_step, smp_de_trace, smp_threshold, smp_xi_schedule, SmpThreshold,
    XI_FLOOR,
};

use crate::pmf::Pmf;

pub use crate::pmf::tv_distance;

/// Convergence target on the message error probability for SMP-DE.
pub const SMP_TARGET: f64 = 1e-9;

/// One iteration of SMP density evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DeState {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Law of variable-to-check messages after this iteration.
    pub p: Pmf,
    /// Law of check-to-variable messages in this iteration.
    pub w: Pmf,
    /// Extrinsic error probability of the q-SC model used by the recursion
    /// and handed to the decoder.
    pub xi: f64,
}

impl DeState {
    /// `Pr{message ≠ 0}` for the variable-to-check messages.
    pub fn error_probability(&self) -> f64 {
        self.p.error_mass()
    }

    /// TV distance between the exact check-to-variable law and the q-SC
    /// with the same error probability.
    pub fn qsc_gap(&self) -> f64 {
        let model = Pmf::qsc(self.w.len(), self.w.error_mass());
        tv_distance(self.w.as_slice(), model.as_slice()).expect("same alphabet")
    }
}

/// A full SMP-DE run at one channel parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct DeReport {
    pub delta: f64,
    /// `p^(0)`, the channel output law given input 0.
    pub initial: Pmf,
    pub trajectory: Vec<DeState>,
    /// `Pr{message ≠ 0}` fell below the target.
    pub converged: bool,
}

impl DeReport {
    pub fn xi_values(&self) -> Vec<f64> {
        self.trajectory.iter().map(|s| s.xi).collect()
    }
}
