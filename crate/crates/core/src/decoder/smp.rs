use rand::Rng;

use super::{argmax_uniform, DecodeResult};
use crate::channel::LeeChannelSpec;
use crate::code::ParityCheckCode;
use crate::error::{Error, Result};
use crate::ring::Symbol;

/// `D(ξ) = ln(1-ξ) - ln(ξ/(q-1))`, the log-likelihood bonus a q-ary
/// symmetric extrinsic channel with error probability ξ gives the symbol
/// it delivers.
pub fn extrinsic_reliability(q: usize, xi: f64) -> f64 {
    (1.0 - xi).ln() - (xi / (q - 1) as f64).ln()
}

/// Per-iteration extrinsic error probabilities ξ^(1), ξ^(2), … used by
/// the SMP decoder. Iteration ℓ (1-based) uses entry ℓ-1; both the
/// extrinsic variable update and the final decision of that iteration use
/// the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct XiSchedule(Vec<f64>);

impl XiSchedule {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::domain("empty xi schedule"));
        }
        if let Some(bad) = xi.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::domain(format!("xi = {bad} outside (0, 1)")));
        }
        Ok(XiSchedule(xi))
    }

    /// The same ξ at every iteration.
    pub fn constant(xi: f64, len: usize) -> Result<Self> {
        Self::new(vec![xi; len.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// ξ for 1-based iteration `iter`.
    pub fn xi(&self, iter: usize) -> f64 {
        self.0[iter - 1]
    }
}

/// Symbol message passing: every message is a single ring element.
///
/// Check nodes send the unique value that satisfies the check given the
/// other incoming symbols. Variable nodes treat each incoming symbol as
/// the output of a q-ary symmetric channel with error probability ξ^(ℓ),
/// add the resulting log-likelihoods to the channel L-vector and send the
/// extrinsic argmax (ties uniform).
pub struct SmpDecoder<'a> {
    code: &'a ParityCheckCode,
    v2c: Vec<Symbol>,
    c2v: Vec<Symbol>,
    counts: Vec<usize>,
    scores: Vec<f64>,
    ties: Vec<usize>,
}

impl<'a> SmpDecoder<'a> {
    pub fn new(code: &'a ParityCheckCode) -> Self {
        let q = code.ctx().q();
        SmpDecoder {
            code,
            v2c: vec![0; code.num_edges()],
            c2v: vec![0; code.num_edges()],
            counts: vec![0; q],
            scores: vec![0.0; q],
            ties: Vec::with_capacity(q),
        }
    }

    /// Last variable-to-check messages, indexed by edge.
    pub fn variable_messages(&self) -> &[Symbol] {
        &self.v2c
    }

    /// Last check-to-variable messages, indexed by edge.
    pub fn check_messages(&self) -> &[Symbol] {
        &self.c2v
    }

    pub fn decode<R: Rng + ?Sized>(
        &mut self,
        y: &[Symbol],
        spec: &LeeChannelSpec,
        schedule: &XiSchedule,
        max_iter: usize,
        rng: &mut R,
    ) -> Result<DecodeResult> {
        let code = self.code;
        let ctx = code.ctx();
        let q = ctx.q();
        let n = code.n();
        if y.len() != n {
            return Err(Error::domain(format!("received length {} differs from n = {n}", y.len())));
        }
        if let Some(&bad) = y.iter().find(|&&a| a >= q) {
            return Err(Error::domain(format!("received symbol {bad} not in Z_{q}")));
        }
        if spec.ctx().q() != q {
            return Err(Error::domain("channel and code are over different rings"));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        if schedule.len() < max_iter {
            return Err(Error::domain(format!(
                "xi schedule has {} entries but max_iter = {max_iter}",
                schedule.len()
            )));
        }
        // channel L-vectors indexed by received symbol
        let l_table: Vec<Vec<f64>> = (0..q).map(|yy| spec.log_likelihoods(yy)).collect();

        for e in 0..code.num_edges() {
            self.v2c[e] = y[code.edge_var(e)];
        }
        let mut estimate = vec![0; n];
        let mut iterations = 0;
        for it in 1..=max_iter {
            iterations = it;
            for c in 0..code.m() {
                let edges = code.check_edges(c);
                let total: usize = edges.clone().map(|e| code.edge_coef(e) * self.v2c[e]).sum::<usize>() % q;
                for e in edges {
                    let h = code.edge_coef(e);
                    let others = ctx.sub(total, ctx.mul(h, self.v2c[e]));
                    let h_inv = ctx.inverse(h).expect("coefficients are units");
                    self.c2v[e] = ctx.neg(ctx.mul(h_inv, others));
                }
            }
            let d = extrinsic_reliability(q, schedule.xi(it));
            for v in 0..n {
                let l = &l_table[y[v]];
                let edges = code.var_edges(v);
                self.counts.iter_mut().for_each(|k| *k = 0);
                for &e in edges {
                    self.counts[self.c2v[e]] += 1;
                }
                for &e in edges {
                    let own = self.c2v[e];
                    self.counts[own] -= 1;
                    for b in 0..q {
                        self.scores[b] = l[b] + d * self.counts[b] as f64;
                    }
                    self.counts[own] += 1;
                    self.v2c[e] = argmax_uniform(&self.scores, &mut self.ties, rng);
                }
                for b in 0..q {
                    self.scores[b] = l[b] + d * self.counts[b] as f64;
                }
                estimate[v] = argmax_uniform(&self.scores, &mut self.ties, rng);
            }
            if code.is_codeword(&estimate) {
                break;
            }
        }
        Ok(DecodeResult {
            converged: code.is_codeword(&estimate),
            estimate,
            iterations,
            numerical_failure: false,
        })
    }
}
