use rand::Rng;

use super::{argmax_uniform, DecodeResult};
use crate::channel::LeeChannelSpec;
use crate::code::ParityCheckCode;
use crate::error::{Error, Result};
use crate::pmf::{circular_convolve, normalize};
use crate::ring::Symbol;

const FLOOR: f64 = 1e-300;

/// Nonbinary belief propagation with PMF messages.
///
/// Variable-to-check messages are stored permuted, as the law of
/// `h_{c,v}·x_v`; check nodes circularly convolve them and map the result
/// back through `x ↦ -h_{c,v} x`. Variable nodes take the normalized
/// Hadamard product of the channel PMF and the other incoming messages.
/// Linear domain; messages are renormalized after every product and
/// clamped at 1e-300.
pub struct BpDecoder<'a> {
    code: &'a ParityCheckCode,
    q: usize,
    early_stop: bool,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    app: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
    tmp: Vec<f64>,
    ties: Vec<usize>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a ParityCheckCode) -> Self {
        let q = code.ctx().q();
        let e = code.num_edges();
        let maxdeg = (0..code.m()).map(|c| code.check_degree(c)).max().unwrap_or(0);
        BpDecoder {
            code,
            q,
            early_stop: true,
            v2c: vec![0.0; e * q],
            c2v: vec![0.0; e * q],
            app: vec![0.0; code.n() * q],
            prefix: vec![0.0; (maxdeg + 1) * q],
            suffix: vec![0.0; (maxdeg + 1) * q],
            tmp: vec![0.0; q],
            ties: Vec::with_capacity(q),
        }
    }

    /// Stop as soon as the hard decision has zero syndrome (default on).
    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    /// Normalized a-posteriori PMFs from the last iteration, `n × q`.
    pub fn app(&self) -> &[f64] {
        &self.app
    }

    /// Current variable-to-check messages in the unpermuted (`x_v`) domain.
    pub fn variable_messages(&self) -> Vec<Vec<f64>> {
        let ctx = self.code.ctx();
        (0..self.code.num_edges())
            .map(|e| {
                let h = self.code.edge_coef(e);
                let m = &self.v2c[e * self.q..(e + 1) * self.q];
                (0..self.q).map(|x| m[ctx.mul(h, x)]).collect()
            })
            .collect()
    }

    /// Decodes a received word over the given memoryless Lee channel.
    pub fn decode_received<R: Rng + ?Sized>(
        &mut self,
        y: &[Symbol],
        spec: &LeeChannelSpec,
        max_iter: usize,
        rng: &mut R,
    ) -> Result<DecodeResult> {
        if y.len() != self.code.n() {
            return Err(Error::domain(format!("received length {} differs from n = {}", y.len(), self.code.n())));
        }
        if spec.ctx().q() != self.q {
            return Err(Error::domain("channel and code are over different rings"));
        }
        let mut channel = Vec::with_capacity(y.len() * self.q);
        for &yi in y {
            if yi >= self.q {
                return Err(Error::domain(format!("received symbol {yi} not in Z_{}", self.q)));
            }
            channel.extend(spec.likelihoods(yi));
        }
        self.decode(&channel, max_iter, rng)
    }

    /// Decodes from per-variable channel PMFs `(P(y_v|0), …, P(y_v|q-1))`,
    /// flattened `n × q`. Rows need not be normalized.
    pub fn decode<R: Rng + ?Sized>(&mut self, channel: &[f64], max_iter: usize, rng: &mut R) -> Result<DecodeResult> {
        let (q, n) = (self.q, self.code.n());
        if channel.len() != n * q {
            return Err(Error::domain(format!("expected {} channel values, got {}", n * q, channel.len())));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        if channel.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain("channel likelihoods must be finite and nonnegative"));
        }
        let code = self.code;
        let ctx = code.ctx();
        let mut failure = false;

        for v in 0..n {
            let mut ch = channel[v * q..(v + 1) * q].to_vec();
            if normalize(&mut ch) <= 0.0 {
                failure = true;
                ch.iter_mut().for_each(|x| *x = 1.0 / q as f64);
            }
            for &e in code.var_edges(v) {
                let h = code.edge_coef(e);
                let msg = &mut self.v2c[e * q..(e + 1) * q];
                for x in 0..q {
                    msg[ctx.mul(h, x)] = ch[x];
                }
            }
        }

        let mut estimate = vec![0; n];
        let mut iterations = 0;
        for it in 1..=max_iter {
            iterations = it;
            for c in 0..code.m() {
                self.check_update(c);
            }
            for v in 0..n {
                failure |= self.variable_update(v, &channel[v * q..(v + 1) * q]);
                estimate[v] = argmax_uniform(&self.app[v * q..(v + 1) * q], &mut self.ties, rng);
            }
            if self.early_stop && code.is_codeword(&estimate) {
                break;
            }
        }
        Ok(DecodeResult {
            converged: code.is_codeword(&estimate),
            estimate,
            iterations,
            numerical_failure: failure,
        })
    }

    fn check_update(&mut self, c: usize) {
        let q = self.q;
        let code = self.code;
        let ctx = code.ctx();
        let edges = code.check_edges(c);
        let d = edges.len();
        let e0 = edges.start;
        // prefix[i] = in_0 ⊛ … ⊛ in_{i-1}, suffix[i] = in_i ⊛ … ⊛ in_{d-1}
        let (prefix, suffix, tmp) = (&mut self.prefix, &mut self.suffix, &mut self.tmp);
        prefix[..q].iter_mut().for_each(|x| *x = 0.0);
        prefix[0] = 1.0;
        for i in 0..d {
            let input = &self.v2c[(e0 + i) * q..(e0 + i + 1) * q];
            let (done, rest) = prefix.split_at_mut((i + 1) * q);
            circular_convolve(&done[i * q..], input, &mut rest[..q]);
        }
        suffix[d * q..(d + 1) * q].iter_mut().for_each(|x| *x = 0.0);
        suffix[d * q] = 1.0;
        for i in (0..d).rev() {
            let input = &self.v2c[(e0 + i) * q..(e0 + i + 1) * q];
            let (head, done) = suffix.split_at_mut((i + 1) * q);
            circular_convolve(input, &done[..q], &mut head[i * q..]);
        }
        for i in 0..d {
            let e = e0 + i;
            circular_convolve(&prefix[i * q..(i + 1) * q], &suffix[(i + 1) * q..(i + 2) * q], tmp);
            normalize(tmp);
            // x_v = -h^{-1} s  ⇔  s = -h x_v
            let h = code.edge_coef(e);
            let out = &mut self.c2v[e * q..(e + 1) * q];
            for x in 0..q {
                out[x] = tmp[ctx.neg(ctx.mul(h, x))];
            }
        }
    }

    /// Returns true on a normalization failure.
    fn variable_update(&mut self, v: usize, channel: &[f64]) -> bool {
        let q = self.q;
        let code = self.code;
        let ctx = code.ctx();
        let edges = code.var_edges(v);
        let mut failed = false;

        let app = &mut self.app[v * q..(v + 1) * q];
        app.copy_from_slice(channel);
        normalize(app);
        for &e in edges {
            for (a, m) in app.iter_mut().zip(&self.c2v[e * q..(e + 1) * q]) {
                *a *= m;
            }
            if normalize(app) <= 0.0 {
                failed = true;
            }
        }

        for &e in edges {
            let tmp = &mut self.tmp;
            tmp.copy_from_slice(channel);
            normalize(tmp);
            for &e2 in edges {
                if e2 == e {
                    continue;
                }
                for (a, m) in tmp.iter_mut().zip(&self.c2v[e2 * q..(e2 + 1) * q]) {
                    *a *= m;
                }
                let s = normalize(tmp);
                if !(s > 0.0) || !s.is_finite() {
                    failed = true;
                    tmp.iter_mut().for_each(|x| *x = 1.0 / q as f64);
                }
            }
            for x in tmp.iter_mut() {
                *x = x.max(FLOOR);
            }
            normalize(tmp);
            let h = code.edge_coef(e);
            let out = &mut self.v2c[e * q..(e + 1) * q];
            for x in 0..q {
                out[ctx.mul(h, x)] = tmp[x];
            }
        }
        failed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{sample_regular_ensemble, CodewordSampler};
    use crate::ring::RingContext;
    use crate::rng::seeded;

    #[test]
    fn noiseless_codeword_is_a_fixed_point() {
        let ctx = RingContext::new(7).unwrap();
        let spec = LeeChannelSpec::from_delta(&ctx, 0.3).unwrap();
        let code = sample_regular_ensemble(&ctx, 48, 3, 6, &mut seeded(1)).unwrap();
        let x = CodewordSampler::new(&code).sample(&mut seeded(2));
        let mut dec = BpDecoder::new(&code);
        let res = dec.decode_received(&x, &spec, 20, &mut seeded(3)).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.estimate, x);
    }

    #[test]
    fn single_check_map() {
        // 2·x1 + 3·x2 ≡ 0 over Z_5; received (1, 4) with a sharp channel
        // centred on y and light smoothing.
        let ctx = RingContext::new(5).unwrap();
        let code = ParityCheckCode::from_rows(&ctx, 2, vec![vec![(0, 2), (1, 3)]]).unwrap();
        let y = [1usize, 4];
        let mut channel = Vec::new();
        for &yi in &y {
            for x in 0..5 {
                channel.push(if x == yi { 1.0 } else { 1e-3 });
            }
        }
        // exhaustive MAP over Z_5²
        let mut best = (f64::MIN, vec![]);
        for a in 0..5 {
            for b in 0..5 {
                if (2 * a + 3 * b) % 5 == 0 {
                    let p = channel[a] * channel[5 + b];
                    if p > best.0 {
                        best = (p, vec![a, b]);
                    }
                }
            }
        }
        let res = BpDecoder::new(&code).decode(&channel, 5, &mut seeded(0)).unwrap();
        assert!(res.converged);
        assert_eq!((2 * res.estimate[0] + 3 * res.estimate[1]) % 5, 0);
        // (1,1) and (4,4) tie under this channel; either is a MAP word.
        let p = channel[res.estimate[0]] * channel[5 + res.estimate[1]];
        assert_eq!(p, best.0);
    }

    #[test]
    fn rejects_bad_input() {
        let ctx = RingContext::new(5).unwrap();
        let code = ParityCheckCode::from_rows(&ctx, 2, vec![vec![(0, 2), (1, 3)]]).unwrap();
        let mut dec = BpDecoder::new(&code);
        assert!(dec.decode(&[0.2; 9], 3, &mut seeded(0)).is_err());
        assert!(dec.decode(&[0.2; 10], 0, &mut seeded(0)).is_err());
        let spec = LeeChannelSpec::from_delta(&ctx, 0.3).unwrap();
        assert!(dec.decode_received(&[0, 5], &spec, 3, &mut seeded(0)).is_err());
    }

    #[test]
    fn zero_likelihood_flags_failure() {
        let ctx = RingContext::new(5).unwrap();
        let code = ParityCheckCode::from_rows(&ctx, 2, vec![vec![(0, 1), (1, 1)]]).unwrap();
        // variable 0 must be 0, variable 1 must be 1: no codeword
        let mut channel = vec![0.0; 10];
        channel[0] = 1.0;
        channel[6] = 1.0;
        let res = BpDecoder::new(&code).decode(&channel, 3, &mut seeded(0)).unwrap();
        assert!(res.numerical_failure);
        assert!(!res.converged);
    }
}
