//! Finite-length benchmarks for Lee channels.
//!
//! Random coding union bounds for the constant-weight and memoryless Lee
//! channels, the Shannon limit in terms of δ, and the normal approximation
//! of the achievable block error rate over the memoryless channel.
//!
//! Capacity and dispersion are taken under the uniform input distribution,
//! which is optimal because the channel is additive over the ring.

use std::io::{BufRead, Write};

use statrs::function::erf::{erfc, erfc_inv};

use crate::channel::{marginal_phi_star, LeeChannelSpec};
use crate::error::{Error, Result};
use crate::ring::RingContext;

/// Mean Lee weight of a uniform symbol: `(q²-1)/4q` for odd q, `q/4` for even q.
pub fn delta_q(ctx: &RingContext) -> f64 {
    let q = ctx.q() as f64;
    if ctx.q() % 2 == 1 {
        (q * q - 1.0) / (4.0 * q)
    } else {
        q / 4.0
    }
}

/// `H_δ`, the entropy of the Boltzmann marginal with mean weight δ.
///
/// Defined on `[0, r]`; the endpoints are the limiting values.
pub fn h_delta(ctx: &RingContext, delta: f64) -> Result<f64> {
    let r = ctx.r() as f64;
    if !(delta >= 0.0 && delta <= r) {
        return Err(Error::domain(format!("delta {delta} outside [0, {r}]")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    if delta == r {
        // all mass on the weight-r elements
        return Ok(if ctx.q().is_multiple_of(2) { 0.0 } else { 2f64.ln() });
    }
    if (delta - delta_q(ctx)).abs() < 1e-15 {
        return Ok((ctx.q() as f64).ln());
    }
    Ok(marginal_phi_star(ctx, delta)?.entropy())
}

/// `H⁺_δ`: `H_δ` up to δ_q and `ln q` beyond.
pub fn h_plus_delta(ctx: &RingContext, delta: f64) -> Result<f64> {
    if delta > delta_q(ctx) {
        if delta > ctx.r() as f64 {
            return Err(Error::domain(format!("delta {delta} exceeds r = {}", ctx.r())));
        }
        return Ok((ctx.q() as f64).ln());
    }
    h_delta(ctx, delta)
}

/// Block length and rate of a random code ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundQuery {
    pub ctx: RingContext,
    pub n: usize,
    pub rate: f64,
}

impl BoundQuery {
    pub fn new(ctx: &RingContext, n: usize, rate: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("block length must be positive"));
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::domain(format!("rate {rate} outside (0, 1)")));
        }
        Ok(BoundQuery {
            ctx: ctx.clone(),
            n,
            rate,
        })
    }

    /// `(1-R) ln q - H⁺_δ`, before clipping.
    pub fn exponent(&self, delta: f64) -> Result<f64> {
        Ok((1.0 - self.rate) * (self.ctx.q() as f64).ln() - h_plus_delta(&self.ctx, delta)?)
    }

    /// RCU bound for the constant-weight channel with normalized weight δ.
    pub fn rcu_constant_weight(&self, delta: f64) -> Result<f64> {
        Ok((-(self.n as f64) * self.exponent(delta)?.max(0.0)).exp())
    }

    /// RCU bound for the memoryless channel: the constant-weight bound
    /// averaged over the exact law of the total noise weight `D`.
    pub fn rcu_memoryless(&self, spec: &LeeChannelSpec) -> Result<f64> {
        let law = total_weight_pmf(spec, self.n);
        let n = self.n as f64;
        let mut acc = 0.0;
        for (d, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let e = self.exponent(d as f64 / n)?.max(0.0);
            acc += p * (-n * e).exp();
        }
        Ok(acc.min(1.0))
    }
}

pub fn rcu_constant_weight(ctx: &RingContext, n: usize, rate: f64, delta: f64) -> Result<f64> {
    BoundQuery::new(ctx, n, rate)?.rcu_constant_weight(delta)
}

pub fn rcu_memoryless(ctx: &RingContext, n: usize, rate: f64, spec: &LeeChannelSpec) -> Result<f64> {
    BoundQuery::new(ctx, n, rate)?.rcu_memoryless(spec)
}

/// Law of the Lee weight of one noise symbol, indexed by weight `0..=r`.
pub fn symbol_weight_pmf(spec: &LeeChannelSpec) -> Vec<f64> {
    let ctx = spec.ctx();
    let mut out = vec![0.0; ctx.r() + 1];
    for (e, &p) in spec.noise().as_slice().iter().enumerate() {
        out[ctx.weight_table()[e]] += p;
    }
    out
}

/// Exact law of the total Lee weight of `n` i.i.d. noise symbols, by
/// `n`-fold convolution of [`symbol_weight_pmf`].
pub fn total_weight_pmf(spec: &LeeChannelSpec, n: usize) -> Vec<f64> {
    let single = symbol_weight_pmf(spec);
    let r = single.len() - 1;
    let mut law = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; law.len() + r];
        for (t, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (w, &s) in single.iter().enumerate() {
                next[t + w] += p * s;
            }
        }
        law = next;
    }
    law
}

/// The δ at which `H_δ = (1-R) ln q`, i.e. the largest normalized noise
/// weight a rate-R code can tolerate asymptotically.
pub fn shannon_limit(ctx: &RingContext, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::domain(format!("rate {rate} outside (0, 1)")));
    }
    let target = (1.0 - rate) * (ctx.q() as f64).ln();
    let (mut lo, mut hi) = (0.0, delta_q(ctx));
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if h_delta(ctx, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on `(0, 1)`.
pub fn q_inverse(eps: f64) -> f64 {
    std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps)
}

/// Capacity and dispersion of a memoryless Lee channel, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalApproximation {
    pub capacity: f64,
    pub dispersion: f64,
    ln_q: f64,
}

impl NormalApproximation {
    pub fn new(spec: &LeeChannelSpec) -> Self {
        let ln_q = (spec.ctx().q() as f64).ln();
        let noise = spec.noise().as_slice();
        // information density ln(q·φ*_E) under uniform input
        let mean: f64 = noise
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * (ln_q + p.ln()))
            .sum();
        let var: f64 = noise
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * (ln_q + p.ln() - mean).powi(2))
            .sum();
        NormalApproximation {
            capacity: mean,
            dispersion: var.max(0.0),
            ln_q,
        }
    }

    /// Achievable rate (symbols per symbol, i.e. normalized by `ln q`) at
    /// block length `n` and block error rate `eps`.
    pub fn rate(&self, n: usize, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain(format!("target error rate {eps} outside (0, 1)")));
        }
        let n = n as f64;
        let nats = self.capacity - (self.dispersion / n).sqrt() * q_inverse(eps) + n.ln() / (2.0 * n);
        Ok(nats / self.ln_q)
    }

    /// Block error rate at block length `n` and rate `rate`.
    pub fn bler(&self, n: usize, rate: f64) -> f64 {
        let n = n as f64;
        let margin = n * (self.capacity - rate * self.ln_q) + 0.5 * n.ln();
        if self.dispersion == 0.0 {
            return if margin > 0.0 { 0.0 } else { 1.0 };
        }
        q_function(margin / (n * self.dispersion).sqrt())
    }
}

/// One row of the bounds CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub q: usize,
    pub n: usize,
    pub rate: f64,
    pub delta: f64,
    pub rcu_cw: f64,
    pub rcu_ml: f64,
    pub na_bler: f64,
    pub shannon_limit: f64,
}

pub const BOUNDS_CSV_HEADER: &str = "q,n,R,delta,rcu_cw,rcu_ml,na_bler,shannon_limit";

/// Evaluates every benchmark over a δ grid.
pub fn bounds_table(ctx: &RingContext, n: usize, rate: f64, deltas: &[f64]) -> Result<Vec<BoundsRow>> {
    let query = BoundQuery::new(ctx, n, rate)?;
    let sh = shannon_limit(ctx, rate)?;
    deltas
        .iter()
        .map(|&delta| {
            let spec = LeeChannelSpec::from_delta(ctx, delta)?;
            Ok(BoundsRow {
                q: ctx.q(),
                n,
                rate,
                delta,
                rcu_cw: query.rcu_constant_weight(delta)?,
                rcu_ml: query.rcu_memoryless(&spec)?,
                na_bler: NormalApproximation::new(&spec).bler(n, rate),
                shannon_limit: sh,
            })
        })
        .collect()
}

pub fn write_bounds_csv<W: Write>(mut out: W, rows: &[BoundsRow]) -> Result<()> {
    writeln!(out, "# lee-ldpc {} bounds seed=none", crate::VERSION)?;
    writeln!(out, "{BOUNDS_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:e},{:e},{:e},{}",
            r.q, r.n, r.rate, r.delta, r.rcu_cw, r.rcu_ml, r.na_bler, r.shannon_limit
        )?;
    }
    Ok(())
}

pub fn read_bounds_csv<R: BufRead>(input: R) -> Result<Vec<BoundsRow>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != BOUNDS_CSV_HEADER {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected header `{BOUNDS_CSV_HEADER}`"),
                });
            }
            seen_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 8 fields, found {}", f.len()),
            });
        }
        let num = |k: usize| -> Result<f64> {
            f[k].parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad number `{}`", f[k]),
            })
        };
        rows.push(BoundsRow {
            q: num(0)? as usize,
            n: num(1)? as usize,
            rate: num(2)?,
            delta: num(3)?,
            rcu_cw: num(4)?,
            rcu_ml: num(5)?,
            na_bler: num(6)?,
            shannon_limit: num(7)?,
        });
    }
    Ok(rows)
}
