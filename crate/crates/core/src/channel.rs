//! The memoryless Lee channel.
//!
//! The additive noise `E` has law `P(e) = exp(-β w_L(e)) / Z(β)`. The
//! parameter β and the expected per-symbol Lee weight δ are in one-to-one
//! correspondence; δ = δ_q at β = 0 (uniform noise) and δ → 0 as β → ∞.
//! The same law is the entropy-maximizing marginal under a mean-weight
//! constraint, which is why it also describes the per-symbol behavior of the
//! constant-weight channel in [`crate::sphere`].

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::ring::{RingContext, Symbol};

fn log_weights(ctx: &RingContext, beta: f64) -> Vec<f64> {
    ctx.weight_table()
        .iter()
        .map(|&w| if w == 0 { 0.0 } else { -beta * w as f64 })
        .collect()
}

/// Boltzmann weights normalized to a pmf, computed with a max shift.
fn boltzmann(ctx: &RingContext, beta: f64) -> Vec<f64> {
    let lw = log_weights(ctx, beta);
    let m = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = lw.iter().map(|&l| (l - m).exp()).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

/// `Z(β) = Σ_e exp(-β w_L(e))`.
pub fn partition_z(ctx: &RingContext, beta: f64) -> f64 {
    log_weights(ctx, beta).iter().map(|l| l.exp()).sum()
}

/// Expected Lee weight of the noise at inverse temperature β.
pub fn delta_from_beta(ctx: &RingContext, beta: f64) -> f64 {
    mean_and_var(ctx, beta).0
}

fn mean_and_var(ctx: &RingContext, beta: f64) -> (f64, f64) {
    let p = boltzmann(ctx, beta);
    let w = ctx.weight_table();
    let mean: f64 = p.iter().zip(w).map(|(pi, &wi)| pi * wi as f64).sum();
    let var: f64 = p
        .iter()
        .zip(w)
        .map(|(pi, &wi)| pi * (wi as f64 - mean).powi(2))
        .sum();
    (mean, var)
}

/// Inverts [`delta_from_beta`] for `delta ∈ (0, r)`.
///
/// Bisection on a bracket that starts at [-50, 50] and widens if needed,
/// then a few Newton steps using `dδ/dβ = -Var(w_L(E))`.
pub fn beta_from_delta(ctx: &RingContext, delta: f64) -> Result<f64> {
    let r = ctx.r() as f64;
    if !(delta > 0.0 && delta < r) {
        return Err(Error::domain(format!(
            "delta must lie in (0, {r}) for q = {}, got {delta}",
            ctx.q()
        )));
    }
    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
    while delta_from_beta(ctx, lo) <= delta {
        lo *= 2.0;
        if lo < -1e6 {
            return Err(Error::domain(format!("delta {delta} too close to r")));
        }
    }
    while delta_from_beta(ctx, hi) >= delta {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::domain(format!("delta {delta} too close to 0")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if delta_from_beta(ctx, mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * (1.0 + mid.abs()) {
            break;
        }
    }
    let mut beta = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (mean, var) = mean_and_var(ctx, beta);
        if var <= 0.0 || (mean - delta).abs() < 1e-15 {
            break;
        }
        let next = beta + (mean - delta) / var;
        if !(next >= lo && next <= hi) {
            break;
        }
        beta = next;
    }
    Ok(beta)
}

/// The entropy-maximizing pmf with mean Lee weight `delta`.
pub fn marginal_phi_star(ctx: &RingContext, delta: f64) -> Result<Pmf> {
    let beta = beta_from_delta(ctx, delta)?;
    Ok(Pmf::from_weights(boltzmann(ctx, beta)).expect("boltzmann weights are positive"))
}

/// One memoryless Lee channel instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LeeChannelSpec {
    ctx: RingContext,
    beta: f64,
    delta: f64,
    z: f64,
    noise: Pmf,
}

impl LeeChannelSpec {
    /// Builds the channel from β. `β = +∞` gives the noiseless channel.
    pub fn from_beta(ctx: &RingContext, beta: f64) -> Result<Self> {
        if beta.is_nan() || beta == f64::NEG_INFINITY {
            return Err(Error::domain(format!("invalid beta {beta}")));
        }
        let noise = Pmf::from_weights(boltzmann(ctx, beta)).expect("positive weights");
        let delta = noise
            .as_slice()
            .iter()
            .zip(ctx.weight_table())
            .map(|(p, &w)| p * w as f64)
            .sum();
        Ok(LeeChannelSpec {
            ctx: ctx.clone(),
            beta,
            delta,
            z: partition_z(ctx, beta),
            noise,
        })
    }

    /// Builds the channel from the expected per-symbol Lee weight.
    pub fn from_delta(ctx: &RingContext, delta: f64) -> Result<Self> {
        let beta = beta_from_delta(ctx, delta)?;
        let mut spec = Self::from_beta(ctx, beta)?;
        spec.delta = delta;
        Ok(spec)
    }

    pub fn noiseless(ctx: &RingContext) -> Self {
        Self::from_beta(ctx, f64::INFINITY).expect("infinite beta is valid")
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Law of the additive noise, φ*.
    pub fn noise(&self) -> &Pmf {
        &self.noise
    }

    /// `P(y | x)`.
    pub fn transition(&self, y: Symbol, x: Symbol) -> f64 {
        self.noise[self.ctx.sub(y, x)]
    }

    /// The likelihood vector `(P(y|0), ..., P(y|q-1))`.
    pub fn likelihoods(&self, y: Symbol) -> Vec<f64> {
        (0..self.ctx.q()).map(|x| self.transition(y, x)).collect()
    }

    /// The L-vector `L_x(y) = ln P(y|x)`.
    pub fn log_likelihoods(&self, y: Symbol) -> Vec<f64> {
        (0..self.ctx.q())
            .map(|x| {
                let w = self.ctx.weight_table()[self.ctx.sub(y, x)];
                if w == 0 {
                    -self.z.ln()
                } else {
                    -self.beta * w as f64 - self.z.ln()
                }
            })
            .collect()
    }

    /// A sampler for the additive noise.
    pub fn noise_sampler(&self) -> NoiseSampler {
        NoiseSampler {
            dist: WeightedIndex::new(self.noise.as_slice()).expect("noise pmf has positive mass"),
        }
    }

    /// `y_i = x_i + e_i` with i.i.d. noise.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &[Symbol], rng: &mut R) -> Vec<Symbol> {
        let sampler = self.noise_sampler();
        x.iter()
            .map(|&xi| self.ctx.add(xi, sampler.sample(rng)))
            .collect()
    }
}

/// Draws single noise symbols from φ*.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    dist: WeightedIndex<f64>,
}

impl NoiseSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Symbol {
        self.dist.sample(rng)
    }
}

/// Free-function form of [`LeeChannelSpec::transmit`].
pub fn transmit_memoryless<R: Rng + ?Sized>(
    spec: &LeeChannelSpec,
    x: &[Symbol],
    rng: &mut R,
) -> Vec<Symbol> {
    spec.transmit(x, rng)
}
