//! Population-dynamics density evolution for nonbinary BP.
//!
//! A population of `N` variable-to-check PMFs (law of `x_v` given the
//! all-zero codeword) is evolved by resampling. A check-to-variable sample
//! convolves `c-1` population members, each relabeled by a fresh uniform
//! unit, and maps the sum through `s ↦ -h^{-1} s` for another fresh unit.
//! A variable-to-check sample multiplies a fresh channel PMF with `v-1`
//! check samples. The symbol error probability is measured on the
//! a-posteriori PMF (one more check sample), with ties split equally.
//!
//! Work is cut into fixed blocks with one RNG stream per
//! `(iteration, phase, block)`, so results depend on the seed only.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::bounds::delta_q;
use crate::channel::LeeChannelSpec;
use crate::decoder::maximizers;
use crate::error::{Error, Result};
use crate::pmf::{circular_convolve, normalize};
use crate::ring::RingContext;
use crate::rng::{domain, stream_rng};

const BLOCK: usize = 1024;
const FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct BpDeConfig {
    /// Population size N.
    pub population: usize,
    pub max_iter: usize,
    /// Declare convergence once the symbol error probability is below this.
    pub target: f64,
    /// Bisection stops when the bracket is narrower than this.
    pub resolution: f64,
    /// Give up when the error has not improved for this many iterations.
    pub patience: usize,
    pub seed: u64,
}

impl Default for BpDeConfig {
    fn default() -> Self {
        BpDeConfig {
            population: 100_000,
            max_iter: 200,
            target: 1e-5,
            resolution: 1e-3,
            patience: 50,
            seed: 1,
        }
    }
}

/// Outcome of one population-dynamics run.
#[derive(Debug, Clone, PartialEq)]
pub struct BpDeRun {
    pub delta: f64,
    pub converged: bool,
    /// Symbol error probability after each iteration.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpThreshold {
    pub delta: f64,
    /// Every `(δ, converged)` pair evaluated by the bisection.
    pub evaluations: Vec<(f64, bool)>,
}

/// Runs BP density evolution at one channel parameter.
pub fn bp_de_run(spec: &LeeChannelSpec, v: usize, c: usize, cfg: &BpDeConfig) -> Result<BpDeRun> {
    if v < 2 || c < 2 {
        return Err(Error::domain(format!("degrees ({v}, {c}) must both be at least 2")));
    }
    if cfg.population < BLOCK {
        return Err(Error::domain(format!("population must be at least {BLOCK}")));
    }
    let ctx = spec.ctx();
    let q = ctx.q();
    let n = cfg.population;
    let noise = spec.noise().as_slice();
    // channel PMF over x for each received y, given x = 0 was sent: P(y|x)
    let channels: Vec<Vec<f64>> = (0..q).map(|y| spec.likelihoods(y)).collect();
    let noise_cdf: Vec<f64> = noise
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let draw_y = |rng: &mut rand_chacha::ChaCha8Rng| -> usize {
        let u: f64 = rng.gen::<f64>() * noise_cdf[q - 1];
        noise_cdf.iter().position(|&c| u < c).unwrap_or(q - 1)
    };

    let mut vn: Vec<f64> = vec![0.0; n * q];
    let mut cn: Vec<f64> = vec![0.0; n * q];
    let blocks = n.div_ceil(BLOCK);
    let stream = |iter: usize, phase: u64, block: usize| -> rand_chacha::ChaCha8Rng {
        stream_rng(cfg.seed, domain::BP_DENSITY_EVOLUTION + phase, (iter * blocks + block) as u64)
    };

    vn.par_chunks_mut(BLOCK * q).enumerate().for_each(|(b, chunk)| {
        let mut rng = stream(0, 0, b);
        for msg in chunk.chunks_mut(q) {
            msg.copy_from_slice(&channels[draw_y(&mut rng)]);
            normalize(msg);
        }
    });

    let mut errors = Vec::new();
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut converged = false;
    for iter in 1..=cfg.max_iter {
        // check-to-variable population
        let vn_ref = &vn;
        cn.par_chunks_mut(BLOCK * q).enumerate().for_each(|(b, chunk)| {
            let mut rng = stream(iter, 1, b);
            let mut acc = vec![0.0; q];
            let mut scaled = vec![0.0; q];
            let mut tmp = vec![0.0; q];
            for out in chunk.chunks_mut(q) {
                for k in 0..c - 1 {
                    let j = rng.gen_range(0..n);
                    let u = *ctx.units().choose(&mut rng).unwrap();
                    let src = &vn_ref[j * q..(j + 1) * q];
                    let dst = if k == 0 { &mut acc } else { &mut scaled };
                    for (x, &p) in src.iter().enumerate() {
                        dst[ctx.mul(u, x)] = p;
                    }
                    if k > 0 {
                        circular_convolve(&acc, &scaled, &mut tmp);
                        std::mem::swap(&mut acc, &mut tmp);
                    }
                }
                normalize(&mut acc);
                let h = *ctx.units().choose(&mut rng).unwrap();
                for x in 0..q {
                    out[x] = acc[ctx.neg(ctx.mul(h, x))];
                }
            }
        });

        // variable-to-check population and error estimate
        let cn_ref = &cn;
        let block_errors: Vec<f64> = vn
            .par_chunks_mut(BLOCK * q)
            .enumerate()
            .map(|(b, chunk)| {
                let mut rng = stream(iter, 2, b);
                let mut app = vec![0.0; q];
                let mut ties = Vec::with_capacity(q);
                let mut err = 0.0;
                for out in chunk.chunks_mut(q) {
                    out.copy_from_slice(&channels[draw_y(&mut rng)]);
                    normalize(out);
                    for _ in 0..v - 1 {
                        let j = rng.gen_range(0..n);
                        for (o, m) in out.iter_mut().zip(&cn_ref[j * q..(j + 1) * q]) {
                            *o *= m;
                        }
                        if normalize(out) <= 0.0 {
                            out.iter_mut().for_each(|x| *x = 1.0 / q as f64);
                        }
                    }
                    let j = rng.gen_range(0..n);
                    for ((a, o), m) in app.iter_mut().zip(out.iter()).zip(&cn_ref[j * q..(j + 1) * q]) {
                        *a = o * m;
                    }
                    maximizers(&app, &mut ties);
                    if ties.contains(&0) {
                        err += 1.0 - 1.0 / ties.len() as f64;
                    } else {
                        err += 1.0;
                    }
                    out.iter_mut().for_each(|x| *x = x.max(FLOOR));
                    normalize(out);
                }
                err
            })
            .collect();
        let err = block_errors.iter().sum::<f64>() / n as f64;
        errors.push(err);
        if err < cfg.target {
            converged = true;
            break;
        }
        if err < best * 0.999 {
            best = err;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    Ok(BpDeRun {
        delta: spec.delta(),
        converged,
        errors,
    })
}

/// Bisection on δ ∈ (0, δ_q) for the BP threshold.
pub fn bp_de_threshold(ctx: &RingContext, v: usize, c: usize, cfg: &BpDeConfig) -> Result<BpThreshold> {
    let mut lo = 0.0;
    let mut hi = delta_q(ctx);
    let mut evaluations = Vec::new();
    while hi - lo > cfg.resolution {
        let mid = 0.5 * (lo + hi);
        let spec = LeeChannelSpec::from_delta(ctx, mid)?;
        let run = bp_de_run(&spec, v, c, cfg)?;
        evaluations.push((mid, run.converged));
        if run.converged {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BpThreshold {
        delta: 0.5 * (lo + hi),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BpDeConfig {
        BpDeConfig {
            population: 8192,
            max_iter: 60,
            ..Default::default()
        }
    }

    #[test]
    fn converges_far_below_and_fails_far_above() {
        let ctx = RingContext::new(5).unwrap();
        let good = bp_de_run(&LeeChannelSpec::from_delta(&ctx, 0.12).unwrap(), 3, 6, &small()).unwrap();
        assert!(good.converged);
        let bad = bp_de_run(&LeeChannelSpec::from_delta(&ctx, 0.35).unwrap(), 3, 6, &small()).unwrap();
        assert!(!bad.converged);
    }

    #[test]
    fn runs_are_reproducible() {
        let ctx = RingContext::new(8).unwrap();
        let spec = LeeChannelSpec::from_delta(&ctx, 0.3).unwrap();
        let cfg = BpDeConfig { max_iter: 10, ..small() };
        let a = bp_de_run(&spec, 3, 6, &cfg).unwrap();
        let b = bp_de_run(&spec, 3, 6, &cfg).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| bp_de_run(&spec, 3, 6, &cfg).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn rejects_tiny_population() {
        let ctx = RingContext::new(5).unwrap();
        let spec = LeeChannelSpec::from_delta(&ctx, 0.1).unwrap();
        let cfg = BpDeConfig { population: 10, ..Default::default() };
        assert!(bp_de_run(&spec, 3, 6, &cfg).is_err());
    }
}
