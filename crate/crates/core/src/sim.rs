//! Monte Carlo block error rate estimation.
//!
//! The all-zero codeword is sent at every δ of the grid. Frame `f` at grid
//! point `i` draws its noise and decoder tie-breaks from the stream
//! `(seed, SIM_FRAMES + i, f)`, so a record depends only on the config. Frames
//! are decoded in parallel batches and then scanned in order, stopping at the
//! first frame that meets the stop rule.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundsRow;
use crate::channel::LeeChannelSpec;
use crate::code::{peg_construct, sample_regular_ensemble, ParityCheckCode};
use crate::de::smp_xi_schedule;
use crate::decoder::{BpDecoder, SmpDecoder, XiSchedule};
use crate::error::{Error, Result};
use crate::ring::{RingContext, Symbol};
use crate::rng::{domain, stream_rng};
use crate::sphere::{target_weight, SphereCounter};

const BATCH: usize = 256;
const Z_95: f64 = 1.959_963_984_540_054;

pub const SIM_CSV_HEADER: &str = "q,n,dv,dc,channel,decoder,delta,frames,errors,bler,ci_lo,ci_hi,mean_iters";

/// Where the parity-check matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodeSource {
    /// A code in the text format of [`ParityCheckCode::write`].
    File { path: PathBuf },
    /// Progressive edge growth.
    Peg { q: usize, n: usize, dv: usize, dc: usize, seed: u64 },
    /// One draw from the regular ensemble.
    Ensemble { q: usize, n: usize, dv: usize, dc: usize, seed: u64 },
}

impl CodeSource {
    pub fn build(&self) -> Result<ParityCheckCode> {
        match self {
            CodeSource::File { path } => ParityCheckCode::read(path),
            CodeSource::Peg { q, n, dv, dc, seed } => {
                let ctx = RingContext::new(*q)?;
                peg_construct(&ctx, *n, *dv, *dc, &mut stream_rng(*seed, domain::CODE_CONSTRUCTION, 0))
            }
            CodeSource::Ensemble { q, n, dv, dc, seed } => {
                let ctx = RingContext::new(*q)?;
                sample_regular_ensemble(&ctx, *n, *dv, *dc, &mut stream_rng(*seed, domain::CODE_CONSTRUCTION, 0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Memoryless,
    ConstantWeight,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Memoryless => "memoryless",
            ChannelKind::ConstantWeight => "constant_weight",
        }
    }
}

/// Source of the SMP ξ schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum XiSource {
    /// Run SMP density evolution on `grid` (the simulation grid when
    /// omitted) and use the schedule of the nearest grid point.
    De {
        #[serde(default)]
        grid: Option<Vec<f64>>,
    },
    /// One schedule per simulation δ, in grid order.
    Explicit { schedules: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderConfig {
    Bp {
        max_iter: usize,
    },
    Smp {
        max_iter: usize,
        #[serde(default)]
        xi: Option<XiSource>,
    },
}

impl DecoderConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderConfig::Bp { .. } => "bp",
            DecoderConfig::Smp { .. } => "smp",
        }
    }

    pub fn max_iter(&self) -> usize {
        match self {
            DecoderConfig::Bp { max_iter } | DecoderConfig::Smp { max_iter, .. } => *max_iter,
        }
    }
}

fn default_max_frames() -> u64 {
    1_000_000
}

fn default_max_errors() -> u64 {
    200
}

/// A simulation campaign, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub code: CodeSource,
    pub channel: ChannelKind,
    pub deltas: Vec<f64>,
    pub decoder: DecoderConfig,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_max_errors")]
    pub max_errors: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self, ctx: &RingContext) -> Result<()> {
        let r = ctx.r() as f64;
        if self.deltas.is_empty() {
            return Err(Error::config("empty delta grid"));
        }
        if let Some(d) = self.deltas.iter().find(|&&d| !(d > 0.0 && d < r)) {
            return Err(Error::config(format!("delta {d} outside (0, {r})")));
        }
        if self.max_frames == 0 || self.max_errors == 0 {
            return Err(Error::config("max_frames and max_errors must be positive"));
        }
        if self.decoder.max_iter() == 0 {
            return Err(Error::config("max_iter must be positive"));
        }
        match &self.decoder {
            DecoderConfig::Smp { xi: None, .. } => Err(Error::config("SMP decoding needs a xi schedule source")),
            DecoderConfig::Smp {
                xi: Some(XiSource::Explicit { schedules }),
                ..
            } if schedules.len() != self.deltas.len() => Err(Error::config(format!(
                "{} explicit xi schedules for {} grid points",
                schedules.len(),
                self.deltas.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Result at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub q: usize,
    pub n: usize,
    pub dv: Option<usize>,
    pub dc: Option<usize>,
    pub rate: f64,
    pub channel: ChannelKind,
    pub decoder: String,
    pub delta: f64,
    pub frames: u64,
    pub errors: u64,
    /// Block errors where the decoder reached a zero syndrome.
    pub undetected: u64,
    pub bler: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_iters: f64,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (kf, nf) = (k as f64, n as f64);
    let p = kf / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy)]
struct Frame {
    error: bool,
    undetected: bool,
    iterations: usize,
}

enum Noise {
    Memoryless,
    ConstantWeight { counter: SphereCounter, t: usize },
}

/// A prepared simulation: code built, schedules resolved.
pub struct Simulation {
    config: SimConfig,
    code: ParityCheckCode,
    schedules: Vec<Option<XiSchedule>>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        let code = config.code.build()?;
        Self::with_code(config, code)
    }

    /// Uses an already built code instead of `config.code`.
    pub fn with_code(config: SimConfig, code: ParityCheckCode) -> Result<Self> {
        let ctx = code.ctx().clone();
        config.validate(&ctx)?;
        let max_iter = config.decoder.max_iter();
        let schedules = match &config.decoder {
            DecoderConfig::Bp { .. } => vec![None; config.deltas.len()],
            DecoderConfig::Smp { xi: Some(XiSource::Explicit { schedules }), .. } => schedules
                .iter()
                .map(|s| XiSchedule::new(s.clone()).map(Some))
                .collect::<Result<_>>()?,
            DecoderConfig::Smp { xi: Some(XiSource::De { grid }), .. } => {
                let (dv, dc) = code
                    .regular_degrees()
                    .ok_or_else(|| Error::config("DE xi schedules need a regular code"))?;
                let grid = grid.clone().unwrap_or_else(|| config.deltas.clone());
                if grid.is_empty() {
                    return Err(Error::config("empty DE grid"));
                }
                let table: Vec<XiSchedule> = grid
                    .iter()
                    .map(|&d| smp_xi_schedule(&ctx, dv, dc, d, max_iter))
                    .collect::<Result<_>>()?;
                config
                    .deltas
                    .iter()
                    .map(|&d| {
                        let nearest = (0..grid.len())
                            .min_by(|&a, &b| (grid[a] - d).abs().total_cmp(&(grid[b] - d).abs()))
                            .expect("nonempty grid");
                        Some(table[nearest].clone())
                    })
                    .collect()
            }
            DecoderConfig::Smp { xi: None, .. } => unreachable!("rejected by validate"),
        };
        if let Some(s) = schedules.iter().flatten().find(|s| s.len() < max_iter) {
            return Err(Error::config(format!("xi schedule of length {} shorter than max_iter = {max_iter}", s.len())));
        }
        Ok(Simulation { config, code, schedules })
    }

    pub fn code(&self) -> &ParityCheckCode {
        &self.code
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Runs every grid point.
    pub fn run(&self) -> Result<Vec<SimRecord>> {
        (0..self.config.deltas.len()).map(|i| self.run_point(i)).collect()
    }

    fn run_point(&self, idx: usize) -> Result<SimRecord> {
        let cfg = &self.config;
        let code = &self.code;
        let ctx = code.ctx();
        let n = code.n();
        let delta = cfg.deltas[idx];
        let spec = LeeChannelSpec::from_delta(ctx, delta)?;
        let noise = match cfg.channel {
            ChannelKind::Memoryless => Noise::Memoryless,
            ChannelKind::ConstantWeight => {
                let counter = SphereCounter::new(ctx, n);
                let t = target_weight(n, delta);
                if t > counter.max_weight() {
                    return Err(Error::config(format!("weight {t} exceeds the maximum {}", counter.max_weight())));
                }
                Noise::ConstantWeight { counter, t }
            }
        };
        let sampler = spec.noise_sampler();
        let schedule = self.schedules[idx].as_ref();
        let max_iter = cfg.decoder.max_iter();

        let frame = |f: u64| -> Result<Frame> {
            let mut rng = stream_rng(cfg.seed, domain::SIM_FRAMES + idx as u64, f);
            let y: Vec<Symbol> = match &noise {
                Noise::Memoryless => (0..n).map(|_| sampler.sample(&mut rng)).collect(),
                Noise::ConstantWeight { counter, t } => {
                    let e = counter.sample(*t, &mut rng)?;
                    let w = ctx.lee_weight_vec(&e)?;
                    assert_eq!(w, *t, "constant-weight error of the wrong weight");
                    e
                }
            };
            let out = match schedule {
                None => BpDecoder::new(code).decode_received(&y, &spec, max_iter, &mut rng)?,
                Some(s) => SmpDecoder::new(code).decode(&y, &spec, s, max_iter, &mut rng)?,
            };
            let error = out.estimate.iter().any(|&x| x != 0);
            Ok(Frame {
                error,
                undetected: error && out.converged,
                iterations: out.iterations,
            })
        };

        let (mut frames, mut errors, mut undetected, mut iters) = (0u64, 0u64, 0u64, 0u64);
        'outer: while frames < cfg.max_frames && errors < cfg.max_errors {
            let end = (frames + BATCH as u64).min(cfg.max_frames);
            let batch: Vec<Frame> = (frames..end).into_par_iter().map(frame).collect::<Result<_>>()?;
            for fr in batch {
                frames += 1;
                iters += fr.iterations as u64;
                if fr.error {
                    errors += 1;
                    undetected += fr.undetected as u64;
                }
                if errors >= cfg.max_errors {
                    break 'outer;
                }
            }
        }
        let (ci_lo, ci_hi) = wilson_interval(errors, frames, Z_95);
        let degrees = code.regular_degrees();
        Ok(SimRecord {
            q: ctx.q(),
            n,
            dv: degrees.map(|d| d.0),
            dc: degrees.map(|d| d.1),
            rate: code.design_rate(),
            channel: cfg.channel,
            decoder: cfg.decoder.name().to_string(),
            delta,
            frames,
            errors,
            undetected,
            bler: errors as f64 / frames as f64,
            ci_lo,
            ci_hi,
            mean_iters: iters as f64 / frames as f64,
        })
    }
}

/// Builds the code and runs every grid point of `config`.
pub fn run_sim(config: &SimConfig) -> Result<Vec<SimRecord>> {
    Simulation::new(config.clone())?.run()
}

fn opt(d: Option<usize>) -> String {
    d.map(|x| x.to_string()).unwrap_or_default()
}

fn record_fields(r: &SimRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{:e},{:e},{:e},{}",
        r.q,
        r.n,
        opt(r.dv),
        opt(r.dc),
        r.channel.name(),
        r.decoder,
        r.delta,
        r.frames,
        r.errors,
        r.bler,
        r.ci_lo,
        r.ci_hi,
        r.mean_iters
    )
}

pub fn write_sim_csv<W: Write>(mut out: W, seed: u64, records: &[SimRecord]) -> Result<()> {
    writeln!(out, "# lee-ldpc {} simulate seed={seed}", crate::VERSION)?;
    writeln!(out, "{SIM_CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", record_fields(r))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    version: &'static str,
    seed: u64,
    config: &'a SimConfig,
    records: &'a [SimRecord],
}

/// JSON provenance record: the full config, seed and results.
pub fn sidecar_json(config: &SimConfig, records: &[SimRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Sidecar {
        version: crate::VERSION,
        seed: config.seed,
        config,
        records,
    })?)
}

pub const MERGED_CSV_HEADER: &str =
    "q,n,dv,dc,channel,decoder,delta,frames,errors,bler,ci_lo,ci_hi,mean_iters,R,rcu_cw,rcu_ml,na_bler,shannon_limit";

/// A simulation record next to the benchmarks at the same point.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedRow {
    pub record: SimRecord,
    pub bounds: BoundsRow,
}

/// Joins records with bounds rows on `(q, n, R, δ)`. Every record must find
/// a partner.
pub fn compare_to_benchmarks(records: &[SimRecord], bounds: &[BoundsRow]) -> Result<Vec<MergedRow>> {
    const TOL: f64 = 1e-9;
    records
        .iter()
        .map(|r| {
            bounds
                .iter()
                .find(|b| {
                    b.q == r.q && b.n == r.n && (b.rate - r.rate).abs() < TOL && (b.delta - r.delta).abs() < TOL
                })
                .map(|b| MergedRow {
                    record: r.clone(),
                    bounds: b.clone(),
                })
                .ok_or_else(|| {
                    Error::config(format!(
                        "no bounds row for q={} n={} R={} delta={}",
                        r.q, r.n, r.rate, r.delta
                    ))
                })
        })
        .collect()
}

pub fn write_merged_csv<W: Write>(mut out: W, seed: u64, rows: &[MergedRow]) -> Result<()> {
    writeln!(out, "# lee-ldpc {} compare seed={seed}", crate::VERSION)?;
    writeln!(out, "{MERGED_CSV_HEADER}")?;
    for m in rows {
        let b = &m.bounds;
        writeln!(
            out,
            "{},{},{:e},{:e},{:e},{}",
            record_fields(&m.record),
            b.rate,
            b.rcu_cw,
            b.rcu_ml,
            b.na_bler,
            b.shannon_limit
        )?;
    }
    Ok(())
}
