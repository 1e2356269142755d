//! Command-line front end for the `leeldpc` binary.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{bounds_table, read_bounds_csv, shannon_limit, write_bounds_csv};
use crate::channel::{marginal_phi_star, LeeChannelSpec};
use crate::code::ParityCheckCode;
use crate::de::{
    bp_de_threshold, schedule_from_report, smp_de_run, smp_de_trace, smp_threshold, BpDeConfig, DeReport,
};
use crate::decoder::{BpDecoder, SmpDecoder, XiSchedule};
use crate::error::{Error, Result};
use crate::ring::{RingContext, Symbol};
use crate::rng::seeded;
use crate::sim::{compare_to_benchmarks, sidecar_json, write_merged_csv, write_sim_csv, CodeSource, SimConfig, Simulation};

pub const DE_CSV_HEADER: &str = "q,dv,dc,delta,iteration,p0,xi,tv";

#[derive(Debug, Parser)]
#[command(name = "leeldpc", version, about = "Lee-metric channels and nonbinary LDPC codes over Z_q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderKind {
    Bp,
    Smp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Peg,
    Ensemble,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Lee channel noise law (the constant-weight marginal) at δ.
    Marginal {
        #[arg(long)]
        q: usize,
        /// Mean Lee weight per symbol.
        #[arg(long)]
        delta: f64,
    },
    /// Finite-length benchmarks or the Shannon limit.
    Bounds {
        #[arg(long)]
        q: usize,
        /// Rate in q-ary symbols per channel use.
        #[arg(long)]
        rate: f64,
        /// Print only the Shannon limit δ at this rate.
        #[arg(long)]
        shannon: bool,
        /// Block length.
        #[arg(long, required_unless_present = "shannon")]
        n: Option<usize>,
        /// Comma-separated δ grid.
        #[arg(long, value_delimiter = ',', required_unless_present = "shannon")]
        delta: Vec<f64>,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build or inspect parity-check codes.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Decode one received word.
    Decode {
        /// Code file.
        #[arg(long)]
        code: PathBuf,
        /// Comma-separated received symbols.
        #[arg(long, value_delimiter = ',')]
        received: Vec<Symbol>,
        #[arg(long, value_enum)]
        decoder: DecoderKind,
        /// Channel parameter the decoder assumes.
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Density evolution.
    De {
        #[command(subcommand)]
        action: DeAction,
    },
    /// Evolution of the q-SC approximation gap, one block per ring.
    TvCurve {
        /// Comma-separated ring orders.
        #[arg(long, value_delimiter = ',')]
        q: Vec<usize>,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 30)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo block error rates from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (stdout when omitted). A JSON sidecar is written next
        /// to it with the extension `.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bounds CSV to join against.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Where to write the joined CSV (required with --compare).
        #[arg(long, requires = "compare")]
        merged: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodeAction {
    /// Construct a regular (dv, dc) code and write it in text form.
    Build {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long, value_enum, default_value_t = Construction::Peg)]
        method: Construction,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the parameters of a code file.
    Inspect {
        #[arg(long)]
        code: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DeAction {
    /// Decoding threshold by bisection.
    Threshold {
        #[arg(long, value_enum)]
        decoder: DecoderKind,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        /// Iteration cap (SMP default 1000, BP default 200).
        #[arg(long)]
        max_iter: Option<usize>,
        /// BP population size.
        #[arg(long, default_value_t = 100_000)]
        population: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// SMP-DE trajectory and the ξ schedule it yields.
    XiSchedule {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SMP-DE run for a fixed number of iterations with the q-SC gap.
    TvCurve {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        dv: usize,
        #[arg(long)]
        dc: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 30)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_de_rows(out: &mut dyn Write, dv: usize, dc: usize, report: &DeReport) -> Result<()> {
    let q = report.initial.len();
    writeln!(out, "{q},{dv},{dc},{},0,{},,", report.delta, report.initial[0])?;
    for s in &report.trajectory {
        writeln!(
            out,
            "{q},{dv},{dc},{},{},{},{:e},{:e}",
            report.delta,
            s.iteration,
            s.p[0],
            s.xi,
            s.qsc_gap()
        )?;
    }
    Ok(())
}

fn de_header(out: &mut dyn Write, seed: Option<u64>) -> Result<()> {
    let seed = seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    writeln!(out, "# lee-ldpc {} de seed={seed}", crate::VERSION)?;
    writeln!(out, "{DE_CSV_HEADER}")?;
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Executes a parsed command, writing human output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Marginal { q, delta } => {
            let ctx = RingContext::new(q)?;
            let phi = marginal_phi_star(&ctx, delta)?;
            writeln!(stdout, "symbol,probability")?;
            for (a, p) in phi.as_slice().iter().enumerate() {
                writeln!(stdout, "{a},{p:.12}")?;
            }
        }
        Command::Bounds {
            q,
            rate,
            shannon,
            n,
            delta,
            out,
        } => {
            let ctx = RingContext::new(q)?;
            if shannon {
                writeln!(stdout, "{:.4}", shannon_limit(&ctx, rate)?)?;
            } else {
                let n = n.ok_or_else(|| Error::config("--n is required"))?;
                let rows = bounds_table(&ctx, n, rate, &delta)?;
                match out {
                    Some(_) => write_bounds_csv(output(&out)?, &rows)?,
                    None => write_bounds_csv(&mut *stdout, &rows)?,
                }
            }
        }
        Command::Code { action } => match action {
            CodeAction::Build {
                q,
                n,
                dv,
                dc,
                method,
                seed,
                out,
            } => {
                let source = match method {
                    Construction::Peg => CodeSource::Peg { q, n, dv, dc, seed },
                    Construction::Ensemble => CodeSource::Ensemble { q, n, dv, dc, seed },
                };
                let code = source.build()?;
                code.write(&out)?;
                writeln!(stdout, "wrote {} ({} x {}, girth {})", out.display(), code.m(), code.n(), girth_text(&code))?;
            }
            CodeAction::Inspect { code } => {
                let code = ParityCheckCode::read(code)?;
                writeln!(stdout, "q {}", code.ctx().q())?;
                writeln!(stdout, "n {}", code.n())?;
                writeln!(stdout, "m {}", code.m())?;
                writeln!(stdout, "edges {}", code.num_edges())?;
                match code.regular_degrees() {
                    Some((v, c)) => writeln!(stdout, "degrees ({v}, {c})")?,
                    None => writeln!(stdout, "degrees irregular")?,
                }
                writeln!(stdout, "design_rate {}", code.design_rate())?;
                writeln!(stdout, "girth {}", girth_text(&code))?;
            }
        },
        Command::Decode {
            code,
            received,
            decoder,
            delta,
            max_iter,
            seed,
        } => {
            let code = ParityCheckCode::read(code)?;
            let spec = LeeChannelSpec::from_delta(code.ctx(), delta)?;
            let mut rng = seeded(seed);
            let result = match decoder {
                DecoderKind::Bp => BpDecoder::new(&code).decode_received(&received, &spec, max_iter, &mut rng)?,
                DecoderKind::Smp => {
                    let (dv, dc) = code
                        .regular_degrees()
                        .ok_or_else(|| Error::config("SMP decoding needs a regular code for its xi schedule"))?;
                    let report = smp_de_run(&spec, dv, dc, max_iter)?;
                    let schedule: XiSchedule = schedule_from_report(&report, max_iter);
                    SmpDecoder::new(&code).decode(&received, &spec, &schedule, max_iter, &mut rng)?
                }
            };
            let syndrome = code.syndrome(&result.estimate)?;
            writeln!(stdout, "estimate {}", join(&result.estimate))?;
            writeln!(stdout, "syndrome {}", join(&syndrome))?;
            writeln!(stdout, "iterations {}", result.iterations)?;
            writeln!(stdout, "converged {}", result.converged)?;
        }
        Command::De { action } => match action {
            DeAction::Threshold {
                decoder,
                q,
                dv,
                dc,
                max_iter,
                population,
                seed,
            } => {
                let ctx = RingContext::new(q)?;
                let delta = match decoder {
                    DecoderKind::Smp => smp_threshold(&ctx, dv, dc, max_iter.unwrap_or(1000), 1e-5)?.delta,
                    DecoderKind::Bp => {
                        let cfg = BpDeConfig {
                            population,
                            max_iter: max_iter.unwrap_or(BpDeConfig::default().max_iter),
                            seed,
                            ..BpDeConfig::default()
                        };
                        bp_de_threshold(&ctx, dv, dc, &cfg)?.delta
                    }
                };
                writeln!(stdout, "{delta:.4}")?;
            }
            DeAction::XiSchedule {
                q,
                dv,
                dc,
                delta,
                max_iter,
                out,
            } => {
                let ctx = RingContext::new(q)?;
                let spec = LeeChannelSpec::from_delta(&ctx, delta)?;
                let report = smp_de_run(&spec, dv, dc, max_iter)?;
                let mut w = match out {
                    Some(_) => output(&out)?,
                    None => Box::new(&mut *stdout),
                };
                de_header(&mut w, None)?;
                write_de_rows(&mut w, dv, dc, &report)?;
            }
            DeAction::TvCurve {
                q,
                dv,
                dc,
                delta,
                iterations,
                out,
            } => {
                tv_curve(&[q], dv, dc, delta, iterations, &out, stdout)?;
            }
        },
        Command::TvCurve {
            q,
            dv,
            dc,
            delta,
            iterations,
            out,
        } => {
            if q.is_empty() {
                return Err(Error::config("--q needs at least one ring order"));
            }
            tv_curve(&q, dv, dc, delta, iterations, &out, stdout)?;
        }
        Command::Simulate {
            config,
            out,
            compare,
            merged,
        } => {
            let cfg = SimConfig::read(config)?;
            if compare.is_some() && merged.is_none() {
                return Err(Error::config("--compare needs --merged"));
            }
            let sim = Simulation::new(cfg.clone())?;
            let records = sim.run()?;
            match &out {
                Some(path) => {
                    write_sim_csv(output(&out)?, cfg.seed, &records)?;
                    std::fs::write(sidecar_path(path), sidecar_json(&cfg, &records)?)?;
                }
                None => write_sim_csv(&mut *stdout, cfg.seed, &records)?,
            }
            if let (Some(bounds), Some(_)) = (compare, &merged) {
                let rows = read_bounds_csv(BufReader::new(File::open(bounds)?))?;
                let joined = compare_to_benchmarks(&records, &rows)?;
                write_merged_csv(output(&merged)?, cfg.seed, &joined)?;
            }
        }
    }
    Ok(())
}

fn tv_curve(
    qs: &[usize],
    dv: usize,
    dc: usize,
    delta: f64,
    iterations: usize,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let mut w = match out {
        Some(_) => output(out)?,
        None => Box::new(&mut *stdout),
    };
    de_header(&mut w, None)?;
    for &q in qs {
        let ctx = RingContext::new(q)?;
        let spec = LeeChannelSpec::from_delta(&ctx, delta)?;
        write_de_rows(&mut w, dv, dc, &smp_de_trace(&spec, dv, dc, iterations)?)?;
    }
    w.flush()?;
    Ok(())
}

fn girth_text(code: &ParityCheckCode) -> String {
    code.girth().map(|g| g.to_string()).unwrap_or_else(|| "inf".into())
}

fn join(xs: &[Symbol]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses the process arguments and runs; returns the exit code. Errors
/// are reported as one `error: <kind> error: <message>` line on stderr.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock).and_then(|_| Ok(lock.flush()?)) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            1
        }
    }
}
