//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`. Pass criterion numbers as
//! arguments to run a subset, e.g. `cargo test --test acceptance -- 1 5 8`.
//! Failing criteria are reported but only fail the process when
//! `ACCEPTANCE_STRICT=1` is set.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lee_ldpc::bounds::{rcu_constant_weight, rcu_memoryless, shannon_limit};
use lee_ldpc::channel::{marginal_phi_star, LeeChannelSpec};
use lee_ldpc::code::{sample_regular_ensemble, CodewordSampler, ParityCheckCode};
use lee_ldpc::de::{bp_de_run, bp_de_threshold, qsc_approximation_gap, smp_de_run, smp_threshold, BpDeConfig};
use lee_ldpc::decoder::{BpDecoder, SmpDecoder, XiSchedule};
use lee_ldpc::pmf::{tv_distance, Pmf};
use lee_ldpc::ring::{RingContext, Symbol};
use lee_ldpc::rng::{seeded, stream_rng};
use lee_ldpc::sim::{ChannelKind, CodeSource, DecoderConfig, SimConfig, SimRecord, Simulation, XiSource};
use lee_ldpc::sphere::{sphere_size_exact, target_weight, SphereCounter};
use num_traits::ToPrimitive;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// The six (q, dv, dc) rows of the threshold table.
const ROWS: [(usize, usize, usize); 6] = [(5, 3, 6), (5, 4, 8), (7, 3, 6), (7, 4, 8), (8, 3, 6), (8, 4, 8)];
const SMP_REFERENCE: [f64; 6] = [0.1039, 0.1200, 0.1261, 0.1539, 0.1374, 0.1623];
const BP_REFERENCE: [f64; 6] = [0.2148, 0.1802, 0.3086, 0.2686, 0.3135, 0.26904];
const SMP_TOL: f64 = 0.005;
const BP_TOL: f64 = 0.01;

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ring(q: usize) -> RingContext {
    RingContext::new(q).unwrap()
}

fn within_budget(start: Instant, budget: Duration, what: &str) -> std::result::Result<(), String> {
    let t = start.elapsed();
    if t > budget {
        Err(format!("{what} took {t:.1?}, budget {budget:?}"))
    } else {
        Ok(())
    }
}

fn shannon_limits() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (q, reference) in [(5, 0.2684), (7, 0.3560), (8, 0.3950)] {
        let d = shannon_limit(&ring(q), 0.5).map_err(|e| e.to_string())?;
        ok &= (d - reference).abs() <= 0.0005;
        parts.push(format!("q={q}: {d:.4} (ref {reference})"));
    }
    within_budget(start, Duration::from_secs(1), "shannon limits")?;
    ensure(ok, parts.join(", "))
}

fn smp_thresholds(out: &mut Vec<f64>) -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, &(q, v, c)) in ROWS.iter().enumerate() {
        let t = smp_threshold(&ring(q), v, c, 1000, 1e-5).map_err(|e| e.to_string())?;
        ok &= (t.delta - SMP_REFERENCE[i]).abs() <= SMP_TOL;
        out.push(t.delta);
        parts.push(format!("q={q} ({v},{c}) {:.4}/{}", t.delta, SMP_REFERENCE[i]));
    }
    within_budget(start, Duration::from_secs(300), "SMP thresholds")?;
    ensure(ok, format!("{} [{:.0?}]", parts.join(", "), start.elapsed()))
}

fn bp_thresholds(out: &mut Vec<f64>) -> Check {
    let start = Instant::now();
    let cfg = BpDeConfig::default();
    assert_eq!(cfg.population, 100_000);
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, &(q, v, c)) in ROWS.iter().enumerate() {
        let t = bp_de_threshold(&ring(q), v, c, &cfg).map_err(|e| e.to_string())?;
        ok &= (t.delta - BP_REFERENCE[i]).abs() <= BP_TOL;
        out.push(t.delta);
        parts.push(format!("q={q} ({v},{c}) {:.4}/{}", t.delta, BP_REFERENCE[i]));
    }
    within_budget(start, Duration::from_secs(3600), "BP thresholds")?;
    ensure(ok, format!("{} [{:.0?}]", parts.join(", "), start.elapsed()))
}

fn threshold_ordering(smp: &[f64], bp: &[f64]) -> Check {
    if smp.len() != ROWS.len() || bp.len() != ROWS.len() {
        return Err("threshold values unavailable (criteria 2 and 3 must run)".into());
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &(q, v, c)) in ROWS.iter().enumerate() {
        let sh = shannon_limit(&ring(q), 1.0 - v as f64 / c as f64).map_err(|e| e.to_string())?;
        ok &= smp[i] < bp[i] && bp[i] < sh;
        parts.push(format!("q={q} ({v},{c}) {:.4} < {:.4} < {:.4}", smp[i], bp[i], sh));
    }
    ensure(ok, parts.join(", "))
}

fn conditional_limit() -> Check {
    let start = Instant::now();
    let ctx = ring(8);
    let (n, delta) = (256, 0.191);
    let counter = SphereCounter::new(&ctx, n);
    let t = target_weight(n, delta);
    let mut rng = seeded(2024);
    let mut hist = vec![0.0; 8];
    for _ in 0..1000 {
        let e = counter.sample(t, &mut rng).map_err(|e| e.to_string())?;
        if ctx.lee_weight_vec(&e).unwrap() != t {
            return Err("sample of the wrong weight".into());
        }
        for a in e {
            hist[a] += 1.0;
        }
    }
    let emp = Pmf::from_weights(hist).unwrap();
    let phi = marginal_phi_star(&ctx, delta).unwrap();
    let tv = tv_distance(emp.as_slice(), phi.as_slice()).unwrap();
    within_budget(start, Duration::from_secs(10), "sampling")?;
    ensure(tv < 0.01, format!("TV = {tv:.5} (< 0.01), t = {t} [{:.1?}]", start.elapsed()))
}

fn enumerate(q: usize, n: usize) -> impl Iterator<Item = Vec<Symbol>> {
    (0..q.pow(n as u32)).map(move |mut k| {
        (0..n)
            .map(|_| {
                let a = k % q;
                k /= q;
                a
            })
            .collect()
    })
}

fn sampler_exactness() -> Check {
    for q in 2..=5 {
        let ctx = ring(q);
        for n in 1..=4 {
            let mut counts = vec![0u64; n * ctx.r() + 1];
            for x in enumerate(q, n) {
                counts[ctx.lee_weight_vec(&x).unwrap()] += 1;
            }
            let counter = SphereCounter::new(&ctx, n);
            for (t, &k) in counts.iter().enumerate() {
                let dp = counter.sphere_size(t).unwrap().to_u64().unwrap();
                let rolling = sphere_size_exact(&ctx, n, t).to_u64().unwrap();
                if dp != k || rolling != k {
                    return Err(format!("q={q} n={n} t={t}: enumeration {k}, table {dp}, rolling {rolling}"));
                }
            }
        }
    }

    let ctx = ring(5);
    let counter = SphereCounter::new(&ctx, 3);
    let sphere: Vec<Vec<Symbol>> = enumerate(5, 3).filter(|x| ctx.lee_weight_vec(x).unwrap() == 3).collect();
    let draws = 100_000;
    let mut hits = vec![0u64; sphere.len()];
    let mut rng = seeded(6);
    for _ in 0..draws {
        let e = counter.sample(3, &mut rng).unwrap();
        let idx = sphere.iter().position(|s| *s == e).ok_or("sample outside the sphere")?;
        hits[idx] += 1;
    }
    let expect = draws as f64 / sphere.len() as f64;
    let chi2: f64 = hits.iter().map(|&h| (h as f64 - expect).powi(2) / expect).sum();
    let dof = (sphere.len() - 1) as f64;
    let critical = ChiSquared::new(dof).unwrap().inverse_cdf(1.0 - 1e-3);
    ensure(
        chi2 < critical,
        format!("counts match enumeration for q<=5, n<=4; chi2 = {chi2:.1} < {critical:.1} ({} cells)", sphere.len()),
    )
}

/// A random cycle-free code: each new check joins one existing variable
/// to one or two fresh ones.
fn random_tree_code(ctx: &RingContext, n: usize, rng: &mut impl Rng) -> ParityCheckCode {
    let mut rows = Vec::new();
    let mut placed = 1;
    let unit = |rng: &mut dyn rand::RngCore| ctx.units()[rng.gen_range(0..ctx.units().len())];
    while placed < n {
        let anchor = rng.gen_range(0..placed);
        let fresh = rng.gen_range(1..=2usize).min(n - placed);
        let mut row = vec![(anchor, unit(rng))];
        for k in 0..fresh {
            row.push((placed + k, unit(rng)));
        }
        placed += fresh;
        rows.push(row);
    }
    ParityCheckCode::from_rows(ctx, n, rows).unwrap()
}

fn decoder_oracle() -> Check {
    let mut rng = seeded(77);
    let mut worst: f64 = 0.0;
    let mut trees = 0;
    for q in 2..=5 {
        let ctx = ring(q);
        for n in [3, 5, 6, 8] {
            for _ in 0..3 {
                let code = random_tree_code(&ctx, n, &mut rng);
                let spec = LeeChannelSpec::from_delta(&ctx, rng.gen_range(0.1..0.4)).unwrap();
                let y: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                let mut exact = vec![0.0; n * q];
                for x in enumerate(q, n).filter(|x| code.is_codeword(x)) {
                    let p: f64 = x.iter().zip(&y).map(|(&a, &b)| spec.transition(b, a)).product();
                    for (v, &a) in x.iter().enumerate() {
                        exact[v * q + a] += p;
                    }
                }
                for row in exact.chunks_mut(q) {
                    let s: f64 = row.iter().sum();
                    row.iter_mut().for_each(|p| *p /= s);
                }
                let mut bp = BpDecoder::new(&code).with_early_stop(false);
                bp.decode_received(&y, &spec, 2 * n, &mut rng).unwrap();
                for (a, b) in bp.app().iter().zip(&exact) {
                    worst = worst.max((a - b).abs());
                }
                trees += 1;
            }
        }
    }
    if worst >= 1e-9 {
        return Err(format!("max |BP - MAP| = {worst:.3e} over {trees} trees"));
    }

    for k in 0..100u64 {
        let q = [4, 5, 6, 7, 8][k as usize % 5];
        let ctx = ring(q);
        let (v, c) = if k % 2 == 0 { (3, 6) } else { (2, 4) };
        let mut crng = stream_rng(k, 1, 0);
        let code = sample_regular_ensemble(&ctx, 48, v, c, &mut crng).unwrap();
        let x = CodewordSampler::new(&code).sample(&mut crng);
        let clean = LeeChannelSpec::noiseless(&ctx);
        let bp = BpDecoder::new(&code).decode_received(&x, &clean, 20, &mut crng).unwrap();
        let schedule = XiSchedule::constant(0.05, 20).unwrap();
        let smp = SmpDecoder::new(&code).decode(&x, &clean, &schedule, 20, &mut crng).unwrap();
        for (name, r) in [("BP", bp), ("SMP", smp)] {
            if r.estimate != x || r.iterations != 1 || !r.converged {
                return Err(format!("{name} failed to fix a noiseless codeword (code {k}, q={q})"));
            }
        }
    }
    Ok(format!(
        "max |BP - MAP| = {worst:.2e} over {trees} trees; 100 codes fixed in 1 iteration by both decoders"
    ))
}

fn qsc_gap() -> Check {
    let mut parts = Vec::new();
    for q in [5, 7] {
        let spec = LeeChannelSpec::from_delta(&ring(q), 0.191).unwrap();
        let gap = qsc_approximation_gap(&spec, 3, 6, 50).map_err(|e| e.to_string())?;
        let max = gap.iter().cloned().fold(0.0, f64::max);
        if max > 1e-15 {
            return Err(format!("q={q}: TV reaches {max:e}"));
        }
        parts.push(format!("q={q}: max TV {max:.0e}"));
    }
    let spec = LeeChannelSpec::from_delta(&ring(8), 0.191).unwrap();
    let gap = qsc_approximation_gap(&spec, 3, 6, 50).map_err(|e| e.to_string())?;
    // index from which the sequence never increases
    let mut from = gap.len() - 1;
    while from > 0 && gap[from] <= gap[from - 1] {
        from -= 1;
    }
    let (first, last) = (gap[0], gap[gap.len() - 1]);
    parts.push(format!(
        "q=8: TV {first:.3e} -> {last:.3e}, non-increasing from iteration {}",
        from + 1
    ));
    ensure(from + 1 < gap.len() && last < first, parts.join(", "))
}

fn rcu_behavior() -> Check {
    let ctx = ring(7);
    let (n, rate) = (64, 0.5);
    let sh = shannon_limit(&ctx, rate).unwrap();
    for k in 1..60 {
        let delta = k as f64 * 0.01;
        let b = rcu_constant_weight(&ctx, n, rate, delta).unwrap();
        let at_one = (b - 1.0).abs() < 1e-9;
        // skip the grid point straddling the crossing itself
        if (delta - sh).abs() > 1e-6 && at_one != (delta >= sh) {
            return Err(format!("rcu_cw({delta}) = {b} but the crossing is at {sh:.6}"));
        }
    }

    let spec = LeeChannelSpec::from_delta(&ctx, 0.2).unwrap();
    let exact = rcu_memoryless(&ctx, n, rate, &spec).unwrap();
    let sampler = spec.noise_sampler();
    let mut rng = seeded(99);
    let samples = 1_000_000;
    let mut acc = 0.0;
    for _ in 0..samples {
        let w: usize = (0..n).map(|_| ctx.weight_table()[sampler.sample(&mut rng)]).sum();
        acc += rcu_constant_weight(&ctx, n, rate, w as f64 / n as f64).unwrap();
    }
    let mc = acc / samples as f64;
    let rel = (mc / exact - 1.0).abs();
    ensure(
        rel < 0.01,
        format!("indicator matches crossing {sh:.4}; rcu_ml = {exact:.5e}, MC = {mc:.5e}, rel err {rel:.4}"),
    )
}

fn sim_config(decoder: DecoderConfig, deltas: Vec<f64>, code: CodeSource, max_frames: u64, max_errors: u64) -> SimConfig {
    SimConfig {
        code,
        channel: ChannelKind::Memoryless,
        deltas,
        decoder,
        max_frames,
        max_errors,
        seed: 10,
    }
}

fn crossing_half(records: &[SimRecord]) -> Option<f64> {
    records.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.bler <= 0.5 && b.bler >= 0.5 && b.bler > a.bler {
            Some(a.delta + (0.5 - a.bler) * (b.delta - a.delta) / (b.bler - a.bler))
        } else {
            None
        }
    })
}

fn finite_length() -> Check {
    let start = Instant::now();
    // spans both waterfalls so the BP/SMP comparison is informative
    let deltas = vec![0.10, 0.14, 0.18, 0.22, 0.26, 0.30];
    let code = CodeSource::Peg {
        q: 7,
        n: 256,
        dv: 3,
        dc: 6,
        seed: 1,
    };
    let bp_cfg = sim_config(DecoderConfig::Bp { max_iter: 100 }, deltas.clone(), code.clone(), 20_000, 100);
    let smp_cfg = sim_config(
        DecoderConfig::Smp {
            max_iter: 100,
            xi: Some(XiSource::De { grid: None }),
        },
        deltas.clone(),
        code,
        20_000,
        100,
    );
    let bp = Simulation::new(bp_cfg).and_then(|s| s.run()).map_err(|e| e.to_string())?;
    let smp = Simulation::new(smp_cfg).and_then(|s| s.run()).map_err(|e| e.to_string())?;
    let monotone = |r: &[SimRecord]| r.windows(2).all(|w| w[0].bler <= w[1].bler);
    let dominated = bp.iter().zip(&smp).all(|(b, s)| b.bler <= s.bler);
    let cross = crossing_half(&bp);
    let reference = BP_REFERENCE[2];
    let window = (reference - 0.08, reference + 0.02);
    let in_window = cross.is_some_and(|d| d >= window.0 && d <= window.1);
    let table: Vec<String> = bp
        .iter()
        .zip(&smp)
        .map(|(b, s)| format!("{:.2}: {:.3}/{:.3}", b.delta, b.bler, s.bler))
        .collect();
    within_budget(start, Duration::from_secs(7200), "simulation")?;
    ensure(
        monotone(&bp) && monotone(&smp) && dominated && in_window,
        format!(
            "BLER bp/smp [{}]; monotone bp={} smp={}, bp<=smp {}, crossing {:?} in [{:.4}, {:.4}] [{:.0?}]",
            table.join(", "),
            monotone(&bp),
            monotone(&smp),
            dominated,
            cross.map(|d| (d * 1e4).round() / 1e4),
            window.0,
            window.1,
            start.elapsed()
        ),
    )
}

fn reproducibility() -> Check {
    let pools: Vec<rayon::ThreadPool> = [1, 3]
        .iter()
        .map(|&k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap())
        .collect();
    let code = CodeSource::Ensemble {
        q: 8,
        n: 96,
        dv: 3,
        dc: 6,
        seed: 4,
    };
    let mut configs = vec![
        sim_config(DecoderConfig::Bp { max_iter: 30 }, vec![0.25, 0.3], code.clone(), 400, 40),
        sim_config(
            DecoderConfig::Smp {
                max_iter: 30,
                xi: Some(XiSource::De { grid: None }),
            },
            vec![0.1, 0.15],
            code,
            400,
            40,
        ),
    ];
    configs[1].channel = ChannelKind::ConstantWeight;
    for cfg in &configs {
        let runs: Vec<Vec<SimRecord>> = pools
            .iter()
            .map(|p| p.install(|| Simulation::new(cfg.clone()).unwrap().run().unwrap()))
            .collect();
        if runs[0] != runs[1] {
            return Err(format!("{} simulation differs across thread counts", cfg.decoder.name()));
        }
    }

    let spec = LeeChannelSpec::from_delta(&ring(7), 0.3).unwrap();
    let de_cfg = BpDeConfig {
        population: 8192,
        max_iter: 20,
        ..BpDeConfig::default()
    };
    let de: Vec<_> = pools.iter().map(|p| p.install(|| bp_de_run(&spec, 3, 6, &de_cfg).unwrap())).collect();
    if de[0] != de[1] {
        return Err("BP density evolution differs across thread counts".into());
    }
    let smp_a = smp_de_run(&spec, 3, 6, 100).unwrap();
    let smp_b = smp_de_run(&spec, 3, 6, 100).unwrap();
    ensure(
        smp_a == smp_b,
        "simulate (BP, SMP, both channels) and DE identical with 1 and 3 worker threads".into(),
    )
}

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |id: u32| wanted.is_empty() || wanted.contains(&id);
    let mut smp = Vec::new();
    let mut bp = Vec::new();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Check| {
        if !run(id) {
            return;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let (tag, msg) = match outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failures += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {id:>2} {tag} {name} ({:.1?}): {msg}", start.elapsed());
    };
    report(1, "shannon limits", &mut shannon_limits);
    report(2, "SMP thresholds", &mut || smp_thresholds(&mut smp));
    report(3, "BP thresholds", &mut || bp_thresholds(&mut bp));
    report(4, "threshold ordering", &mut || threshold_ordering(&smp, &bp));
    report(5, "conditional limit", &mut conditional_limit);
    report(6, "sampler exactness", &mut sampler_exactness);
    report(7, "decoder oracle", &mut decoder_oracle);
    report(8, "qSC approximation gap", &mut qsc_gap);
    report(9, "RCU behavior", &mut rcu_behavior);
    report(10, "finite-length behavior", &mut finite_length);
    report(11, "reproducibility", &mut reproducibility);
    if failures > 0 {
        println!("{failures} criteria failed");
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    } else {
        println!("all criteria passed");
    }
}
