use super::{DeReport, DeState, SMP_TARGET};
use crate::bounds::delta_q;
use crate::channel::LeeChannelSpec;
use crate::decoder::{extrinsic_reliability, XiSchedule};
use crate::error::{Error, Result};
use crate::pmf::{circular_convolve, negate, unit_average, Pmf};
use crate::ring::RingContext;

/// Smallest ξ handed to the decoder once DE has (numerically) converged.
pub const XI_FLOOR: f64 = 1e-12;

/// All ways to place `k` indistinguishable balls in `q` bins, with their
/// multinomial coefficients.
fn count_vectors(q: usize, k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(q: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for take in 0..=left {
            cur.push(take);
            rec(q, left - take, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    rec(q, k, &mut Vec::with_capacity(q), &mut all);
    let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    all.into_iter()
        .map(|f| {
            let coef = fact(k) / f.iter().map(|&x| fact(x)).product::<f64>();
            (f, coef)
        })
        .collect()
}

struct SmpRecursion<'a> {
    ctx: &'a RingContext,
    spec: &'a LeeChannelSpec,
    c: usize,
    counts: Vec<(Vec<usize>, f64)>,
}

impl<'a> SmpRecursion<'a> {
    fn new(spec: &'a LeeChannelSpec, v: usize, c: usize) -> Result<Self> {
        if v < 2 || c < 2 {
            return Err(Error::domain(format!("degrees ({v}, {c}) must both be at least 2")));
        }
        let ctx = spec.ctx();
        Ok(SmpRecursion {
            ctx,
            spec,

            c,
            counts: count_vectors(ctx.q(), v - 1),
        })
    }

    /// Law of a check-to-variable message: unit-scaled inputs convolved
    /// `c-1` times, negated, and unit-scaled once more.
    fn check(&self, p: &[f64]) -> Vec<f64> {
        let scaled = unit_average(self.ctx, p);
        let mut acc = scaled.clone();
        let mut tmp = vec![0.0; p.len()];
        for _ in 1..self.c - 1 {
            circular_convolve(&acc, &scaled, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        let mut w = unit_average(self.ctx, &negate(&acc));
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }

    /// Law of a variable-to-check message given the incoming law `w` and
    /// the reliability `ξ`. Enumerates every channel output and every
    /// count vector of the `v-1` extrinsic messages; ties split equally.
    fn variable(&self, w: &[f64], xi: f64) -> Vec<f64> {
        let q = self.ctx.q();
        let d = extrinsic_reliability(q, xi.max(f64::MIN_POSITIVE));
        let beta = self.spec.beta();
        let weights = self.ctx.weight_table();
        let noise = self.spec.noise().as_slice();
        let mut next = vec![0.0; q];
        let mut scores = vec![0.0; q];
        let mut ties = Vec::with_capacity(q);
        for (f, coef) in &self.counts {
            let mut pf = *coef;
            for (b, &k) in f.iter().enumerate() {
                if k > 0 {
                    pf *= w[b].powi(k as i32);
                }
            }
            if pf == 0.0 {
                continue;
            }
            for (y, &py) in noise.iter().enumerate() {
                if py == 0.0 {
                    continue;
                }
                for b in 0..q {
                    let wl = weights[self.ctx.sub(y, b)];
                    let l = if wl == 0 { 0.0 } else { -beta * wl as f64 };
                    scores[b] = l + d * f[b] as f64;
                }
                crate::decoder::maximizers(&scores, &mut ties);
                let share = pf * py / ties.len() as f64;
                for &b in &ties {
                    next[b] += share;
                }
            }
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        next
    }

    /// The recursion treats variable-to-check messages as q-SC observations
    /// with the same error probability, so the check output is again a q-SC.
    /// For prime q this is exact. `w` keeps the unprojected check law for
    /// measuring the approximation.
    fn step(&self, p: &[f64], iteration: usize) -> DeState {
        let q = self.ctx.q();
        let w = self.check(p);
        let projected = Pmf::qsc(q, (1.0 - p[0]).clamp(0.0, 1.0));
        let model = self.check(projected.as_slice());
        let xi: f64 = model[1..].iter().sum();
        let next = self.variable(&model, xi);
        DeState {
            iteration,
            p: Pmf::new(next).expect("normalized"),
            w: Pmf::new(w).expect("normalized"),
            xi,
        }
    }
}

/// One SMP-DE iteration from the message law `p` (iteration index is
/// `previous.iteration + 1`, or 1 when starting from the channel law).
pub fn smp_de_step(spec: &LeeChannelSpec, p: &Pmf, iteration: usize, v: usize, c: usize) -> Result<DeState> {
    Ok(SmpRecursion::new(spec, v, c)?.step(p.as_slice(), iteration))
}

/// Runs SMP-DE for up to `max_iter` iterations, stopping once the message
/// error probability drops below 1e-9.
pub fn smp_de_run(spec: &LeeChannelSpec, v: usize, c: usize, max_iter: usize) -> Result<DeReport> {
    run(spec, v, c, max_iter, true)
}

/// Runs SMP-DE for exactly `max_iter` iterations.
pub fn smp_de_trace(spec: &LeeChannelSpec, v: usize, c: usize, max_iter: usize) -> Result<DeReport> {
    run(spec, v, c, max_iter, false)
}

fn run(spec: &LeeChannelSpec, v: usize, c: usize, max_iter: usize, stop_early: bool) -> Result<DeReport> {
    let rec = SmpRecursion::new(spec, v, c)?;
    let initial = spec.noise().clone();
    let mut trajectory: Vec<DeState> = Vec::with_capacity(max_iter);
    let mut converged = initial.error_mass() <= SMP_TARGET;
    for it in 1..=max_iter {
        if converged && stop_early {
            break;
        }
        let p = trajectory.last().map(|s| &s.p).unwrap_or(&initial);
        let state = rec.step(p.as_slice(), it);
        converged = state.error_probability() <= SMP_TARGET;
        trajectory.push(state);
    }
    Ok(DeReport {
        delta: spec.delta(),
        initial,
        trajectory,
        converged,
    })
}

/// ξ schedule of length `len` from a DE report; entries past the end of the
/// trajectory repeat its last value, and values are floored at
/// [`XI_FLOOR`].
pub fn schedule_from_report(report: &DeReport, len: usize) -> XiSchedule {
    let mut xi: Vec<f64> = report.xi_values().into_iter().map(|x| x.clamp(XI_FLOOR, 1.0 - 1e-12)).collect();
    let last = xi.last().copied().unwrap_or(XI_FLOOR);
    if report.converged {
        xi.resize(len.max(xi.len()), XI_FLOOR);
    } else {
        xi.resize(len.max(xi.len()), last);
    }
    xi.truncate(len.max(1));
    XiSchedule::new(xi).expect("clamped into (0, 1)")
}

/// The ξ schedule the SMP decoder should use at channel parameter δ.
pub fn smp_xi_schedule(ctx: &RingContext, v: usize, c: usize, delta: f64, max_iter: usize) -> Result<XiSchedule> {
    let spec = LeeChannelSpec::from_delta(ctx, delta)?;
    let report = smp_de_run(&spec, v, c, max_iter)?;
    Ok(schedule_from_report(&report, max_iter))
}

/// Result of an SMP threshold search.
#[derive(Debug, Clone)]
pub struct SmpThreshold {
    pub delta: f64,
    /// DE run at the largest δ found to converge.
    pub report: DeReport,
    pub schedule: XiSchedule,
}

/// Bisection on δ ∈ (0, δ_q) for the largest δ at which SMP-DE converges
/// within `max_iter` iterations. The returned δ is the converging end of
/// the final bracket, of width at most `tol`.
pub fn smp_threshold(ctx: &RingContext, v: usize, c: usize, max_iter: usize, tol: f64) -> Result<SmpThreshold> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let converges = |delta: f64| -> Result<DeReport> {
        let spec = LeeChannelSpec::from_delta(ctx, delta)?;
        smp_de_run(&spec, v, c, max_iter)
    };
    let mut lo = 0.0;
    let mut hi = delta_q(ctx);
    let mut best: Option<DeReport> = None;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let report = converges(mid)?;
        if report.converged {
            lo = mid;
            best = Some(report);
        } else {
            hi = mid;
        }
    }
    let report = match best {
        Some(r) => r,
        None => converges(lo.max(tol * 0.5))?,
    };
    let schedule = schedule_from_report(&report, max_iter);
    Ok(SmpThreshold {
        delta: lo,
        report,
        schedule,
    })
}

/// Per-iteration TV distance between the exact check-to-variable message
/// law (computed from the tracked variable-to-check law) and the q-SC with
/// the same error probability.
pub fn qsc_approximation_gap(spec: &LeeChannelSpec, v: usize, c: usize, max_iter: usize) -> Result<Vec<f64>> {
    let report = run(spec, v, c, max_iter, false)?;
    Ok(report.trajectory.iter().map(DeState::qsc_gap).collect())
}
