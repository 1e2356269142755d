//! Exact Lee-sphere counting and the constant-weight Lee channel.
//!
//! `N(ℓ, t)` is the number of length-ℓ vectors over Z_q with Lee weight
//! exactly `t`. It satisfies `N(0,0) = 1` and
//! `N(ℓ, t) = Σ_a N(ℓ-1, t - w_L(a))`. Counts are kept as arbitrary
//! precision integers so that sampling is exactly uniform on the sphere.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::{RingContext, Symbol};

/// Table of sphere sizes `N(ℓ, t)` for `ℓ ≤ n`.
#[derive(Debug, Clone)]
pub struct SphereCounter {
    ctx: RingContext,
    n: usize,
    table: Vec<Vec<BigUint>>,
}

impl SphereCounter {
    pub fn new(ctx: &RingContext, n: usize) -> Self {
        let r = ctx.r();
        let mut table: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        table.push(vec![BigUint::from(1u32)]);
        for len in 1..=n {
            let prev = &table[len - 1];
            let row = (0..=len * r)
                .map(|t| {
                    let mut acc = BigUint::zero();
                    for w in 0..=r.min(t) {
                        if let Some(c) = prev.get(t - w) {
                            let m = ctx.weight_multiplicity(w);
                            if m == 1 {
                                acc += c;
                            } else {
                                acc += c * m;
                            }
                        }
                    }
                    acc
                })
                .collect();
            table.push(row);
        }
        SphereCounter {
            ctx: ctx.clone(),
            n,
            table,
        }
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest attainable weight, `n·r`.
    pub fn max_weight(&self) -> usize {
        self.n * self.ctx.r()
    }

    /// `N(len, t)` for any `len ≤ n`; zero outside the support.
    pub fn count(&self, len: usize, t: usize) -> BigUint {
        self.table
            .get(len)
            .and_then(|row| row.get(t))
            .cloned()
            .unwrap_or_default()
    }

    fn count_ref(&self, len: usize, t: usize) -> Option<&BigUint> {
        self.table.get(len).and_then(|row| row.get(t))
    }

    /// `|S^n_t|`, the number of length-n vectors of Lee weight `t`.
    pub fn sphere_size(&self, t: usize) -> Result<BigUint> {
        if t > self.max_weight() {
            return Err(Error::domain(format!(
                "weight {t} exceeds n·r = {}",
                self.max_weight()
            )));
        }
        Ok(self.table[self.n][t].clone())
    }

    /// Uniform draw from the sphere of weight `t`.
    ///
    /// Coordinates are chosen left to right: with `ℓ` positions left and
    /// remaining weight `t'`, value `a` is picked with probability
    /// `N(ℓ-1, t' - w_L(a)) / N(ℓ, t')`.
    pub fn sample<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Result<Vec<Symbol>> {
        let total = self.count_ref(self.n, t).filter(|c| !c.is_zero());
        if total.is_none() {
            return Err(Error::domain(format!(
                "no vector of length {} has Lee weight {t}",
                self.n
            )));
        }
        let w = self.ctx.weight_table();
        let mut rem = t;
        let mut out = Vec::with_capacity(self.n);
        for pos in 0..self.n {
            let left = self.n - pos;
            let total = &self.table[left][rem];
            let mut u = rng.gen_biguint_below(total);
            let mut chosen = None;
            for (a, &wa) in w.iter().enumerate() {
                if wa > rem {
                    continue;
                }
                if let Some(c) = self.count_ref(left - 1, rem - wa) {
                    if u < *c {
                        chosen = Some(a);
                        break;
                    }
                    u -= c;
                }
            }
            let a = chosen.expect("conditional counts sum to the parent count");
            rem -= w[a];
            out.push(a);
        }
        debug_assert_eq!(rem, 0);
        Ok(out)
    }

    /// Probability that [`sample`](Self::sample) returns `e`, as an exact
    /// fraction `(numerator, denominator)` of the product of conditionals.
    pub fn draw_probability(&self, e: &[Symbol]) -> Result<(BigUint, BigUint)> {
        if e.len() != self.n {
            return Err(Error::domain("vector length differs from the counter length"));
        }
        let t = self.ctx.lee_weight_vec(e)?;
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        let mut rem = t;
        for (pos, &a) in e.iter().enumerate() {
            let left = self.n - pos;
            let wa = self.ctx.weight_table()[a];
            num *= self.count(left - 1, rem - wa);
            den *= self.count(left, rem);
            rem -= wa;
        }
        Ok((num, den))
    }
}

/// `N(n, t)` without keeping the full table.
pub fn sphere_size_exact(ctx: &RingContext, n: usize, t: usize) -> BigUint {
    let r = ctx.r();
    let mut row = vec![BigUint::from(1u32)];
    for len in 1..=n {
        let hi = (len * r).min(t);
        let next = (0..=hi)
            .map(|tt| {
                let mut acc = BigUint::zero();
                for w in 0..=r.min(tt) {
                    if let Some(c) = row.get(tt - w) {
                        acc += c * ctx.weight_multiplicity(w);
                    }
                }
                acc
            })
            .collect();
        row = next;
    }
    row.get(t).cloned().unwrap_or_default()
}

/// Natural log of a big integer (`-inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().expect("fits after shift");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Constant-weight Lee channel: `y = x + e` with `e` uniform on the sphere
/// of weight `t`.
pub fn transmit_constant_weight<R: Rng + ?Sized>(
    counter: &SphereCounter,
    x: &[Symbol],
    t: usize,
    rng: &mut R,
) -> Result<Vec<Symbol>> {
    if x.len() != counter.n() {
        return Err(Error::domain("input length differs from the counter length"));
    }
    let e = counter.sample(t, rng)?;
    let ctx = counter.ctx();
    Ok(x.iter().zip(e).map(|(&a, b)| ctx.add(a, b)).collect())
}

/// Integer target weight for a normalized weight δ, `round(n·δ)`.
pub fn target_weight(n: usize, delta: f64) -> usize {
    (n as f64 * delta).round() as usize
}
