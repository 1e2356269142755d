//! Arithmetic in the integer ring Z_q and the Lee metric.
//!
//! Ring elements are canonical representatives `0..q`. The Lee weight of
//! `a` is `min(a, q - a)`; the weight of a vector is the sum over its
//! coordinates and the Lee distance is the weight of the difference.

use crate::error::{Error, Result};

/// A ring element, always reduced to `0..q`.
pub type Symbol = usize;

/// The ring Z_q together with its unit group and precomputed tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingContext {
    q: usize,
    r: usize,
    units: Vec<Symbol>,
    inverses: Vec<Option<Symbol>>,
    weights: Vec<usize>,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

impl RingContext {
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::domain(format!("ring modulus must be >= 2, got {q}")));
        }
        if q > 1 << 16 {
            return Err(Error::domain(format!("ring modulus {q} is too large")));
        }
        let mut units = Vec::new();
        let mut inverses = vec![None; q];
        for a in 1..q {
            let (g, x, _) = ext_gcd(a as i64, q as i64);
            if g == 1 {
                units.push(a);
                inverses[a] = Some(x.rem_euclid(q as i64) as usize);
            }
        }
        let weights = (0..q).map(|a| a.min(q - a)).collect();
        Ok(RingContext {
            q,
            r: q / 2,
            units,
            inverses,
            weights,
        })
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Largest Lee weight of a single symbol, `floor(q/2)`.
    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    /// All units of Z_q in increasing order.
    pub fn units(&self) -> &[Symbol] {
        &self.units
    }

    pub fn is_unit(&self, a: Symbol) -> bool {
        a < self.q && self.inverses[a].is_some()
    }

    /// Multiplicative inverse; `None` for non-units.
    #[inline]
    pub fn inverse(&self, a: Symbol) -> Option<Symbol> {
        self.inverses.get(a).copied().flatten()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        (a + self.q - b) % self.q
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        (self.q - a) % self.q
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        (a * b) % self.q
    }

    /// Reduce an arbitrary integer into `0..q`.
    pub fn reduce(&self, a: i64) -> Symbol {
        a.rem_euclid(self.q as i64) as usize
    }

    /// Lee weights of every element, indexed by the element.
    #[inline]
    pub fn weight_table(&self) -> &[usize] {
        &self.weights
    }

    /// Number of ring elements with Lee weight `w`.
    pub fn weight_multiplicity(&self, w: usize) -> usize {
        if w == 0 {
            1
        } else if w > self.r {
            0
        } else if 2 * w == self.q {
            1
        } else {
            2
        }
    }

    fn check(&self, a: Symbol) -> Result<()> {
        if a >= self.q {
            Err(Error::domain(format!("element {a} is not in Z_{}", self.q)))
        } else {
            Ok(())
        }
    }

    pub fn lee_weight(&self, a: Symbol) -> Result<usize> {
        self.check(a)?;
        Ok(self.weights[a])
    }

    pub fn lee_weight_vec(&self, x: &[Symbol]) -> Result<usize> {
        x.iter().try_fold(0, |acc, &a| Ok(acc + self.lee_weight(a)?))
    }

    pub fn lee_distance(&self, x: &[Symbol], y: &[Symbol]) -> Result<usize> {
        if x.len() != y.len() {
            return Err(Error::domain(format!(
                "length mismatch: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        x.iter().zip(y).try_fold(0, |acc, (&a, &b)| {
            self.check(a)?;
            self.check(b)?;
            Ok(acc + self.weights[self.sub(a, b)])
        })
    }

    pub fn composition_of(&self, x: &[Symbol]) -> Result<Composition> {
        if x.is_empty() {
            return Err(Error::domain("composition of an empty vector"));
        }
        let mut counts = vec![0usize; self.q];
        for &a in x {
            self.check(a)?;
            counts[a] += 1;
        }
        Ok(Composition::from_counts(&counts))
    }
}

/// Empirical distribution of a vector over Z_q.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    freqs: Vec<f64>,
    n: usize,
}

impl Composition {
    /// Builds a composition from per-symbol counts; `n` is their sum.
    pub fn from_counts(counts: &[usize]) -> Self {
        let n: usize = counts.iter().sum();
        let freqs = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Composition { freqs, n }
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn entropy(&self) -> f64 {
        entropy_nats(&self.freqs).expect("composition is normalized")
    }
}

/// Shannon entropy in nats, skipping zero entries.
pub fn entropy_nats(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in p {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("negative or NaN probability {x}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("probabilities sum to {sum}, not 1")));
    }
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
    Ok(h.max(0.0))
}
