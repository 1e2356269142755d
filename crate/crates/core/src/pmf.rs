//! Probability mass functions over Z_q and the handful of operations the
//! decoders and density evolution share: circular convolution, relabeling
//! by a ring unit, and total variation distance.

use crate::error::{Error, Result};
use crate::ring::{RingContext, Symbol};

/// A length-q probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Wraps `p` after checking that it is a probability vector (1e-9).
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("empty pmf"));
        }
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::domain("pmf entries must be finite and nonnegative"));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("pmf sums to {s}")));
        }
        Ok(Pmf(p))
    }

    /// Normalizes nonnegative weights into a pmf.
    pub fn from_weights(mut w: Vec<f64>) -> Result<Self> {
        let s: f64 = w.iter().sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain("weights are not normalizable"));
        }
        w.iter_mut().for_each(|x| *x /= s);
        Ok(Pmf(w))
    }

    pub fn uniform(q: usize) -> Self {
        Pmf(vec![1.0 / q as f64; q])
    }

    pub fn point_mass(q: usize, at: Symbol) -> Self {
        let mut p = vec![0.0; q];
        p[at] = 1.0;
        Pmf(p)
    }

    /// The q-ary symmetric channel output law for input 0: mass `1 - xi`
    /// at zero and `xi / (q - 1)` everywhere else.
    pub fn qsc(q: usize, xi: f64) -> Self {
        let mut p = vec![xi / (q - 1) as f64; q];
        p[0] = 1.0 - xi;
        Pmf(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn entropy(&self) -> f64 {
        crate::ring::entropy_nats(&self.0).expect("pmf is normalized")
    }

    /// Mass on the nonzero symbols, computed without cancellation.
    pub fn error_mass(&self) -> f64 {
        self.0[1..].iter().sum()
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Total variation distance, half the L1 distance.
pub fn tv_distance(p: &[f64], s: &[f64]) -> Result<f64> {
    if p.len() != s.len() {
        return Err(Error::domain(format!(
            "alphabet size mismatch: {} vs {}",
            p.len(),
            s.len()
        )));
    }
    Ok(0.5 * p.iter().zip(s).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `out = a ⊛ b` over Z_q. `out` must not alias the inputs.
#[inline]
pub fn circular_convolve(a: &[f64], b: &[f64], out: &mut [f64]) {
    let q = a.len();
    out.iter_mut().for_each(|x| *x = 0.0);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let (head, tail) = b.split_at(q - i);
        // indices i..q of out receive b[0..q-i]; indices 0..i receive b[q-i..q]
        for (o, &bj) in out[i..].iter_mut().zip(head) {
            *o += ai * bj;
        }
        for (o, &bj) in out[..i].iter_mut().zip(tail) {
            *o += ai * bj;
        }
    }
}

/// Law of `u·X` when `X ~ p`, for a unit `u`.
#[inline]
pub fn scale_by_unit(ctx: &RingContext, p: &[f64], u: Symbol, out: &mut [f64]) {
    for (x, &px) in p.iter().enumerate() {
        out[ctx.mul(u, x)] = px;
    }
}

/// Law of `-X` when `X ~ p`.
pub fn negate(p: &[f64]) -> Vec<f64> {
    let q = p.len();
    (0..q).map(|x| p[(q - x) % q]).collect()
}

/// Law of `U·X` with `U` uniform over the units and independent of `X ~ p`.
pub fn unit_average(ctx: &RingContext, p: &[f64]) -> Vec<f64> {
    let units = ctx.units();
    let mut out = vec![0.0; p.len()];
    for &u in units {
        for (x, &px) in p.iter().enumerate() {
            out[ctx.mul(u, x)] += px;
        }
    }
    let k = units.len() as f64;
    out.iter_mut().for_each(|v| *v /= k);
    out
}

/// Rescales `p` in place to sum to one. Returns the pre-normalization sum.
#[inline]
pub fn normalize(p: &mut [f64]) -> f64 {
    let s: f64 = p.iter().sum();
    if s > 0.0 && s.is_finite() {
        let inv = 1.0 / s;
        p.iter_mut().for_each(|x| *x *= inv);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tv_examples() {
        let p = [0.1, 0.2, 0.7];
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.75, 0.25]).unwrap(), 0.25);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn convolution_matches_definition() {
        let a = [0.1, 0.2, 0.3, 0.4, 0.0];
        let b = [0.5, 0.0, 0.25, 0.0, 0.25];
        let mut out = [0.0; 5];
        circular_convolve(&a, &b, &mut out);
        for s in 0..5 {
            let direct: f64 = (0..5).map(|x| a[x] * b[(s + 5 - x) % 5]).sum();
            assert!((out[s] - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![0.5, 0.5]).is_ok());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![1.5, -0.5]).is_err());
        assert!(Pmf::from_weights(vec![0.0, 0.0]).is_err());
        assert_eq!(Pmf::qsc(5, 0.4).as_slice(), &[0.6, 0.1, 0.1, 0.1, 0.1]);
    }

    #[test]
    fn unit_average_is_qsc_for_prime_q() {
        for q in [5usize, 7, 11] {
            let ctx = RingContext::new(q).unwrap();
            let p: Vec<f64> = (0..q).map(|i| (i + 1) as f64).collect();
            let p = Pmf::from_weights(p).unwrap();
            let avg = unit_average(&ctx, p.as_slice());
            for a in 2..q {
                assert!((avg[a] - avg[1]).abs() < 1e-15);
            }
            assert!((avg[0] - p[0]).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn unit_permutation_roundtrip(q in 2usize..=12, raw in proptest::collection::vec(0.0f64..1.0, 12)) {
            let ctx = RingContext::new(q).unwrap();
            let p = &raw[..q];
            for &u in ctx.units() {
                let inv = ctx.inverse(u).unwrap();
                let mut once = vec![0.0; q];
                let mut back = vec![0.0; q];
                scale_by_unit(&ctx, p, u, &mut once);
                scale_by_unit(&ctx, &once, inv, &mut back);
                prop_assert_eq!(&back[..], p);
            }
        }
    }
}
