//! Quasi-random points: a Halton sequence with a seeded random shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    r
}

/// Axis-aligned box with a seeded shifted Halton sequence inside it.
#[derive(Clone, Debug)]
pub struct BoxSampler {
    lo: Vec<f64>,
    hi: Vec<f64>,
    shift: Vec<f64>,
    index: u64,
}

impl BoxSampler {
    pub fn new(seed: u64, lo: Vec<f64>, hi: Vec<f64>) -> BoxSampler {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.len() <= PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..lo.len()).map(|_| rng.gen::<f64>()).collect();
        BoxSampler { lo, hi, shift, index: 1 }
    }

    pub fn cube(seed: u64, dim: usize, half_width: f64) -> BoxSampler {
        BoxSampler::new(seed, vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        (0..self.lo.len())
            .map(|d| {
                let u = (radical_inverse(i, PRIMES[d]) + self.shift[d]).fract();
                self.lo[d] + u * (self.hi[d] - self.lo[d])
            })
            .collect()
    }

    /// `n` points passing `accept`, giving up after `1000 n` draws.
    pub fn take(&mut self, n: usize, accept: impl Fn(&[f64]) -> bool) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(n);
        let mut tries = 0usize;
        while out.len() < n {
            if tries > 1000 * n.max(1) {
                return Err(Error::Invalid(format!("domain filter accepted {} of {} requested points", out.len(), n)));
            }
            tries += 1;
            let p = self.next_point();
            if accept(&p) {
                out.push(p);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_box() {
        let a = BoxSampler::cube(3, 4, 2.0).take(50, |_| true).unwrap();
        let b = BoxSampler::cube(3, 4, 2.0).take(50, |_| true).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|v| v.abs() <= 2.0));
        let c = BoxSampler::cube(4, 4, 2.0).take(50, |_| true).unwrap();
        assert_ne!(a, c);
        let pos = BoxSampler::cube(1, 2, 1.0).take(10, |p| p[0] > 0.0).unwrap();
        assert!(pos.iter().all(|p| p[0] > 0.0));
    }
}
