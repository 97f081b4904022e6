//! Deterministic low-discrepancy sampling.

use crate::math::fract;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut v = 0.0;
    while i > 0 {
        v += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    v
}

fn splitmix64(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Halton sequence in up to eight dimensions with a seeded random shift
/// (Cranley–Patterson rotation).
#[derive(Debug, Clone)]
pub struct Halton<const D: usize> {
    shift: [f64; D],
    index: u64,
}

impl<const D: usize> Halton<D> {
    pub fn new(seed: u64) -> Self {
        assert!(D <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
        let mut state = seed;
        let mut shift = [0.0; D];
        for s in shift.iter_mut() {
            *s = (splitmix64(&mut state) >> 11) as f64 / (1u64 << 53) as f64;
        }
        Halton { shift, index: 1 }
    }

    /// The `i`-th point of the sequence (starting at 1).
    pub fn point(&self, i: u64) -> [f64; D] {
        let mut out = [0.0; D];
        for (d, o) in out.iter_mut().enumerate() {
            *o = fract(radical_inverse(i, PRIMES[d]) + self.shift[d]);
        }
        out
    }
}

impl<const D: usize> Iterator for Halton<D> {
    type Item = [f64; D];

    fn next(&mut self) -> Option<[f64; D]> {
        let p = self.point(self.index);
        self.index += 1;
        Some(p)
    }
}
