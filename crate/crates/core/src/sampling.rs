//! Seeded random and low-discrepancy sampling.
//!
//! Every random choice in the crate goes through [`rng`] with a seed derived
//! from one master seed by [`derive_seed`], so results depend only on
//! (inputs, seed) and not on scheduling.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a master seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform entries in [-1, 1].
pub fn uniform_vector<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.random_range(-1.0..=1.0))
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    acc
}

/// Gaussian directions from a randomly shifted Halton sequence through Box–Muller.
///
/// Normalizing the output in any norm gives a deterministic, well spread
/// sample of that norm's unit sphere.
#[derive(Clone, Debug)]
pub struct HaltonGaussian {
    dim: usize,
    bases: Vec<u64>,
    shift: Vec<f64>,
    index: u64,
}

impl HaltonGaussian {
    pub fn new(dim: usize, seed: u64) -> Self {
        let pairs = dim.div_ceil(2);
        let bases = first_primes(2 * pairs);
        let mut r = rng(seed);
        let shift = (0..bases.len()).map(|_| r.random::<f64>()).collect();
        HaltonGaussian {
            dim,
            bases,
            shift,
            index: 0,
        }
    }

    pub fn next_gaussian(&mut self) -> Vector {
        self.index += 1;
        let mut out = Vector::zeros(self.dim);
        for pair in 0..self.bases.len() / 2 {
            let u1 = self.coordinate(2 * pair).max(f64::MIN_POSITIVE);
            let u2 = self.coordinate(2 * pair + 1);
            let radius = (-2.0 * u1.ln()).sqrt();
            let angle = 2.0 * PI * u2;
            out[2 * pair] = radius * angle.cos();
            if 2 * pair + 1 < self.dim {
                out[2 * pair + 1] = radius * angle.sin();
            }
        }
        out
    }

    fn coordinate(&self, d: usize) -> f64 {
        let v = radical_inverse(self.index, self.bases[d]) + self.shift[d];
        v - v.floor()
    }
}
