//! Helpers shared by the integration tests. Normal draws here come from
//! `rand_distr` (ziggurat), independent of the crate's inverse-CDF path.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fill_normals<R: Rng>(rng: &mut R, out: &mut [f64]) {
    for x in out.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

pub fn normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    fill_normals(rng, &mut x);
    x
}

/// Running mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, y: f64) {
        self.count += 1;
        let d = y - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (y - self.mean);
    }

    pub fn variance(&self) -> f64 {
        self.m2 / (self.count - 1) as f64
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

pub fn stddev(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Dense `n x n` matrix (row-major) of a linear map given by its action.
pub fn dense<F: Fn(&[f64]) -> Vec<f64>>(n: usize, map: F) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for k in 0..n {
        e[k] = 1.0;
        let col = map(&e);
        e[k] = 0.0;
        for j in 0..n {
            a[j * n + k] = col[j];
        }
    }
    a
}
