//! Uniform point sources (shifted Sobol and pseudorandom) and their mapping
//! to standard normal vectors.

mod normal;
mod rng;
mod shift;
mod sobol;

pub use normal::{inverse_normal_cdf, normal_cdf};
pub use rng::{derive_seed, splitmix64, SeededRng};
pub use shift::RandomShift;
pub use sobol::{DirectionTable, SobolGenerator, BITS};

use crate::error::{Error, Result};

/// Something that yields points of a fixed dimension with every coordinate
/// strictly inside (0, 1).
pub trait UniformSource {
    fn dimension(&self) -> usize;

    /// Writes the next point into `out`, which has length `dimension()`.
    fn fill_uniform(&mut self, out: &mut [f64]);
}

/// Sobol points under one random shift.
#[derive(Debug, Clone)]
pub struct ShiftedSobol {
    generator: SobolGenerator,
    shift: RandomShift,
}

impl ShiftedSobol {
    pub fn new(generator: SobolGenerator, shift: RandomShift) -> Result<Self> {
        if generator.dimension() != shift.dimension() {
            return Err(Error::DimensionMismatch {
                expected: generator.dimension(),
                found: shift.dimension(),
            });
        }
        Ok(Self { generator, shift })
    }

    pub fn shift(&self) -> &RandomShift {
        &self.shift
    }
}

impl UniformSource for ShiftedSobol {
    fn dimension(&self) -> usize {
        self.generator.dimension()
    }

    fn fill_uniform(&mut self, out: &mut [f64]) {
        let raw = self.generator.next_raw();
        self.shift.apply_raw(raw, out);
    }
}

/// Independent uniforms from a seeded 64-bit generator.
#[derive(Debug, Clone)]
pub struct PseudoRandom {
    dimension: usize,
    rng: SeededRng,
}

impl PseudoRandom {
    pub fn new(dimension: usize, rng: SeededRng) -> Self {
        Self { dimension, rng }
    }
}

impl UniformSource for PseudoRandom {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn fill_uniform(&mut self, out: &mut [f64]) {
        for u in out.iter_mut() {
            *u = self.rng.next_open01();
        }
    }
}

/// Maps a point in (0, 1)^d to a standard normal vector coordinate-wise.
pub fn normals_from_uniform(point: &[f64]) -> Result<Vec<f64>> {
    point.iter().map(|&u| inverse_normal_cdf(u)).collect()
}

/// Draws the next point of `source` and returns it as a standard normal
/// vector of length `dimension`.
pub fn normal_vector<S: UniformSource + ?Sized>(source: &mut S, dimension: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; dimension];
    fill_normal(source, &mut out)?;
    Ok(out)
}

/// In-place variant of [`normal_vector`].
pub fn fill_normal<S: UniformSource + ?Sized>(source: &mut S, out: &mut [f64]) -> Result<()> {
    if out.len() != source.dimension() {
        return Err(Error::DimensionMismatch {
            expected: source.dimension(),
            found: out.len(),
        });
    }
    source.fill_uniform(out);
    for u in out.iter_mut() {
        *u = inverse_normal_cdf(*u)?;
    }
    Ok(())
}
