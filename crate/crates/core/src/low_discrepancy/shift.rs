//! Cranley-Patterson rotation: add a fixed uniform offset modulo 1.

use rand::Rng;

use crate::error::{Error, Result};

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;
const TWO_POW_53_INV: f64 = 1.0 / (1u64 << 53) as f64;

/// Offsets in [0, 1)^d, held both as floats and as 64-bit fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomShift {
    offsets: Vec<f64>,
    fixed: Vec<u64>,
}

impl RandomShift {
    pub fn new(offsets: Vec<f64>) -> Result<Self> {
        for (i, &o) in offsets.iter().enumerate() {
            if !(0.0..1.0).contains(&o) {
                return Err(Error::InvalidConfig(format!(
                    "shift offset {o} at index {i} is outside [0, 1)"
                )));
            }
        }
        // exact: every f64 in [0, 1) times 2^64 is an integer below 2^64
        let fixed = offsets.iter().map(|&o| (o * TWO_POW_64) as u64).collect();
        Ok(Self { offsets, fixed })
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            offsets: vec![0.0; dimension],
            fixed: vec![0; dimension],
        }
    }

    /// Independent uniform offsets on the 2^-53 grid.
    pub fn random<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Self {
        let fixed: Vec<u64> = (0..dimension).map(|_| rng.next_u64() >> 11 << 11).collect();
        let offsets = fixed.iter().map(|&f| (f >> 11) as f64 * TWO_POW_53_INV).collect();
        Self { offsets, fixed }
    }

    pub fn dimension(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Coordinate-wise fractional part of `point + offsets`.
    pub fn apply(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: point.len(),
            });
        }
        Ok(point
            .iter()
            .zip(&self.offsets)
            .map(|(&x, &o)| {
                let y = x + o;
                let y = y - y.floor();
                // x + o can round up to exactly 1.0
                if y >= 1.0 {
                    0.0
                } else {
                    y
                }
            })
            .collect())
    }

    /// Shifts 32-bit fixed-point coordinates in 64-bit arithmetic and maps
    /// the result to the midpoint of its 2^-53 cell, so every output lies
    /// strictly inside (0, 1).
    pub fn apply_raw(&self, raw: &[u32], out: &mut [f64]) {
        debug_assert_eq!(raw.len(), self.fixed.len());
        debug_assert_eq!(out.len(), self.fixed.len());
        for ((o, &r), &f) in out.iter_mut().zip(raw).zip(&self.fixed) {
            let z = ((r as u64) << 32).wrapping_add(f);
            *o = ((z >> 11) as f64 + 0.5) * TWO_POW_53_INV;
        }
    }
}
