//! Orthogonal transforms of `R^n` and the Brownian path constructions they
//! correspond to.
//!
//! Every linear construction `A x` of a discrete Brownian path factors as
//! `A = S U` with `S` the forward (cumulative sum) map and `U` orthogonal:
//! the identity for the forward method, `S^{-1} V D` for PCA and the
//! inverse Haar transform for the Brownian bridge.

mod haar;
mod householder;
mod path;

pub use haar::{haar_forward, haar_forward_in_place, inverse_haar, inverse_haar_in_place};
pub use householder::{HouseholderChain, HouseholderReflection, ALIGNMENT_TOLERANCE};
pub use path::{bridge_path, forward_path, pca_path, CovarianceSpec, PcaBasis, PcaRotation};

pub(crate) use householder::norm;

use crate::error::{Error, Result};

/// An orthogonal map applied to a standard normal vector before path
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Identity(usize),
    Householder(HouseholderChain),
    InverseHaar(usize),
    Pca(PcaRotation),
}

impl Transform {
    pub fn dimension(&self) -> usize {
        match self {
            Transform::Identity(n) | Transform::InverseHaar(n) => *n,
            Transform::Householder(chain) => chain.dimension(),
            Transform::Pca(rotation) => rotation.dimension(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        self.apply_in_place(&mut y, &mut Vec::new())?;
        Ok(y)
    }

    /// Overwrites `x` with `U x`. `scratch` is reused across calls to avoid
    /// allocation in sampling loops.
    pub fn apply_in_place(&self, x: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        match self {
            Transform::Identity(_) => Ok(()),
            Transform::Householder(chain) => chain.apply_in_place(x),
            Transform::InverseHaar(_) => inverse_haar_in_place(x, scratch),
            Transform::Pca(rotation) => {
                scratch.clear();
                scratch.extend_from_slice(x);
                rotation.apply_into(scratch, x);
                Ok(())
            }
        }
    }
}
