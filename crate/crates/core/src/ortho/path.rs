//! Discrete Brownian paths `(B_{T/n}, ..., B_T) = A x` for standard normal
//! `x`, with covariance `(T/n) min(j, k)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Path length and horizon of a discrete Brownian path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSpec {
    n: usize,
    maturity: f64,
}

impl CovarianceSpec {
    pub fn new(n: usize, maturity: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("path length must be positive".into()));
        }
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::InvalidConfig(format!("maturity must be positive, got {maturity}")));
        }
        Ok(Self { n, maturity })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    pub fn step(&self) -> f64 {
        self.maturity / self.n as f64
    }

    /// Entry `(j, k)` of the covariance matrix, 0-based.
    pub fn covariance(&self, j: usize, k: usize) -> f64 {
        self.step() * (j.min(k) + 1) as f64
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Forward construction `S x`: scaled cumulative sums.
pub fn forward_path(x: &[f64], spec: &CovarianceSpec) -> Result<Vec<f64>> {
    spec.check(x)?;
    let scale = spec.step().sqrt();
    let mut acc = 0.0;
    Ok(x
        .iter()
        .map(|&v| {
            acc += v;
            scale * acc
        })
        .collect())
}

/// Closed-form eigendecomposition `Sigma = V D^2 V^T` of the Brownian
/// covariance, eigenvalues in descending order.
///
/// The eigenvalues of `min(j, k)` are `1 / (4 sin^2((2k-1) pi / (2(2n+1))))`
/// with eigenvectors `v_k(j) = 2/sqrt(2n+1) sin((2k-1) j pi / (2n+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    spec: CovarianceSpec,
    eigenvalues: Vec<f64>,
    // A = V D, row-major
    factor: Vec<f64>,
}

impl PcaBasis {
    pub fn new(spec: CovarianceSpec) -> Self {
        let n = spec.len();
        let denom = (2 * n + 1) as f64;
        let eigenvalues: Vec<f64> = (1..=n)
            .map(|k| {
                let s = ((2 * k - 1) as f64 * PI / (2.0 * denom)).sin();
                spec.step() / (4.0 * s * s)
            })
            .collect();
        let norm = 2.0 / denom.sqrt();
        let mut factor = vec![0.0; n * n];
        for j in 1..=n {
            for k in 1..=n {
                let angle = ((2 * k - 1) * j) as f64 * PI / denom;
                factor[(j - 1) * n + (k - 1)] = norm * angle.sin() * eigenvalues[k - 1].sqrt();
            }
        }
        Self {
            spec,
            eigenvalues,
            factor,
        }
    }

    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }

    /// Eigenvalues of the covariance matrix, largest first.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Entry `(j, k)` of `A = V D`.
    pub fn factor(&self, j: usize, k: usize) -> f64 {
        self.factor[j * self.spec.len() + k]
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.spec.check(x)?;
        let n = self.spec.len();
        Ok(self
            .factor
            .chunks_exact(n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// PCA construction `V D x`. Builds the basis on every call; hold a
/// [`PcaBasis`] to amortize it.
pub fn pca_path(x: &[f64], spec: &CovarianceSpec) -> Result<Vec<f64>> {
    PcaBasis::new(*spec).apply(x)
}

/// Brownian bridge construction `S H^{-1} x`.
pub fn bridge_path(x: &[f64], spec: &CovarianceSpec) -> Result<Vec<f64>> {
    spec.check(x)?;
    forward_path(&super::haar::inverse_haar(x)?, spec)
}

/// The orthogonal matrix `S^{-1} V D` for which the forward construction of
/// `U x` reproduces the PCA path of `x`. Applied densely.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaRotation {
    n: usize,
    matrix: Vec<f64>,
}

impl PcaRotation {
    pub fn new(n: usize) -> Result<Self> {
        // S^{-1} V D does not depend on the horizon
        let basis = PcaBasis::new(CovarianceSpec::new(n, 1.0)?);
        let inv_scale = (n as f64).sqrt();
        let mut matrix = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let prev = if j == 0 { 0.0 } else { basis.factor(j - 1, k) };
                matrix[j * n + k] = inv_scale * (basis.factor(j, k) - prev);
            }
        }
        Ok(Self { n, matrix })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.matrix.chunks_exact(self.n)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}
