//! Householder transforms from linear regression of inner functions.
//!
//! For an integrand `f = g(h_1, ..., h_m)` of a standard normal vector `X`,
//! the best linear approximation of `h_k` is `a_k^T X + b_k` with
//! `a_{k,j} = E(X_j h_k(X))` and `b_k = E(h_k(X))`. [`build_chain`] turns the
//! vectors `a_k` into an orthogonal `U = U_1 ... U_r` such that each
//! `a_k^T U x` depends only on the first few coordinates of `x`, which is
//! what low-discrepancy points integrate best.

use crate::error::{Error, Result};
use crate::ortho::{norm, HouseholderChain, HouseholderReflection};

/// Residual norm, relative to the untransformed vector, below which a
/// regression vector is treated as already spanned by earlier pivots.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    dimension: usize,
    vectors: Vec<Vec<f64>>,
    intercepts: Option<Vec<f64>>,
}

impl RegressionSpec {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dimension = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidConfig("at least one regression vector is required".into()))?;
        if vectors.len() > dimension {
            return Err(Error::TooManyVectors {
                count: vectors.len(),
                dimension,
            });
        }
        for v in &vectors {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: v.len(),
                });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Self {
            dimension,
            vectors,
            intercepts: None,
        })
    }

    /// Attaches `b_k = E(h_k(X))`; only used for reporting.
    pub fn with_intercepts(mut self, intercepts: Vec<f64>) -> Result<Self> {
        if intercepts.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vectors.len(),
                found: intercepts.len(),
            });
        }
        self.intercepts = Some(intercepts);
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn intercepts(&self) -> Option<&[f64]> {
        self.intercepts.as_deref()
    }
}

/// Builds `U = U_1 ... U_r`, `r <= m`, one pivot per regression vector that
/// is not already in the span of the earlier ones.
///
/// The regression vector of `h_k(U x)` is `U^T a_k`, so raw vectors are
/// transformed by the chain built so far rather than re-estimated. The
/// coordinates of `U^T a_k` before the current pivot are dropped (they are
/// carried by the earlier pivot directions) and the next reflection maps
/// the pivot axis onto the remainder.
pub fn build_chain(spec: &RegressionSpec) -> Result<HouseholderChain> {
    let n = spec.dimension;
    let mut chain = HouseholderChain::identity(n);
    let mut pivot = 0;
    let mut work = vec![0.0; n];
    for a in &spec.vectors {
        if pivot == n {
            break;
        }
        let scale = norm(a);
        work.copy_from_slice(a);
        chain.apply_transpose_in_place(&mut work)?;
        work[..pivot].fill(0.0);
        let residual = norm(&work);
        if residual == 0.0 || residual <= RESIDUAL_TOLERANCE * scale {
            continue;
        }
        let reflection = HouseholderReflection::mapping_pivot_to(&work, pivot)?;
        if !reflection.is_identity() {
            chain.push(reflection)?;
        }
        pivot += 1;
    }
    Ok(chain)
}

/// Fraction `|a|^2 / Var(h)` of the variance of `h` explained by its linear
/// part.
pub fn capture_ratio(a: &[f64], var_h: f64) -> Result<f64> {
    if var_h.is_nan() || var_h <= 0.0 {
        return Err(Error::NonPositiveVariance(var_h));
    }
    let n = norm(a);
    Ok(n * n / var_h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptureReport {
    pub ratios: Vec<f64>,
    pub intercepts: Option<Vec<f64>>,
}

impl CaptureReport {
    /// One capture ratio per regression vector, given `Var(h_k(X))`.
    pub fn new(spec: &RegressionSpec, variances: &[f64]) -> Result<Self> {
        if variances.len() != spec.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.vectors.len(),
                found: variances.len(),
            });
        }
        let ratios = spec
            .vectors
            .iter()
            .zip(variances)
            .map(|(a, &v)| capture_ratio(a, v))
            .collect::<Result<_>>()?;
        Ok(Self {
            ratios,
            intercepts: spec.intercepts.clone(),
        })
    }
}

/// Regression vector of `h(x) = sum_k w_k exp(sum_i c_{k,i} x_i + d_{k,i})`:
///
/// `a_j = sum_k w_k c_{k,j} exp(sum_i c_{k,i}^2 / 2 + d_{k,i})`.
///
/// `c` and `d` are given row by row (row `k` belongs to `w_k`).
pub fn loglinear_regression_vector(w: &[f64], c: &[Vec<f64>], d: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = check_loglinear(w, c, d)?;
    let mut a = vec![0.0; n];
    for (k, (row_c, row_d)) in c.iter().zip(d).enumerate() {
        let weight = loglinear_term(w[k], row_c, row_d, k)?;
        for (aj, &ckj) in a.iter_mut().zip(row_c) {
            *aj += weight * ckj;
        }
    }
    Ok(a)
}

/// Intercept `E(h(X)) = sum_k w_k exp(sum_i c_{k,i}^2 / 2 + d_{k,i})` of
/// the same log-linear family.
pub fn loglinear_mean(w: &[f64], c: &[Vec<f64>], d: &[Vec<f64>]) -> Result<f64> {
    check_loglinear(w, c, d)?;
    c.iter()
        .zip(d)
        .enumerate()
        .map(|(k, (row_c, row_d))| loglinear_term(w[k], row_c, row_d, k))
        .sum()
}

fn loglinear_term(w: f64, row_c: &[f64], row_d: &[f64], k: usize) -> Result<f64> {
    let exponent: f64 = row_c.iter().zip(row_d).map(|(c, d)| 0.5 * c * c + d).sum();
    let e = exponent.exp();
    if !e.is_finite() {
        return Err(Error::Overflow(k));
    }
    Ok(w * e)
}

fn check_loglinear(w: &[f64], c: &[Vec<f64>], d: &[Vec<f64>]) -> Result<usize> {
    let n = c.first().map(Vec::len).unwrap_or(0);
    if c.len() != w.len() || d.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: c.len().min(d.len()),
        });
    }
    for row in c.iter().chain(d) {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        if let Some(i) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    if let Some(i) = w.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(n)
}
