//! Orthonormal Haar wavelet transform.
//!
//! Coefficient layout after [`haar_forward`]: index 0 is the scaling
//! coefficient, index 1 the coarsest detail, indices 2..4 the next level,
//! and so on up to the finest details in `n/2..n`. With this scaling the
//! transform matrix `H` is orthogonal, so `H^{-1} = H^T`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

pub fn haar_forward(x: &[f64]) -> Result<Vec<f64>> {
    let mut y = x.to_vec();
    haar_forward_in_place(&mut y, &mut Vec::new())?;
    Ok(y)
}

pub fn inverse_haar(x: &[f64]) -> Result<Vec<f64>> {
    let mut y = x.to_vec();
    inverse_haar_in_place(&mut y, &mut Vec::new())?;
    Ok(y)
}

pub fn haar_forward_in_place(x: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
    check_len(x.len())?;
    scratch.resize(x.len(), 0.0);
    let mut len = x.len();
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let (a, b) = (x[2 * i], x[2 * i + 1]);
            scratch[i] = (a + b) * FRAC_1_SQRT_2;
            scratch[half + i] = (a - b) * FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&scratch[..len]);
        len = half;
    }
    Ok(())
}

pub fn inverse_haar_in_place(x: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
    check_len(x.len())?;
    scratch.resize(x.len(), 0.0);
    let mut len = 2;
    while len <= x.len() {
        let half = len / 2;
        for i in 0..half {
            let (s, d) = (x[i], x[half + i]);
            scratch[2 * i] = (s + d) * FRAC_1_SQRT_2;
            scratch[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&scratch[..len]);
        len *= 2;
    }
    Ok(())
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(())
}
