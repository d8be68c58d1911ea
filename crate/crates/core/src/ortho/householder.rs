//! Householder reflections `I - 2 v v^T / v^T v` stored by their vector.
//!
//! Pivots are 0-based: a reflection with pivot `p` has `v_i = 0` for
//! `i < p` and leaves those coordinates of its input untouched.

use crate::error::{Error, Result};

/// Relative tolerance below which a vector counts as aligned with its pivot
/// axis and the reflection degenerates to the identity.
pub const ALIGNMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderReflection {
    dimension: usize,
    pivot: usize,
    // v[pivot..]
    tail: Vec<f64>,
    // 2 / v^T v, or 0 for the identity
    beta: f64,
}

impl HouseholderReflection {
    /// The reflection with Householder vector `v`; its pivot is the first
    /// nonzero coordinate.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        check_finite(v)?;
        let pivot = v.iter().position(|&x| x != 0.0).ok_or(Error::ZeroVector)?;
        let tail = v[pivot..].to_vec();
        let beta = 2.0 / dot(&tail, &tail);
        Ok(Self {
            dimension: v.len(),
            pivot,
            tail,
            beta,
        })
    }

    pub fn identity(dimension: usize, pivot: usize) -> Self {
        Self {
            dimension,
            pivot,
            tail: vec![0.0; dimension.saturating_sub(pivot)],
            beta: 0.0,
        }
    }

    /// Reflection `U` with `U a = |a| e_pivot`, equivalently
    /// `U e_pivot = a / |a|`.
    ///
    /// Coordinates of `a` before the pivot must be zero. A zero `a` is
    /// reported as [`Error::ZeroVector`]; an `a` already within
    /// [`ALIGNMENT_TOLERANCE`] of the positive pivot axis yields the identity.
    pub fn mapping_pivot_to(a: &[f64], pivot: usize) -> Result<Self> {
        let n = a.len();
        if pivot >= n {
            return Err(Error::DimensionMismatch {
                expected: pivot + 1,
                found: n,
            });
        }
        check_finite(a)?;
        if let Some(index) = a[..pivot].iter().position(|&x| x != 0.0) {
            return Err(Error::NonZeroBeforePivot { index, pivot });
        }
        let head = a[pivot];
        let rest_sq: f64 = a[pivot + 1..].iter().map(|x| x * x).sum();
        let norm = (head * head + rest_sq).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        // v_p = a_p - |a| without cancellation when a_p > 0
        let v_head = if head > 0.0 {
            -rest_sq / (head + norm)
        } else {
            head - norm
        };
        let v_sq = v_head * v_head + rest_sq;
        if v_sq.sqrt() <= ALIGNMENT_TOLERANCE * norm {
            return Ok(Self::identity(n, pivot));
        }
        let mut tail = Vec::with_capacity(n - pivot);
        tail.push(v_head);
        tail.extend_from_slice(&a[pivot + 1..]);
        Ok(Self {
            dimension: n,
            pivot,
            tail,
            beta: 2.0 / v_sq,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn is_identity(&self) -> bool {
        self.beta == 0.0
    }

    /// The full Householder vector.
    pub fn vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension];
        v[self.pivot..].copy_from_slice(&self.tail);
        v
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        self.apply_in_place(&mut y)?;
        Ok(y)
    }

    /// `x - beta (v^T x) v`, touching only coordinates from the pivot on.
    pub fn apply_in_place(&self, x: &mut [f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        self.reflect(x);
        Ok(())
    }

    #[inline]
    fn reflect(&self, x: &mut [f64]) {
        if self.is_identity() {
            return;
        }
        let x = &mut x[self.pivot..];
        let scale = self.beta * dot(&self.tail, x);
        for (xi, vi) in x.iter_mut().zip(&self.tail) {
            *xi -= scale * vi;
        }
    }
}

/// Ordered product `U_1 U_2 ... U_k` of reflections with strictly increasing
/// pivots.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderChain {
    dimension: usize,
    reflections: Vec<HouseholderReflection>,
}

impl HouseholderChain {
    /// The empty chain, i.e. the identity on `R^dimension`.
    pub fn identity(dimension: usize) -> Self {
        Self {
            dimension,
            reflections: Vec::new(),
        }
    }

    /// Appends `U_{k+1}` on the right of the product.
    pub fn push(&mut self, reflection: HouseholderReflection) -> Result<()> {
        if reflection.dimension != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: reflection.dimension,
            });
        }
        if let Some(last) = self.reflections.last() {
            if reflection.pivot <= last.pivot {
                return Err(Error::InvalidConfig(format!(
                    "pivot {} does not follow pivot {}",
                    reflection.pivot, last.pivot
                )));
            }
        }
        self.reflections.push(reflection);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.reflections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflections.is_empty()
    }

    pub fn reflections(&self) -> &[HouseholderReflection] {
        &self.reflections
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        self.apply_in_place(&mut y)?;
        Ok(y)
    }

    /// `x <- U_1 (U_2 (... U_k x))`.
    pub fn apply_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.check(x)?;
        for r in self.reflections.iter().rev() {
            r.reflect(x);
        }
        Ok(())
    }

    /// `x <- U^T x = U_k (... U_1 x)`.
    pub fn apply_transpose_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.check(x)?;
        for r in &self.reflections {
            r.reflect(x);
        }
        Ok(())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_finite(a: &[f64]) -> Result<()> {
    match a.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn maps_three_four_onto_first_axis() {
        let u = HouseholderReflection::mapping_pivot_to(&[3.0, 4.0], 0).unwrap();
        assert!(close(&u.apply(&[3.0, 4.0]).unwrap(), &[5.0, 0.0], 1e-12));
        assert!(close(&u.apply(&[1.0, 0.0]).unwrap(), &[0.6, 0.8], 1e-12));
        assert!(close(&u.apply(&[5.0, 0.0]).unwrap(), &[3.0, 4.0], 1e-12));
        // v is proportional to (-2, 4)
        let v = u.vector();
        assert!((v[1] / v[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn aligned_vectors_give_identity() {
        let u = HouseholderReflection::mapping_pivot_to(&[1.0, 0.0], 0).unwrap();
        assert!(u.is_identity());
        let u = HouseholderReflection::mapping_pivot_to(&[0.0, 0.0, 5.0], 2).unwrap();
        assert!(u.is_identity());
        assert_eq!(u.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn negative_axis_is_reflected() {
        let u = HouseholderReflection::mapping_pivot_to(&[-2.0, 0.0], 0).unwrap();
        assert!(close(&u.apply(&[-2.0, 0.0]).unwrap(), &[2.0, 0.0], 1e-15));
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        assert_eq!(
            HouseholderReflection::mapping_pivot_to(&[0.0, 0.0], 0),
            Err(Error::ZeroVector)
        );
        assert_eq!(
            HouseholderReflection::mapping_pivot_to(&[1.0, 2.0, 3.0], 1),
            Err(Error::NonZeroBeforePivot { index: 0, pivot: 1 })
        );
        assert!(matches!(
            HouseholderReflection::mapping_pivot_to(&[1.0, f64::NAN], 0),
            Err(Error::NonFinite(1))
        ));
        assert!(HouseholderReflection::mapping_pivot_to(&[1.0], 1).is_err());
    }

    #[test]
    fn reflection_in_first_axis_hyperplane() {
        let u = HouseholderReflection::from_vector(&[1.0, 0.0]).unwrap();
        assert_eq!(u.apply(&[3.0, 7.0]).unwrap(), vec![-3.0, 7.0]);
        assert_eq!(u.apply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(u.apply(&[1.0]).is_err());
    }

    #[test]
    fn chain_order_is_u1_times_u2() {
        let u1 = HouseholderReflection::from_vector(&[1.0, 1.0, 0.0]).unwrap();
        let u2 = HouseholderReflection::from_vector(&[0.0, 1.0, -2.0]).unwrap();
        let mut chain = HouseholderChain::identity(3);
        chain.push(u1.clone()).unwrap();
        chain.push(u2.clone()).unwrap();
        let x = [0.3, -1.2, 2.5];
        let expected = u1.apply(&u2.apply(&x).unwrap()).unwrap();
        assert!(close(&chain.apply(&x).unwrap(), &expected, 1e-14));
        let mut t = x.to_vec();
        chain.apply_transpose_in_place(&mut t).unwrap();
        let expected_t = u2.apply(&u1.apply(&x).unwrap()).unwrap();
        assert!(close(&t, &expected_t, 1e-14));
    }

    #[test]
    fn chain_rejects_bad_pivots_and_dimensions() {
        let mut chain = HouseholderChain::identity(3);
        chain.push(HouseholderReflection::from_vector(&[0.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(chain.push(HouseholderReflection::from_vector(&[1.0, 1.0, 1.0]).unwrap()).is_err());
        assert!(chain.push(HouseholderReflection::from_vector(&[1.0, 1.0]).unwrap()).is_err());
        assert!(chain.apply(&[1.0]).is_err());
    }

    #[test]
    fn empty_chain_is_identity() {
        let chain = HouseholderChain::identity(4);
        assert!(chain.is_empty());
        assert_eq!(chain.apply(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    proptest! {
        #[test]
        fn involution_and_isometry(
            a in prop::collection::vec(-10.0f64..10.0, 2..40),
            x_seed in prop::collection::vec(-10.0f64..10.0, 40),
        ) {
            let n = a.len();
            let x = &x_seed[..n];
            prop_assume!(norm(&a) > 1e-6);
            let u = HouseholderReflection::mapping_pivot_to(&a, 0).unwrap();
            let ux = u.apply(x).unwrap();
            let uux = u.apply(&ux).unwrap();
            let scale = norm(x).max(1e-300);
            prop_assert!(close(&uux, x, 1e-12 * scale));
            prop_assert!((norm(&ux) - norm(x)).abs() <= 1e-12 * scale);
            let ua = u.apply(&a).unwrap();
            prop_assert!((ua[0] - norm(&a)).abs() <= 1e-12 * norm(&a));
            prop_assert!(ua[1..].iter().all(|c| c.abs() <= 1e-12 * norm(&a)));
        }

        #[test]
        fn coordinates_before_pivot_untouched(
            tail in prop::collection::vec(-5.0f64..5.0, 1..20),
            head in prop::collection::vec(-5.0f64..5.0, 1..6),
            x_seed in prop::collection::vec(-5.0f64..5.0, 26),
        ) {
            let pivot = head.len();
            let mut a = vec![0.0; pivot];
            a.extend_from_slice(&tail);
            prop_assume!(norm(&a) > 1e-6);
            let u = HouseholderReflection::mapping_pivot_to(&a, pivot).unwrap();
            let x = &x_seed[..a.len()];
            let ux = u.apply(x).unwrap();
            prop_assert_eq!(&ux[..pivot], &x[..pivot]);
        }
    }
}
